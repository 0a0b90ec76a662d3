// Copyright 2026 The ESFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESFL_TENSOR_NN_H_
#define ESFL_TENSOR_NN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace esfl {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

struct ModelDims {
  size_t input = 0;
  size_t hidden = 0;
  size_t classes = 0;

  size_t ParamCount() const {
    return hidden * input + hidden + classes * hidden + classes;
  }
  bool operator==(const ModelDims&) const = default;
};

// Weights and biases of the two-layer classifier
//   hidden = relu(W1 x + b1),  logits = W2 hidden + b2
// stored as one flat vector in the order
//   W1 (hidden x input, row-major), b1, W2 (classes x hidden, row-major), b2.
// That order is also the on-disk payload order.
class ModelParams {
 public:
  ModelParams() = default;
  // All-zero parameters. Throws kInvalidDimension if any dim is zero.
  explicit ModelParams(ModelDims dims);

  // Throws kShape if values.size() != dims.ParamCount().
  static ModelParams Unflatten(ModelDims dims, std::span<const double> values);

  const ModelDims& dims() const { return dims_; }
  size_t size() const { return values_.size(); }

  std::span<const double> Flatten() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  std::span<const double> layer1_weights() const { return Slice(0, W1Size()); }
  std::span<double> layer1_weights() { return MutableSlice(0, W1Size()); }
  std::span<const double> layer1_bias() const {
    return Slice(W1Size(), dims_.hidden);
  }
  std::span<double> layer1_bias() { return MutableSlice(W1Size(), dims_.hidden); }
  std::span<const double> layer2_weights() const {
    return Slice(W2Offset(), W2Size());
  }
  std::span<double> layer2_weights() { return MutableSlice(W2Offset(), W2Size()); }
  std::span<const double> layer2_bias() const {
    return Slice(W2Offset() + W2Size(), dims_.classes);
  }
  std::span<double> layer2_bias() {
    return MutableSlice(W2Offset() + W2Size(), dims_.classes);
  }

  // Element-wise ==, so -0.0 == 0.0. Use BitIdentical for byte equality.
  bool operator==(const ModelParams&) const = default;

 private:
  size_t W1Size() const { return dims_.hidden * dims_.input; }
  size_t W2Offset() const { return W1Size() + dims_.hidden; }
  size_t W2Size() const { return dims_.classes * dims_.hidden; }
  std::span<const double> Slice(size_t off, size_t n) const {
    return std::span<const double>(values_).subspan(off, n);
  }
  std::span<double> MutableSlice(size_t off, size_t n) {
    return std::span<double>(values_).subspan(off, n);
  }

  ModelDims dims_;
  std::vector<double> values_;
};

bool BitIdentical(const ModelParams& a, const ModelParams& b);
bool AllFinite(std::span<const double> values);

struct TrainingConfig {
  double learning_rate = 0.01;
  size_t epochs = 50;
  size_t batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  uint64_t seed = 0;

  // Throws kInvalidConfig on the first violated bound.
  void Validate() const;
};

struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  uint64_t step_count = 0;

  static OptimizerState Fresh(size_t param_count) {
    return {std::vector<double>(param_count, 0.0),
            std::vector<double>(param_count, 0.0), 0};
  }
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
ModelParams InitParams(ModelDims dims, uint64_t seed);

// Returns n x classes logits.
Matrix Forward(const ModelParams& model, const Matrix& batch);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad_logits;
};

// Mean softmax cross-entropy over the batch and its gradient with respect
// to the logits: (softmax(row) - onehot(label)) / n.
LossAndGrad SoftmaxCrossEntropy(const Matrix& logits,
                                std::span<const size_t> labels);

// Row-wise softmax probabilities.
Matrix Softmax(const Matrix& logits);

// Gradient of the loss with respect to every parameter, in flattening order.
std::vector<double> Backward(const ModelParams& model, const Matrix& batch,
                             const Matrix& grad_logits);

// One bias-corrected Adam update, in place.
void AdamStep(ModelParams& params, std::span<const double> grad,
              OptimizerState& state, const TrainingConfig& config);

// Argmax of the logits, lowest index on ties.
size_t Predict(const ModelParams& model, std::span<const double> features);
size_t ArgMax(std::span<const double> values);

// Runs config.epochs passes of minibatch Adam. Each epoch visits the rows
// in an order drawn from Rng(config.seed); zero epochs returns init as is.
ModelParams TrainClassifier(const ModelParams& init, const Matrix& features,
                            std::span<const size_t> labels,
                            const TrainingConfig& config);

}  // namespace esfl

#endif  // ESFL_TENSOR_NN_H_
