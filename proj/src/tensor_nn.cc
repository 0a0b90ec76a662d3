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

#include "esfl/tensor_nn.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "esfl/error.h"
#include "esfl/rng.h"

namespace esfl {

namespace {

std::string DimsString(const ModelDims& d) {
  return "(" + std::to_string(d.input) + "," + std::to_string(d.hidden) + "," +
         std::to_string(d.classes) + ")";
}

void CheckDims(const ModelDims& dims) {
  if (dims.input == 0 || dims.hidden == 0 || dims.classes == 0) {
    throw Error(ErrorCode::kInvalidDimension,
                "model dimensions must all be >= 1, got " + DimsString(dims));
  }
}

// Hidden pre-activations, n x hidden.
Matrix HiddenPreActivation(const ModelParams& model, const Matrix& batch) {
  const ModelDims& d = model.dims();
  auto w1 = model.layer1_weights();
  auto b1 = model.layer1_bias();
  Matrix z(batch.rows(), d.hidden);
  for (size_t n = 0; n < batch.rows(); ++n) {
    auto x = batch.row(n);
    for (size_t h = 0; h < d.hidden; ++h) {
      double acc = b1[h];
      const double* w = w1.data() + h * d.input;
      for (size_t i = 0; i < d.input; ++i) acc += w[i] * x[i];
      z(n, h) = acc;
    }
  }
  return z;
}

void CheckBatch(const ModelParams& model, const Matrix& batch) {
  if (batch.cols() != model.dims().input) {
    throw Error(ErrorCode::kShape,
                "batch has " + std::to_string(batch.cols()) +
                    " columns, model expects " +
                    std::to_string(model.dims().input));
  }
}

}  // namespace

ModelParams::ModelParams(ModelDims dims) : dims_(dims) {
  CheckDims(dims);
  values_.assign(dims.ParamCount(), 0.0);
}

ModelParams ModelParams::Unflatten(ModelDims dims,
                                   std::span<const double> values) {
  ModelParams p(dims);
  if (values.size() != p.values_.size()) {
    throw Error(ErrorCode::kShape,
                "flat vector of length " + std::to_string(values.size()) +
                    " does not match dims " + DimsString(dims));
  }
  std::copy(values.begin(), values.end(), p.values_.begin());
  return p;
}

bool BitIdentical(const ModelParams& a, const ModelParams& b) {
  if (!(a.dims() == b.dims()) || a.size() != b.size()) return false;
  auto x = a.Flatten();
  auto y = b.Flatten();
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::bit_cast<uint64_t>(x[i]) != std::bit_cast<uint64_t>(y[i])) {
      return false;
    }
  }
  return true;
}

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

void TrainingConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidConfig, msg);
  };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail("learning_rate must be > 0");
  }
  if (batch_size == 0) fail("batch_size must be >= 1");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must be in (0,1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must be in (0,1)");
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be > 0");
}

ModelParams InitParams(ModelDims dims, uint64_t seed) {
  ModelParams p(dims);
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(dims.input));
  for (double& w : p.layer1_weights()) w = rng.Uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (double& w : p.layer2_weights()) w = rng.Uniform(-s2, s2);
  return p;
}

Matrix Forward(const ModelParams& model, const Matrix& batch) {
  CheckBatch(model, batch);
  const ModelDims& d = model.dims();
  Matrix z = HiddenPreActivation(model, batch);
  auto w2 = model.layer2_weights();
  auto b2 = model.layer2_bias();
  Matrix logits(batch.rows(), d.classes);
  for (size_t n = 0; n < batch.rows(); ++n) {
    for (size_t c = 0; c < d.classes; ++c) {
      double acc = b2[c];
      const double* w = w2.data() + c * d.hidden;
      for (size_t h = 0; h < d.hidden; ++h) {
        acc += w[h] * std::max(z(n, h), 0.0);
      }
      logits(n, c) = acc;
    }
  }
  return logits;
}

Matrix Softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (size_t n = 0; n < logits.rows(); ++n) {
    auto row = logits.row(n);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (size_t c = 0; c < row.size(); ++c) {
      p(n, c) = std::exp(row[c] - mx);
      sum += p(n, c);
    }
    for (size_t c = 0; c < row.size(); ++c) p(n, c) /= sum;
  }
  return p;
}

LossAndGrad SoftmaxCrossEntropy(const Matrix& logits,
                                std::span<const size_t> labels) {
  if (labels.size() != logits.rows()) {
    throw Error(ErrorCode::kShape, "label count does not match logit rows");
  }
  if (logits.rows() == 0 || logits.cols() == 0) {
    throw Error(ErrorCode::kShape, "empty logits");
  }
  const size_t classes = logits.cols();
  for (size_t y : labels) {
    if (y >= classes) {
      throw Error(ErrorCode::kInvalidLabel,
                  "label " + std::to_string(y) + " outside [0," +
                      std::to_string(classes) + ")");
    }
  }
  const double inv_n = 1.0 / static_cast<double>(logits.rows());
  LossAndGrad out;
  out.grad_logits = Matrix(logits.rows(), classes);
  double total = 0.0;
  for (size_t n = 0; n < logits.rows(); ++n) {
    auto row = logits.row(n);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - mx);
    const double log_sum = std::log(sum);
    // -log softmax(row)[y] = log_sum - (row[y] - mx) >= 0
    total += std::max(0.0, log_sum - (row[labels[n]] - mx));
    for (size_t c = 0; c < classes; ++c) {
      const double prob = std::exp(row[c] - mx) / sum;
      out.grad_logits(n, c) = (prob - (c == labels[n] ? 1.0 : 0.0)) * inv_n;
    }
  }
  out.loss = total * inv_n;
  return out;
}

std::vector<double> Backward(const ModelParams& model, const Matrix& batch,
                             const Matrix& grad_logits) {
  CheckBatch(model, batch);
  const ModelDims& d = model.dims();
  if (grad_logits.rows() != batch.rows() || grad_logits.cols() != d.classes) {
    throw Error(ErrorCode::kShape, "grad_logits shape does not match batch/model");
  }
  Matrix z = HiddenPreActivation(model, batch);
  auto w2 = model.layer2_weights();

  ModelParams grad(d);
  auto g_w1 = grad.layer1_weights();
  auto g_b1 = grad.layer1_bias();
  auto g_w2 = grad.layer2_weights();
  auto g_b2 = grad.layer2_bias();

  std::vector<double> dz(d.hidden);
  for (size_t n = 0; n < batch.rows(); ++n) {
    auto x = batch.row(n);
    auto g = grad_logits.row(n);
    for (size_t c = 0; c < d.classes; ++c) {
      g_b2[c] += g[c];
      double* gw = g_w2.data() + c * d.hidden;
      for (size_t h = 0; h < d.hidden; ++h) gw[h] += g[c] * std::max(z(n, h), 0.0);
    }
    for (size_t h = 0; h < d.hidden; ++h) {
      double acc = 0.0;
      if (z(n, h) > 0.0) {
        for (size_t c = 0; c < d.classes; ++c) acc += g[c] * w2[c * d.hidden + h];
      }
      dz[h] = acc;
    }
    for (size_t h = 0; h < d.hidden; ++h) {
      g_b1[h] += dz[h];
      double* gw = g_w1.data() + h * d.input;
      for (size_t i = 0; i < d.input; ++i) gw[i] += dz[h] * x[i];
    }
  }
  auto flat = grad.Flatten();
  return {flat.begin(), flat.end()};
}

void AdamStep(ModelParams& params, std::span<const double> grad,
              OptimizerState& state, const TrainingConfig& config) {
  const size_t n = params.size();
  if (grad.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw Error(ErrorCode::kShape,
                "gradient/optimizer state length does not match parameters (" +
                    std::to_string(n) + ")");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(config.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(config.adam_beta2, t);
  auto values = params.mutable_values();
  for (size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
    v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * (g * g);
    const double m_hat = m / bias1;
    const double v_hat = v / bias2;
    values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
  }
}

size_t ArgMax(std::span<const double> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

size_t Predict(const ModelParams& model, std::span<const double> features) {
  if (features.size() != model.dims().input) {
    throw Error(ErrorCode::kShape,
                "feature vector has length " + std::to_string(features.size()) +
                    ", model expects " + std::to_string(model.dims().input));
  }
  Matrix batch(1, features.size());
  std::copy(features.begin(), features.end(), batch.row(0).begin());
  return ArgMax(Forward(model, batch).row(0));
}

ModelParams TrainClassifier(const ModelParams& init, const Matrix& features,
                            std::span<const size_t> labels,
                            const TrainingConfig& config) {
  config.Validate();
  if (features.cols() != init.dims().input) {
    throw Error(ErrorCode::kShape,
                "training features have " + std::to_string(features.cols()) +
                    " columns, model expects " +
                    std::to_string(init.dims().input));
  }
  if (labels.size() != features.rows()) {
    throw Error(ErrorCode::kShape, "label count does not match feature rows");
  }
  ModelParams params = init;
  if (config.epochs == 0 || features.rows() == 0) return params;

  OptimizerState state = OptimizerState::Fresh(params.size());
  Rng rng(config.seed);
  std::vector<size_t> order(features.rows());
  std::vector<size_t> batch_labels;
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t count = std::min(config.batch_size, order.size() - start);
      Matrix batch(count, features.cols());
      batch_labels.resize(count);
      for (size_t k = 0; k < count; ++k) {
        auto src = features.row(order[start + k]);
        std::copy(src.begin(), src.end(), batch.row(k).begin());
        batch_labels[k] = labels[order[start + k]];
      }
      LossAndGrad lg = SoftmaxCrossEntropy(Forward(params, batch), batch_labels);
      std::vector<double> grad = Backward(params, batch, lg.grad_logits);
      AdamStep(params, grad, state, config);
    }
  }
  if (!AllFinite(params.Flatten())) {
    throw Error(ErrorCode::kNonFinite,
                "training diverged to non-finite parameters; lower learning_rate");
  }
  return params;
}

}  // namespace esfl
