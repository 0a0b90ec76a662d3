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

#include "esfl/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace esfl {

namespace {

using nlohmann::json;

struct Problems {
  std::vector<std::string> unknown;
  std::vector<std::string> invalid;
};

std::string Join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// Reads typed fields from one JSON object and reports keys it never read
// as unknown when it goes out of scope.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, Problems& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) {
      problems_.invalid.push_back(Name("") + " must be an object");
      ok_ = false;
    }
  }
  ~ObjectReader() {
    if (!ok_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) problems_.unknown.push_back(Name(key));
    }
  }
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  const json* Child(const std::string& key) {
    seen_.insert(key);
    if (!ok_ || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  std::string Name(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void Bool(const std::string& key, bool& out) {
    if (const json* v = Child(key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else Invalid(key, "must be a boolean");
    }
  }
  void Double(const std::string& key, double& out) {
    if (const json* v = Child(key)) {
      if (v->is_number()) out = v->get<double>();
      else Invalid(key, "must be a number");
    }
  }
  void Size(const std::string& key, size_t& out) {
    if (const json* v = Child(key)) {
      if (v->is_number_unsigned()) out = v->get<size_t>();
      else Invalid(key, "must be a non-negative integer");
    }
  }
  void U64(const std::string& key, uint64_t& out) {
    if (const json* v = Child(key)) {
      if (v->is_number_unsigned()) out = v->get<uint64_t>();
      else Invalid(key, "must be a non-negative integer");
    }
  }
  void Str(const std::string& key, std::string& out) {
    if (const json* v = Child(key)) {
      if (v->is_string()) out = v->get<std::string>();
      else Invalid(key, "must be a string");
    }
  }
  void StrList(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = Child(key)) {
      if (!v->is_array()) {
        Invalid(key, "must be an array of strings");
        return;
      }
      out.clear();
      for (const json& e : *v) {
        if (!e.is_string()) {
          Invalid(key, "must be an array of strings");
          return;
        }
        out.push_back(e.get<std::string>());
      }
    }
  }
  void Invalid(const std::string& key, const std::string& msg) {
    problems_.invalid.push_back(Name(key) + " " + msg);
  }

 private:
  const json& j_;
  std::string path_;
  Problems& problems_;
  std::set<std::string> seen_;
  bool ok_ = true;
};

void ReadSynthetic(const json& j, const std::string& path, SyntheticSpec& spec,
                   std::optional<size_t>& n_classes, Problems& p) {
  ObjectReader r(j, path, p);
  r.Size("n_regions", spec.n_regions);
  r.Size("clients_per_region", spec.clients_per_region);
  r.Size("rows_per_client", spec.rows_per_client);
  if (r.Child("n_classes")) {
    size_t n = 0;
    r.Size("n_classes", n);
    n_classes = n;
  }
  r.Double("region_separation", spec.region_separation);
  r.Double("noise_rate", spec.noise_rate);
  r.U64("seed", spec.seed);
}

void Check(Problems& p, bool ok, const std::string& msg) {
  if (!ok) p.invalid.push_back(msg);
}

template <typename Fn>
void CheckThrows(Problems& p, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    p.invalid.push_back(e.what());
  }
}

[[noreturn]] void Raise(const Problems& p) {
  if (!p.unknown.empty()) {
    std::vector<std::string> msgs;
    for (const auto& k : p.unknown) msgs.push_back("unknown key \"" + k + "\"");
    throw ConfigError(ErrorCode::kStrictMode, msgs);
  }
  throw ConfigError(ErrorCode::kConfigValidation, p.invalid);
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::vector<std::string> problems)
    : Error(code, "config error: " + Join(problems, "; ")), problems_(std::move(problems)) {}

ExperimentConfig ParseConfig(std::string_view json_text,
                             const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::kConfigValidation, {std::string("malformed JSON: ") + e.what()});
  }

  ExperimentConfig c;
  Problems p;
  std::optional<size_t> synthetic_classes;
  {
    ObjectReader r(root, "", p);
    if (const json* data = r.Child("data")) {
      ObjectReader d(*data, "data", p);
      if (const json* syn = d.Child("synthetic")) {
        c.synthetic.emplace();
        ReadSynthetic(*syn, "data.synthetic", *c.synthetic, synthetic_classes, p);
      }
      if (const json* csv = d.Child("csv")) {
        c.csv.emplace();
        ObjectReader cr(*csv, "data.csv", p);
        std::string path;
        cr.Str("path", path);
        Check(p, !path.empty(), "data.csv.path is required");
        c.csv->path = path.empty() ? std::filesystem::path()
                                   : (base_dir / std::filesystem::path(path)).lexically_normal();
        if (const json* schema = cr.Child("schema")) {
          ObjectReader s(*schema, "data.csv.schema", p);
          CsvSchema& sc = c.csv->schema;
          s.Str("client_label", sc.client_label);
          s.Str("level_prefix", sc.level_prefix);
          s.Str("latitude", sc.latitude);
          s.Str("longitude", sc.longitude);
          s.Str("ref_date", sc.ref_date);
          s.Str("target", sc.target);
          s.Str("feature_prefix", sc.feature_prefix);
        }
      }
    } else {
      p.invalid.push_back("data is required");
    }
    if (const json* pre = r.Child("preprocessing")) {
      ObjectReader pr(*pre, "preprocessing", p);
      pr.Bool("interpolate", c.preprocessing.interpolate);
      pr.Bool("remove_outliers", c.preprocessing.remove_outliers);
      pr.Double("z_threshold", c.preprocessing.z_threshold);
      pr.Bool("discretize", c.discretize);
      pr.Size("min_rows", c.min_rows);
      pr.Double("train_ratio", c.train_ratio);
    }
    r.Size("n_classes", c.n_classes);
    if (const json* enc = r.Child("encoding")) {
      ObjectReader er(*enc, "encoding", p);
      er.Bool("coordinates", c.encoding.coordinates);
      er.Bool("hierarchy", c.encoding.hierarchy);
    }
    if (const json* topo = r.Child("topology_override")) {
      ObjectReader tr(*topo, "topology_override", p);
      if (topo->is_object()) {
        for (const auto& [group, leaves] : topo->items()) {
          tr.StrList(group, c.topology_override[group]);
        }
      }
    }
    if (const json* tr = r.Child("training")) {
      ObjectReader t(*tr, "training", p);
      t.Size("hidden_dim", c.hidden_dim);
      t.Double("learning_rate", c.training.learning_rate);
      t.Size("epochs", c.training.epochs);
      t.Size("batch_size", c.training.batch_size);
      t.Double("adam_beta1", c.training.adam_beta1);
      t.Double("adam_beta2", c.training.adam_beta2);
      t.Double("adam_epsilon", c.training.adam_epsilon);
    }
    if (const json* ag = r.Child("aggregation")) {
      ObjectReader a(*ag, "aggregation", p);
      std::string mode = std::string(AggregationModeName(c.aggregation.mode));
      a.Str("mode", mode);
      if (mode == "uniform") c.aggregation.mode = AggregationMode::kUniform;
      else if (mode == "sample_weighted") c.aggregation.mode = AggregationMode::kSampleWeighted;
      else p.invalid.push_back("aggregation.mode must be \"uniform\" or \"sample_weighted\"");
      a.Size("rounds", c.aggregation.rounds);
    }
    if (r.Child("baselines")) {
      std::vector<std::string> names;
      r.StrList("baselines", names);
      c.baselines.clear();
      std::set<std::string> seen;
      for (const std::string& n : names) {
        auto kind = ParseBaseline(n);
        if (!kind) p.invalid.push_back("baselines: unknown baseline \"" + n + "\"");
        else if (!seen.insert(n).second) p.invalid.push_back("baselines: \"" + n + "\" listed twice");
        else c.baselines.push_back(*kind);
      }
    }
    if (const json* out = r.Child("output")) {
      ObjectReader o(*out, "output", p);
      std::string dir = c.output_dir.string();
      o.Str("directory", dir);
      c.output_dir = dir;
      if (o.Child("formats")) {
        std::vector<std::string> formats;
        o.StrList("formats", formats);
        c.write_json = c.write_csv = false;
        for (const std::string& f : formats) {
          if (f == "json") c.write_json = true;
          else if (f == "csv") c.write_csv = true;
          else p.invalid.push_back("output.formats: unknown format \"" + f + "\"");
        }
      }
    }
    if (const json* ex = r.Child("execution")) {
      ObjectReader e(*ex, "execution", p);
      e.Size("workers", c.workers);
    }
    r.U64("seed", c.seed);
  }

  // Invariants.
  Check(p, c.n_classes == 2 || c.n_classes == 3, "n_classes must be 2 or 3");
  Check(p, c.csv.has_value() != c.synthetic.has_value(),
        "data must contain exactly one of \"csv\" or \"synthetic\"");
  if (c.synthetic) {
    if (synthetic_classes && *synthetic_classes != c.n_classes) {
      p.invalid.push_back("data.synthetic.n_classes disagrees with n_classes");
    }
    c.synthetic->n_classes = c.n_classes;
    if (c.n_classes == 2 || c.n_classes == 3) {
      CheckThrows(p, [&] { c.synthetic->Validate(); });
    }
  }
  if (c.csv && !c.csv->path.empty()) {
    Check(p, std::filesystem::is_regular_file(c.csv->path),
          "data.csv.path \"" + c.csv->path.string() + "\" does not exist");
  }
  Check(p, c.train_ratio > 0.0 && c.train_ratio < 1.0,
        "preprocessing.train_ratio must be in (0, 1)");
  Check(p, c.min_rows >= 1, "preprocessing.min_rows must be >= 1");
  Check(p, c.preprocessing.z_threshold > 0.0, "preprocessing.z_threshold must be > 0");
  Check(p, c.hidden_dim >= 1, "training.hidden_dim must be >= 1");
  CheckThrows(p, [&] { c.training.Validate(); });
  CheckThrows(p, [&] { c.aggregation.Validate(); });
  Check(p, c.write_json || c.write_csv, "output.formats must name at least one format");

  std::set<std::string> assigned;
  for (const auto& [group, leaves] : c.topology_override) {
    Check(p, !group.empty() && group != kRootId,
          "topology_override: group name \"" + group + "\" is not allowed");
    Check(p, !leaves.empty(), "topology_override: group \"" + group + "\" is empty");
    for (const std::string& leaf : leaves) {
      Check(p, assigned.insert(leaf).second,
            "topology_override: leaf \"" + leaf + "\" assigned to more than one group");
    }
  }

  if (!p.unknown.empty() || !p.invalid.empty()) Raise(p);
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ErrorCode::kConfigValidation,
                      {"cannot read config file " + path.string()});
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

std::string ConfigToJson(const ExperimentConfig& c) {
  json j;
  if (c.synthetic) {
    const SyntheticSpec& s = *c.synthetic;
    j["data"]["synthetic"] = {{"n_regions", s.n_regions},
                              {"clients_per_region", s.clients_per_region},
                              {"rows_per_client", s.rows_per_client},
                              {"n_classes", s.n_classes},
                              {"region_separation", s.region_separation},
                              {"noise_rate", s.noise_rate},
                              {"seed", s.seed}};
  }
  if (c.csv) {
    const CsvSchema& sc = c.csv->schema;
    j["data"]["csv"] = {{"path", c.csv->path.generic_string()},
                        {"schema",
                         {{"client_label", sc.client_label},
                          {"level_prefix", sc.level_prefix},
                          {"latitude", sc.latitude},
                          {"longitude", sc.longitude},
                          {"ref_date", sc.ref_date},
                          {"target", sc.target},
                          {"feature_prefix", sc.feature_prefix}}}};
  }
  j["preprocessing"] = {{"interpolate", c.preprocessing.interpolate},
                        {"remove_outliers", c.preprocessing.remove_outliers},
                        {"z_threshold", c.preprocessing.z_threshold},
                        {"discretize", c.discretize},
                        {"min_rows", c.min_rows},
                        {"train_ratio", c.train_ratio}};
  j["n_classes"] = c.n_classes;
  j["encoding"] = {{"coordinates", c.encoding.coordinates},
                   {"hierarchy", c.encoding.hierarchy}};
  j["topology_override"] = json::object();
  for (const auto& [group, leaves] : c.topology_override) j["topology_override"][group] = leaves;
  j["training"] = {{"hidden_dim", c.hidden_dim},
                   {"learning_rate", c.training.learning_rate},
                   {"epochs", c.training.epochs},
                   {"batch_size", c.training.batch_size},
                   {"adam_beta1", c.training.adam_beta1},
                   {"adam_beta2", c.training.adam_beta2},
                   {"adam_epsilon", c.training.adam_epsilon}};
  j["aggregation"] = {{"mode", AggregationModeName(c.aggregation.mode)},
                      {"rounds", c.aggregation.rounds}};
  j["baselines"] = json::array();
  for (BaselineKind b : c.baselines) j["baselines"].push_back(BaselineName(b));
  std::vector<std::string> formats;
  if (c.write_json) formats.push_back("json");
  if (c.write_csv) formats.push_back("csv");
  j["output"] = {{"formats", formats}};
  j["seed"] = c.seed;
  return j.dump(2);
}

SyntheticSpec ParseSyntheticSpec(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::kConfigValidation, {std::string("malformed JSON: ") + e.what()});
  }
  SyntheticSpec spec;
  Problems p;
  std::optional<size_t> n_classes;
  ReadSynthetic(root, "", spec, n_classes, p);
  if (n_classes) spec.n_classes = *n_classes;
  if (p.unknown.empty()) CheckThrows(p, [&] { spec.Validate(); });
  if (!p.unknown.empty() || !p.invalid.empty()) Raise(p);
  return spec;
}

}  // namespace esfl
