// Copyright 2026 The Scenarios Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "scenarios/settings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace scenarios {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("setting '" + key + "': expected a non-negative integer, got '" +
                                text + "'");
  return value;
}

}  // namespace

const std::vector<SettingInfo>& known_settings() {
  static const std::vector<SettingInfo> table = {
      {"dataset", "JSON-lines dataset path"},
      {"features_csv", "optional feature CSV keyed by id"},
      {"out_dir", "directory for pipeline artifacts"},
      {"min_object_frequency", "vocabulary threshold as a fraction of training instances"},
      {"split_seed", "seed of the stratified split"},
      {"train_per_class", "training instances per class (0 keeps all)"},
      {"test_per_class", "test instances per class (0 uses test_fraction)"},
      {"test_fraction", "held-out fraction per class"},
      {"k", "number of scenarios"},
      {"alpha1", "orthogonality weight"},
      {"alpha2", "L1 weight on the dictionary"},
      {"alpha3", "L1 weight on the encodings"},
      {"use_weights", "weight present rare objects (true/false)"},
      {"weight_scheme", "object_idf or dataset_ratio"},
      {"max_outer_iters", "outer iterations of the factorization"},
      {"inner_steps", "projected steps per factor per outer iteration"},
      {"step_size", "initial step size"},
      {"backtrack_factor", "step shrink factor on a failed step"},
      {"tol", "relative loss change that stops the factorization"},
      {"seed", "master seed"},
      {"init_iters", "NMF iterations of the initializer"},
      {"restarts", "factorization restarts, best kept"},
      {"head_lr", "head learning rate"},
      {"dict_update_period", "mini-batch iterations between dictionary steps (0 disables)"},
      {"dict_lr", "dictionary learning rate"},
      {"epochs", "head training epochs"},
      {"batch_size", "mini-batch size"},
      {"lambda_ce", "cross-entropy weight in the joint phase"},
      {"joint_epochs", "joint fine-tuning epochs"},
      {"joint_head_lr", "head learning rate in the joint phase"},
      {"joint_dict_lr", "dictionary learning rate in the joint phase"},
      {"clf_l2", "classifier L2 weight"},
      {"clf_iters", "classifier gradient iterations"},
      {"clf_lr", "classifier initial step size"},
      {"scenario_theta", "encoding threshold for scenario terms"},
      {"object_theta", "score threshold for object terms"},
      {"n_queries", "generated retrieval queries"},
      {"query_seed", "seed of query generation"},
      {"ndcg_k", "cutoff of NDCG"},
      {"n_objects", "synth: objects"},
      {"n_scenarios", "synth: planted scenarios"},
      {"objects_per_scenario", "synth: support size"},
      {"scenarios_per_instance", "synth: active scenarios per instance"},
      {"n_instances", "synth: instances"},
      {"flip_noise", "synth: probability an absent object appears"},
      {"missing_object_rate", "synth: probability a present object is dropped"},
      {"n_classes", "synth: scene classes"},
      {"scenarios_per_class", "synth: scenario pool per class (0 splits evenly)"},
      {"feature_noise", "synth: Gaussian feature noise"},
  };
  return table;
}

Settings Settings::parse(std::istream& in) {
  Settings s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      s.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return s;
}

Settings Settings::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse(in);
}

void Settings::set(const std::string& key, const std::string& value) {
  const auto& table = known_settings();
  if (std::none_of(table.begin(), table.end(), [&](const SettingInfo& i) { return i.key == key; }))
    throw std::invalid_argument("unknown setting '" + key + "'");
  values_[key] = value;
}

bool Settings::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Settings::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Settings::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_double(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("setting '" + key + "': expected a number, got '" + it->second + "'");
  }
}

std::size_t Settings::get_size(const std::string& key, std::size_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_integer<std::size_t>(key, it->second);
}

std::uint64_t Settings::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_integer<std::uint64_t>(key, it->second);
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("setting '" + key + "': expected true or false, got '" + it->second + "'");
}

PbmfConfig pbmf_config(const Settings& s) {
  PbmfConfig c;
  c.k = s.get_size("k", c.k);
  c.alpha1 = s.get_double("alpha1", c.alpha1);
  c.alpha2 = s.get_double("alpha2", c.alpha2);
  c.alpha3 = s.get_double("alpha3", c.alpha3);
  c.use_weights = s.get_bool("use_weights", c.use_weights);
  c.weight_scheme = parse_weight_scheme(s.get_string("weight_scheme", to_string(c.weight_scheme)));
  c.max_outer_iters = s.get_size("max_outer_iters", c.max_outer_iters);
  c.inner_steps = s.get_size("inner_steps", c.inner_steps);
  c.step_size = s.get_double("step_size", c.step_size);
  c.backtrack_factor = s.get_double("backtrack_factor", c.backtrack_factor);
  c.tol = s.get_double("tol", c.tol);
  c.seed = s.get_u64("seed", c.seed);
  c.init_iters = s.get_size("init_iters", c.init_iters);
  c.validate();
  return c;
}

TrainSchedule train_schedule(const Settings& s) {
  TrainSchedule t;
  t.head_lr = s.get_double("head_lr", t.head_lr);
  const auto period = s.get_size("dict_update_period", t.dict_update_period);
  t.dict_update_period = period == 0 ? kNoDictionaryUpdates : period;
  t.dict_lr = s.get_double("dict_lr", t.dict_lr);
  t.epochs = s.get_size("epochs", t.epochs);
  t.batch_size = s.get_size("batch_size", t.batch_size);
  t.lambda_ce = s.get_double("lambda_ce", t.lambda_ce);
  t.seed = s.get_u64("seed", t.seed);
  t.validate();
  return t;
}

TrainSchedule joint_schedule(const Settings& s) {
  TrainSchedule t = train_schedule(s);
  t.epochs = s.get_size("joint_epochs", 10);
  t.head_lr = s.get_double("joint_head_lr", t.head_lr);
  t.dict_lr = s.get_double("joint_dict_lr", t.dict_lr);
  t.seed = t.seed + 1;
  t.validate();
  return t;
}

FitOptions fit_options(const Settings& s) {
  FitOptions f;
  f.l2 = s.get_double("clf_l2", f.l2);
  f.iters = s.get_size("clf_iters", f.iters);
  f.lr = s.get_double("clf_lr", f.lr);
  f.seed = s.get_u64("seed", f.seed);
  return f;
}

DatasetConfig dataset_config(const Settings& s) {
  DatasetConfig d;
  d.min_object_frequency = s.get_double("min_object_frequency", d.min_object_frequency);
  d.split_seed = s.get_u64("split_seed", d.split_seed);
  d.train_per_class = s.get_size("train_per_class", d.train_per_class);
  d.test_per_class = s.get_size("test_per_class", d.test_per_class);
  d.test_fraction = s.get_double("test_fraction", d.test_fraction);
  d.validate();
  return d;
}

SynthSpec synth_spec(const Settings& s) {
  SynthSpec p;
  p.n_objects = s.get_size("n_objects", p.n_objects);
  p.n_scenarios = s.get_size("n_scenarios", p.n_scenarios);
  p.objects_per_scenario = s.get_size("objects_per_scenario", p.objects_per_scenario);
  p.scenarios_per_instance = s.get_size("scenarios_per_instance", p.scenarios_per_instance);
  p.n_instances = s.get_size("n_instances", p.n_instances);
  p.flip_noise = s.get_double("flip_noise", p.flip_noise);
  p.missing_object_rate = s.get_double("missing_object_rate", p.missing_object_rate);
  p.n_classes = s.get_size("n_classes", p.n_classes);
  p.scenarios_per_class = s.get_size("scenarios_per_class", p.scenarios_per_class);
  p.feature_noise = s.get_double("feature_noise", p.feature_noise);
  p.seed = s.get_u64("seed", p.seed);
  p.validate();
  return p;
}

IndexThresholds index_thresholds(const Settings& s) {
  IndexThresholds t;
  t.scenario_theta = s.get_double("scenario_theta", t.scenario_theta);
  t.object_theta = s.get_double("object_theta", t.object_theta);
  return t;
}

}  // namespace scenarios
