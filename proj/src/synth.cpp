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


#include "scenarios/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace scenarios {

namespace {

std::string padded(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

std::vector<std::vector<std::size_t>> draw_supports(const SynthSpec& spec, std::mt19937_64& rng) {
  std::vector<std::size_t> pool;
  auto refill = [&] {
    std::vector<std::size_t> fresh(spec.n_objects);
    std::iota(fresh.begin(), fresh.end(), 0);
    std::shuffle(fresh.begin(), fresh.end(), rng);
    // Leftovers are consumed first.
    fresh.erase(std::remove_if(fresh.begin(), fresh.end(),
                               [&](std::size_t o) {
                                 return std::find(pool.begin(), pool.end(), o) != pool.end();
                               }),
                fresh.end());
    pool.insert(pool.begin(), fresh.begin(), fresh.end());
  };
  std::vector<std::vector<std::size_t>> supports;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t s = 0; s < spec.n_scenarios; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      std::vector<std::size_t> support;
      while (support.size() < spec.objects_per_scenario) {
        if (pool.empty()) refill();
        auto o = pool.back();
        pool.pop_back();
        if (std::find(support.begin(), support.end(), o) == support.end()) {
          support.push_back(o);
        } else {
          pool.insert(pool.begin(), o);
        }
      }
      std::sort(support.begin(), support.end());
      placed = seen.insert(support).second;
      if (placed) supports.push_back(std::move(support));
    }
    if (!placed) throw std::invalid_argument("synth: could not draw distinct scenario supports");
  }
  return supports;
}

}  // namespace

std::size_t SynthSpec::pool_size() const {
  if (scenarios_per_class > 0) return scenarios_per_class;
  return std::max(scenarios_per_instance, n_classes == 0 ? n_scenarios : n_scenarios / n_classes);
}

void SynthSpec::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0 && p < 0.5))
      throw std::invalid_argument(std::string("synth: ") + name + " must lie in [0, 0.5)");
  };
  prob(flip_noise, "flip_noise");
  prob(missing_object_rate, "missing_object_rate");
  if (n_objects == 0 || n_scenarios == 0 || objects_per_scenario == 0 ||
      scenarios_per_instance == 0 || n_instances == 0 || n_classes == 0)
    throw std::invalid_argument("synth: counts must be positive");
  if (objects_per_scenario > n_objects)
    throw std::invalid_argument("synth: objects_per_scenario exceeds n_objects");
  if (pool_size() < scenarios_per_instance || pool_size() > n_scenarios)
    throw std::invalid_argument("synth: class scenario pool must hold between "
                                "scenarios_per_instance and n_scenarios scenarios");
  if (n_instances < n_classes) throw std::invalid_argument("synth: fewer instances than classes");
  if (!(feature_noise >= 0)) throw std::invalid_argument("synth: feature_noise must be >= 0");
  // Enough distinct supports must exist.
  double combos = 1;
  for (std::size_t i = 0; i < objects_per_scenario && combos < 1e18; ++i)
    combos = combos * static_cast<double>(n_objects - i) / static_cast<double>(i + 1);
  if (combos < static_cast<double>(n_scenarios))
    throw std::invalid_argument("synth: not enough distinct supports for n_scenarios");
}

SynthData synth(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  SynthData d;
  const auto m = static_cast<Eigen::Index>(spec.n_objects);
  const auto k = static_cast<Eigen::Index>(spec.n_scenarios);
  const auto n = static_cast<Eigen::Index>(spec.n_instances);

  for (std::size_t i = 0; i < spec.n_objects; ++i) d.object_names.push_back(padded("obj_", i, 3));
  for (std::size_t c = 0; c < spec.n_classes; ++c) d.class_names.push_back("class_" + std::to_string(c));

  auto supports = draw_supports(spec, rng);
  d.w_true = Matrix::Zero(m, k);
  for (std::size_t s = 0; s < supports.size(); ++s)
    for (auto o : supports[s]) d.w_true(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(s)) = 1.0;

  const std::size_t spc = spec.pool_size();
  const bool disjoint = spec.n_classes * spc <= spec.n_scenarios;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    std::vector<std::size_t> pool;
    const std::size_t start = disjoint ? c * spc : c * spec.n_scenarios / spec.n_classes;
    for (std::size_t i = 0; i < spc; ++i) pool.push_back((start + i) % spec.n_scenarios);
    d.class_scenarios.push_back(std::move(pool));
  }

  std::bernoulli_distribution drop(spec.missing_object_rate);
  std::bernoulli_distribution flip(spec.flip_noise);
  std::normal_distribution<double> noise(0.0, spec.feature_noise);
  d.h_true = Matrix::Zero(k, n);
  for (std::size_t j = 0; j < spec.n_instances; ++j) {
    const std::size_t c = j % spec.n_classes;
    auto pool = d.class_scenarios[c];
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<bool> present(spec.n_objects, false);
    for (std::size_t a = 0; a < spec.scenarios_per_instance; ++a) {
      d.h_true(static_cast<Eigen::Index>(pool[a]), static_cast<Eigen::Index>(j)) = 1.0;
      for (auto o : supports[pool[a]]) present[o] = true;
    }
    AnnotatedInstance inst;
    inst.id = padded("inst_", j, 5);
    inst.scene_class = d.class_names[c];
    std::vector<std::string> objs;
    std::vector<double> feats(spec.n_objects, 0.0);
    for (std::size_t o = 0; o < spec.n_objects; ++o) {
      bool on = present[o] ? !drop(rng) : flip(rng);
      if (on) {
        objs.push_back(d.object_names[o]);
        feats[o] = 1.0;
      }
    }
    if (spec.feature_noise > 0)
      for (auto& f : feats) f += noise(rng);
    inst.objects = std::move(objs);
    inst.features = std::move(feats);
    d.instances.push_back(std::move(inst));
  }
  return d;
}

ObjectSceneMatrix SynthData::objects() const {
  ObjectSceneMatrix a;
  a.object_names = object_names;
  a.matrix = Matrix::Zero(static_cast<Eigen::Index>(object_names.size()),
                          static_cast<Eigen::Index>(instances.size()));
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < object_names.size(); ++i)
    index.emplace(object_names[i], static_cast<Eigen::Index>(i));
  for (std::size_t j = 0; j < instances.size(); ++j) {
    a.instance_ids.push_back(instances[j].id);
    for (const auto& o : *instances[j].objects) a.matrix(index.at(o), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return a;
}

FeatureMatrix SynthData::features() const {
  FeatureMatrix x;
  const auto dim = static_cast<Eigen::Index>(object_names.size());
  x.matrix.resize(dim, static_cast<Eigen::Index>(instances.size()));
  for (std::size_t j = 0; j < instances.size(); ++j) {
    x.instance_ids.push_back(instances[j].id);
    for (Eigen::Index f = 0; f < dim; ++f)
      x.matrix(f, static_cast<Eigen::Index>(j)) = (*instances[j].features)[static_cast<std::size_t>(f)];
  }
  return x;
}

std::vector<std::string> SynthData::labels() const {
  std::vector<std::string> out;
  for (const auto& inst : instances) out.push_back(inst.scene_class);
  return out;
}

void write_synth(const SynthData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_instances_jsonl(dir + "/dataset.jsonl", data.instances);
  nlohmann::json gt;
  gt["object_names"] = data.object_names;
  gt["class_names"] = data.class_names;
  gt["class_scenarios"] = data.class_scenarios;
  std::vector<std::vector<std::string>> supports;
  for (Eigen::Index s = 0; s < data.w_true.cols(); ++s) {
    std::vector<std::string> support;
    for (Eigen::Index o = 0; o < data.w_true.rows(); ++o)
      if (data.w_true(o, s) > 0.5) support.push_back(data.object_names[static_cast<std::size_t>(o)]);
    supports.push_back(std::move(support));
  }
  gt["scenarios"] = supports;
  nlohmann::json active = nlohmann::json::object();
  for (std::size_t j = 0; j < data.instances.size(); ++j) {
    std::vector<std::size_t> on;
    for (Eigen::Index s = 0; s < data.h_true.rows(); ++s)
      if (data.h_true(s, static_cast<Eigen::Index>(j)) > 0.5) on.push_back(static_cast<std::size_t>(s));
    active[data.instances[j].id] = on;
  }
  gt["active_scenarios"] = active;
  std::ofstream out(dir + "/ground_truth.json");
  if (!out) throw std::runtime_error("cannot write " + dir + "/ground_truth.json");
  out << gt.dump(2) << '\n';
}

}  // namespace scenarios
