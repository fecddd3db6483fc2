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


// Planted-scenario generator: binary scenario supports, per-class scenario
// pools, instances formed as unions of active supports plus noise.

#pragma once

#include "scenarios/dataset.hpp"
#include "scenarios/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace scenarios {

struct SynthSpec {
  std::size_t n_objects = 60;
  std::size_t n_scenarios = 10;
  std::size_t objects_per_scenario = 6;
  std::size_t scenarios_per_instance = 2;
  std::size_t n_instances = 2000;
  double flip_noise = 0.01;
  double missing_object_rate = 0.1;
  std::size_t n_classes = 1;
  std::uint64_t seed = 0;
  // Size of each class's scenario pool; 0 splits the scenarios evenly.
  std::size_t scenarios_per_class = 0;
  // Standard deviation of Gaussian noise added to the feature vectors.
  double feature_noise = 0.0;

  void validate() const;  // throws std::invalid_argument
  std::size_t pool_size() const;
};

struct SynthData {
  std::vector<AnnotatedInstance> instances;
  Matrix w_true;  // objects x scenarios, binary
  Matrix h_true;  // scenarios x instances, binary
  std::vector<std::vector<std::size_t>> class_scenarios;
  std::vector<std::string> object_names;
  std::vector<std::string> class_names;

  ObjectSceneMatrix objects() const;  // every object, every instance
  FeatureMatrix features() const;
  std::vector<std::string> labels() const;
};

SynthData synth(const SynthSpec& spec);

// Writes dataset.jsonl and ground_truth.json into `dir`.
void write_synth(const SynthData& data, const std::string& dir);

}  // namespace scenarios
