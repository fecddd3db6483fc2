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

// Dataset ingestion: JSON-lines instances, stratified train/test split and
// vocabulary filtering by training frequency.
//
// One instance per line:
//   {"id": "...", "scene_class": "...", "objects": ["sink", ...], "features": [0.1, ...]}
// "objects" may be omitted for instances without object annotations; those
// only take part in classifier training. "features" is optional.

#pragma once

#include "scenarios/head.hpp"
#include "scenarios/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scenarios {

struct AnnotatedInstance {
  std::string id;
  std::string scene_class;
  std::optional<std::vector<std::string>> objects;
  std::optional<std::vector<double>> features;
};

std::vector<AnnotatedInstance> read_instances_jsonl(std::istream& in);
std::vector<AnnotatedInstance> read_instances_jsonl(const std::string& path);
void write_instances_jsonl(std::ostream& out, const std::vector<AnnotatedInstance>& instances);
void write_instances_jsonl(const std::string& path,
                           const std::vector<AnnotatedInstance>& instances);

// Feature CSV: header "id,f0,f1,...", one row per instance.
FeatureMatrix read_features_csv(const std::string& path);
void write_features_csv(const std::string& path, const FeatureMatrix& x);

struct DatasetConfig {
  double min_object_frequency = 0.01;
  std::uint64_t split_seed = 0;
  // Per-class counts; test_per_class = 0 falls back to test_fraction and
  // train_per_class = 0 keeps every remaining instance.
  std::size_t train_per_class = 0;
  std::size_t test_per_class = 0;
  double test_fraction = 0.2;

  void validate() const;
};

struct DatasetSplit {
  std::vector<std::string> ids;     // every instance, file order
  std::vector<std::string> labels;  // aligned with ids
  FeatureMatrix features;           // aligned with ids
  // Annotated instances only, with their labels.
  ObjectSceneMatrix objects;
  std::vector<std::string> object_labels;

  // Feature columns of the annotated instances.
  FeatureMatrix annotated_features() const;
};

struct Dataset {
  DatasetSplit train;
  DatasetSplit test;
  std::vector<std::string> vocabulary;
  std::vector<std::string> warnings;
  bool features_from_objects = false;
};

Dataset split_dataset(const std::vector<AnnotatedInstance>& instances, const DatasetConfig& cfg,
                      const std::optional<FeatureMatrix>& external_features = std::nullopt);

Dataset load_dataset(const std::string& path, const DatasetConfig& cfg,
                     const std::string& features_csv = "");

}  // namespace scenarios
