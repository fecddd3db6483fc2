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


// End-to-end training: dictionary, head, classifier on frozen encodings,
// joint fine-tuning, then indexing and evaluation on the held-out split.

#pragma once

#include "scenarios/classifier.hpp"
#include "scenarios/dataset.hpp"
#include "scenarios/head.hpp"
#include "scenarios/pbmf.hpp"
#include "scenarios/retrieval.hpp"
#include "scenarios/serialize.hpp"
#include "scenarios/settings.hpp"

#include <stdexcept>
#include <string>

namespace scenarios {

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string phase, const std::string& what)
      : std::runtime_error("phase '" + phase + "' failed: " + what), phase_(std::move(phase)) {}
  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

struct PipelineResult {
  Json report;
  Dataset dataset;
  ScenarioModel model;
  ScenarioHead head;
  SceneClassifier classifier;
  ContentIndex index;                 // every test instance
  double phase3_accuracy = 0;         // classifier on frozen encodings
  double final_accuracy = 0;          // after joint fine-tuning
  std::vector<double> factorize_history;
  std::vector<double> head_history;
  std::vector<double> classifier_history;
  std::vector<double> joint_history;
};

// Artifacts go to the "out_dir" setting when it is set.
// `observer` sees every (W, H) iterate of the factorization and head phases.
PipelineResult run_pipeline(const Settings& settings, const Dataset& dataset,
                            const IterateObserver& observer = {});
PipelineResult run_pipeline(const Settings& settings);
PipelineResult run_pipeline(const std::string& config_file);

}  // namespace scenarios
