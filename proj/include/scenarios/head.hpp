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

// Scenario head: an affine map followed by a sigmoid that predicts encodings
// from per-instance feature vectors, trained against the PBMF loss while the
// dictionary is periodically refined from mini-batch gradients.

#pragma once

#include "scenarios/classifier.hpp"
#include "scenarios/matrix.hpp"
#include "scenarios/pbmf.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace scenarios {

struct FeatureMatrix {
  Matrix matrix;  // feature_dim x instances
  std::vector<std::string> instance_ids;
};

struct ScenarioHead {
  Matrix weights;  // k x feature_dim
  Vector bias;     // k

  std::size_t k() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(weights.cols()); }
};

// What the head is fitted to during train_head.
enum class HeadTarget {
  kPbmfLoss,    // reconstruction of A through the dictionary (default)
  kRegression,  // squared error against given encodings; dictionary fixed
};

// Dictionary update period meaning "never".
inline constexpr std::size_t kNoDictionaryUpdates = std::numeric_limits<std::size_t>::max();

struct TrainSchedule {
  // Learning rates scale the per-instance mean gradient of a mini-batch.
  double head_lr = 2.0;
  // A dictionary step follows every this many mini-batch iterations.
  std::size_t dict_update_period = 4;
  double dict_lr = 0.05;
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  double lambda_ce = 1.0;
  std::uint64_t seed = 0;
  HeadTarget target = HeadTarget::kPbmfLoss;

  void validate() const;
};

ScenarioHead init_head(std::size_t k, std::size_t feature_dim, std::uint64_t seed);

// sigmoid(weights * x + bias) for every column.
Matrix head_encode(const ScenarioHead& head, const Matrix& x);
EncodingMatrix head_forward(const ScenarioHead& head, const FeatureMatrix& x);

struct HeadGradients {
  double loss = 0;
  Matrix weights;
  Vector bias;
};

// PBMF objective of (A, W, head(x)) and its gradient w.r.t. the head
// parameters. The loss includes the dictionary penalties so that on the full
// data it equals pbmf_loss.
HeadGradients head_objective(const Matrix& a, const Matrix& x, const Matrix& w,
                             const ScenarioHead& head, const Matrix& omega,
                             const PbmfConfig& cfg);

struct JointGradients {
  double loss = 0;  // pbmf + lambda_ce * summed cross-entropy
  double pbmf = 0;
  double cross_entropy = 0;
  Matrix head_weights;
  Vector head_bias;
  Matrix clf_weights;
  Vector clf_bias;
};

JointGradients joint_objective(const Matrix& a, const Matrix& x,
                               const std::vector<std::size_t>& labels, const Matrix& w,
                               const ScenarioHead& head, const SceneClassifier& clf,
                               const Matrix& omega, const PbmfConfig& cfg, double lambda_ce);

// Full-data W gradient assembled from column batches of `batch_size`; the
// encodings of each batch are computed on the fly and discarded.
Matrix batched_dictionary_gradient(const Matrix& a, const Matrix& x, const Matrix& w,
                                   const ScenarioHead& head, const Matrix& omega,
                                   const PbmfConfig& cfg, std::size_t batch_size);

struct HeadTraining {
  ScenarioHead head;
  ScenarioModel model;
  std::vector<double> loss_history;  // one entry per accepted epoch
};

// Mini-batch gradient descent on the head with a projected W step every
// dict_update_period iterations. `start` defaults to a small random head;
// `target_h` is required for HeadTarget::kRegression.
HeadTraining train_head(const ObjectSceneMatrix& a, const FeatureMatrix& x,
                        const ScenarioModel& model, const TrainSchedule& sched,
                        const ScenarioHead* start = nullptr, const Matrix* target_h = nullptr,
                        const IterateObserver& observer = {});

struct JointTraining {
  ScenarioHead head;
  ScenarioModel model;
  SceneClassifier classifier;
  std::vector<double> loss_history;
};

JointTraining joint_finetune(const ObjectSceneMatrix& a, const FeatureMatrix& x,
                             const std::vector<std::string>& labels, const ScenarioModel& model,
                             const ScenarioHead& head, const SceneClassifier& classifier,
                             const TrainSchedule& sched, const IterateObserver& observer = {});

}  // namespace scenarios
