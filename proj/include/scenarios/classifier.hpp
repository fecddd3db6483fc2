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

// Multinomial logistic regression on scenario encodings. The weight linking a
// scenario to a class is that scenario's influence score for the class.

#pragma once

#include "scenarios/matrix.hpp"
#include "scenarios/pbmf.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace scenarios {

struct SceneClassifier {
  Matrix weights;  // classes x k
  Vector bias;     // classes
  std::vector<std::string> class_names;

  std::size_t classes() const { return class_names.size(); }
  std::size_t class_index(const std::string& name) const;  // throws if unknown
};

struct FitOptions {
  double l2 = 1e-4;
  std::size_t iters = 500;
  double lr = 1.0;
  std::uint64_t seed = 0;
};

// Softmax probabilities for every column of h (classes x instances).
Matrix class_probabilities(const SceneClassifier& clf, const Matrix& h);

// Sorted distinct labels; throws unless there are at least two.
std::vector<std::string> distinct_classes(const std::vector<std::string>& labels);
std::vector<std::size_t> label_indices(const SceneClassifier& clf,
                                       const std::vector<std::string>& labels);

struct ClassifierObjective {
  double loss = 0;  // mean cross-entropy + l2 ||V||_F^2
  Matrix grad_weights;
  Vector grad_bias;
};

ClassifierObjective classifier_objective(const SceneClassifier& clf, const Matrix& h,
                                         const std::vector<std::size_t>& labels, double l2);

// Gradient descent with backtracking on the mean cross-entropy plus l2 ||V||^2.
SceneClassifier fit(const Matrix& h, const std::vector<std::string>& labels,
                    const FitOptions& options = {}, std::vector<double>* loss_history = nullptr);

struct Prediction {
  std::size_t class_index = 0;
  std::string class_name;
  Vector probabilities;
};

// Ties go to the lowest class index.
Prediction predict(const SceneClassifier& clf, const Vector& h_col);
std::vector<std::string> predict_labels(const SceneClassifier& clf, const Matrix& h);

double influence(const SceneClassifier& clf, const std::string& class_name,
                 std::size_t scenario);

struct MemberObject {
  std::string name;
  double importance;  // W_ij
};

struct ScenarioContribution {
  std::size_t scenario_index;
  double encoding_coefficient;
  double influence_score;  // for the predicted class
  std::vector<MemberObject> members;
};

struct Explanation {
  std::string predicted_class;
  Vector class_probabilities;
  std::vector<ScenarioContribution> top_scenarios;
};

inline constexpr double kDefaultMembershipThreshold = 0.2;

// Top scenarios by encoding coefficient, each with its influence on the
// predicted class and member objects (W_ij above threshold, descending).
Explanation explain(const SceneClassifier& clf, const ScenarioModel& model, const Vector& h_col,
                    std::size_t top_n, double membership_threshold = kDefaultMembershipThreshold);

std::string render_explanation(const Explanation& e);

}  // namespace scenarios
