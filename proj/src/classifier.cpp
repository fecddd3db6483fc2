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

#include "scenarios/classifier.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace scenarios {

std::size_t SceneClassifier::class_index(const std::string& name) const {
  auto it = std::find(class_names.begin(), class_names.end(), name);
  if (it == class_names.end()) throw std::invalid_argument("unknown class '" + name + "'");
  return static_cast<std::size_t>(std::distance(class_names.begin(), it));
}

Matrix class_probabilities(const SceneClassifier& clf, const Matrix& h) {
  if (h.rows() != clf.weights.cols())
    throw DimensionError("classifier: encoding length " + std::to_string(h.rows()) +
                         " but model expects " + std::to_string(clf.weights.cols()));
  Matrix logits = clf.weights * h;
  logits.colwise() += clf.bias;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    double top = logits.col(j).maxCoeff();
    logits.col(j) = (logits.col(j).array() - top).exp().matrix();
    logits.col(j) /= logits.col(j).sum();
  }
  return logits;
}

std::vector<std::string> distinct_classes(const std::vector<std::string>& labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() < 2)
    throw std::invalid_argument("classifier: need at least two classes, got " +
                                std::to_string(unique.size()));
  return {unique.begin(), unique.end()};
}

std::vector<std::size_t> label_indices(const SceneClassifier& clf,
                                       const std::vector<std::string>& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(clf.class_index(l));
  return out;
}

ClassifierObjective classifier_objective(const SceneClassifier& clf, const Matrix& h,
                                         const std::vector<std::size_t>& labels, double l2) {
  if (static_cast<Eigen::Index>(labels.size()) != h.cols())
    throw DimensionError("classifier: labels do not align with encodings");
  Matrix probs = class_probabilities(clf, h);
  const double n = static_cast<double>(std::max<std::size_t>(labels.size(), 1));
  ClassifierObjective out;
  Matrix delta = probs;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const auto y = static_cast<Eigen::Index>(labels[j]);
    out.loss -= std::log(std::max(probs(y, col), 1e-300));
    delta(y, col) -= 1.0;
  }
  out.loss = out.loss / n + l2 * clf.weights.squaredNorm();
  out.grad_weights = delta * h.transpose() / n + 2.0 * l2 * clf.weights;
  out.grad_bias = delta.rowwise().sum() / n;
  return out;
}

SceneClassifier fit(const Matrix& h, const std::vector<std::string>& labels,
                    const FitOptions& options, std::vector<double>* loss_history) {
  if (static_cast<Eigen::Index>(labels.size()) != h.cols())
    throw DimensionError("fit: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(h.cols()) + " encodings");
  SceneClassifier clf;
  clf.class_names = distinct_classes(labels);
  const auto classes = static_cast<Eigen::Index>(clf.class_names.size());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 0.01);
  clf.weights.resize(classes, h.rows());
  for (Eigen::Index i = 0; i < classes; ++i)
    for (Eigen::Index j = 0; j < h.rows(); ++j) clf.weights(i, j) = normal(rng);
  clf.bias = Vector::Zero(classes);

  const auto y = label_indices(clf, labels);
  auto current = classifier_objective(clf, h, y, options.l2);
  double lr = options.lr;
  for (std::size_t it = 0; it < options.iters; ++it) {
    bool accepted = false;
    bool first = true;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      SceneClassifier trial = clf;
      trial.weights -= lr * current.grad_weights;
      trial.bias -= lr * current.grad_bias;
      auto next = classifier_objective(trial, h, y, options.l2);
      if (next.loss <= current.loss) {
        clf = std::move(trial);
        current = std::move(next);
        accepted = true;
        if (first) lr *= 2.0;
      } else {
        lr *= 0.5;
        first = false;
      }
    }
    if (loss_history) loss_history->push_back(current.loss);
    if (!accepted) break;
  }
  return clf;
}

Prediction predict(const SceneClassifier& clf, const Vector& h_col) {
  Matrix col = h_col;
  Matrix probs = class_probabilities(clf, col);
  Prediction p;
  p.probabilities = probs.col(0);
  // maxCoeff returns the first maximal entry.
  Eigen::Index best = 0;
  p.probabilities.maxCoeff(&best);
  p.class_index = static_cast<std::size_t>(best);
  p.class_name = clf.class_names[p.class_index];
  return p;
}

std::vector<std::string> predict_labels(const SceneClassifier& clf, const Matrix& h) {
  Matrix probs = class_probabilities(clf, h);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    Eigen::Index best = 0;
    probs.col(j).maxCoeff(&best);
    out.push_back(clf.class_names[static_cast<std::size_t>(best)]);
  }
  return out;
}

double influence(const SceneClassifier& clf, const std::string& class_name,
                 std::size_t scenario) {
  auto row = clf.class_index(class_name);
  if (scenario >= static_cast<std::size_t>(clf.weights.cols()))
    throw std::out_of_range("influence: scenario " + std::to_string(scenario) +
                            " out of range");
  return clf.weights(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(scenario));
}

Explanation explain(const SceneClassifier& clf, const ScenarioModel& model, const Vector& h_col,
                    std::size_t top_n, double membership_threshold) {
  const auto k = static_cast<std::size_t>(h_col.size());
  if (k != model.k()) throw DimensionError("explain: encoding length does not match dictionary");
  top_n = std::min(top_n, k);
  auto pred = predict(clf, h_col);

  Explanation e;
  e.predicted_class = pred.class_name;
  e.class_probabilities = pred.probabilities;

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return h_col(static_cast<Eigen::Index>(x)) > h_col(static_cast<Eigen::Index>(y));
  });
  for (std::size_t r = 0; r < top_n; ++r) {
    const auto s = static_cast<Eigen::Index>(order[r]);
    ScenarioContribution c;
    c.scenario_index = order[r];
    c.encoding_coefficient = h_col(s);
    c.influence_score = clf.weights(static_cast<Eigen::Index>(pred.class_index), s);
    for (Eigen::Index i = 0; i < model.dictionary.rows(); ++i) {
      double wij = model.dictionary(i, s);
      if (wij > membership_threshold) c.members.push_back({model.object_names[i], wij});
    }
    std::stable_sort(c.members.begin(), c.members.end(),
                     [](const MemberObject& x, const MemberObject& y) {
                       return x.importance > y.importance;
                     });
    e.top_scenarios.push_back(std::move(c));
  }
  return e;
}

std::string render_explanation(const Explanation& e) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  double p = e.class_probabilities.size() ? e.class_probabilities.maxCoeff() : 0.0;
  out << "predicted class: " << e.predicted_class << " (p = " << p << ")\n";
  for (std::size_t r = 0; r < e.top_scenarios.size(); ++r) {
    const auto& c = e.top_scenarios[r];
    out << "  #" << r + 1 << " scenario " << c.scenario_index
        << "  encoding " << c.encoding_coefficient << "  influence " << c.influence_score << '\n';
    for (const auto& m : c.members) out << "      " << m.name << "  " << m.importance << '\n';
  }
  return out.str();
}

}  // namespace scenarios
