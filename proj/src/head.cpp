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

#include "scenarios/head.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace scenarios {

namespace {

constexpr std::size_t kMaxEpochRetries = 20;
constexpr std::size_t kEvalBatch = 512;

using Columns = std::vector<Eigen::Index>;

Matrix gather(const Matrix& m, const Columns& cols) { return m(Eigen::all, cols); }

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Everything the loss kernel needs for one set of columns.
struct Batch {
  Matrix a;
  Matrix x;
  Matrix omega;
  Matrix target;  // regression mode only
  std::vector<std::size_t> labels;
};

struct Objective {
  const Matrix& a;
  const Matrix& x;
  const Matrix& omega;
  const PbmfConfig& cfg;
  const std::vector<std::size_t>* labels = nullptr;  // joint mode
  double lambda_ce = 0;
  const Matrix* target = nullptr;  // regression mode

  Eigen::Index instances() const { return a.cols(); }

  Batch batch(const Columns& cols) const {
    Batch b{gather(a, cols), gather(x, cols), gather(omega, cols), Matrix(), {}};
    if (target) b.target = gather(*target, cols);
    if (labels)
      for (auto c : cols) b.labels.push_back((*labels)[static_cast<std::size_t>(c)]);
    return b;
  }
};

// Loss and gradients over one batch; excludes the dictionary-only penalty.
JointGradients batch_kernel(const Batch& b, const Matrix& w, const ScenarioHead& head,
                            const SceneClassifier* clf, const PbmfConfig& cfg, double lambda_ce,
                            bool regression) {
  JointGradients g;
  Matrix h = head_encode(head, b.x);
  Matrix dh;
  if (regression) {
    Matrix diff = h - b.target;
    g.pbmf = diff.squaredNorm();
    dh = 2.0 * diff;
  } else {
    Matrix r = weighted_residual(b.a, w, h, b.omega);
    g.pbmf = reconstruction_loss(b.a, w, h, b.omega) + cfg.alpha3 * h.sum();
    dh = -2.0 * w.transpose() * r;
    dh.array() += cfg.alpha3;
  }
  g.loss = g.pbmf;
  if (clf) {
    Matrix probs = class_probabilities(*clf, h);
    Matrix delta = probs;
    for (std::size_t j = 0; j < b.labels.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      const auto y = static_cast<Eigen::Index>(b.labels[j]);
      g.cross_entropy -= std::log(std::max(probs(y, col), 1e-300));
      delta(y, col) -= 1.0;
    }
    g.loss += lambda_ce * g.cross_entropy;
    dh += lambda_ce * clf->weights.transpose() * delta;
    g.clf_weights = lambda_ce * delta * h.transpose();
    g.clf_bias = lambda_ce * delta.rowwise().sum();
  }
  Matrix dz = dh.cwiseProduct(h.cwiseProduct((1.0 - h.array()).matrix()));
  g.head_weights = dz * b.x.transpose();
  g.head_bias = dz.rowwise().sum();
  return g;
}

std::vector<Columns> make_batches(Eigen::Index n, std::size_t batch_size,
                                  std::mt19937_64* rng) {
  Columns order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (rng) std::shuffle(order.begin(), order.end(), *rng);
  std::vector<Columns> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    auto end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

struct Params {
  ScenarioHead head;
  Matrix w;
  SceneClassifier clf;
};

double full_loss(const Objective& obj, const Params& p, bool regression) {
  const SceneClassifier* clf = obj.labels ? &p.clf : nullptr;
  double total = 0;
  for (const auto& cols : make_batches(obj.instances(), kEvalBatch, nullptr))
    total += batch_kernel(obj.batch(cols), p.w, p.head, clf, obj.cfg, obj.lambda_ce, regression)
                 .loss;
  if (!regression) total += dictionary_penalty(p.w, obj.cfg.alpha1, obj.cfg.alpha2);
  return total;
}

Matrix dictionary_gradient(const Objective& obj, const Matrix& w, const ScenarioHead& head,
                           std::size_t batch_size) {
  Matrix g = penalty_gradient_w(w, obj.cfg.alpha1, obj.cfg.alpha2);
  for (const auto& cols : make_batches(obj.instances(), batch_size, nullptr)) {
    Matrix a = gather(obj.a, cols);
    Matrix h = head_encode(head, gather(obj.x, cols));
    g += reconstruction_gradient_w(a, w, h, gather(obj.omega, cols));
  }
  return g;
}

struct RunFlags {
  bool update_dictionary = true;
  bool update_classifier = false;
  bool regression = false;
};

std::vector<double> run_epochs(const Objective& obj, Params& params, const TrainSchedule& sched,
                               const RunFlags& flags, const IterateObserver& observer) {
  const auto n = obj.instances();
  const double inv_n = 1.0 / static_cast<double>(std::max<Eigen::Index>(n, 1));
  const SceneClassifier* clf_ptr = obj.labels ? &params.clf : nullptr;
  std::vector<double> history;
  if (n == 0) return history;

  double current = full_loss(obj, params, flags.regression);
  if (!std::isfinite(current)) throw std::runtime_error("head training: non-finite initial loss");
  double head_lr = sched.head_lr;
  double dict_lr = sched.dict_lr;
  std::size_t iteration = 0;

  for (std::size_t epoch = 0; epoch < sched.epochs; ++epoch) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < kMaxEpochRetries && !accepted; ++attempt) {
      Params trial = params;
      std::size_t it = iteration;
      std::mt19937_64 rng(sched.seed * 1000003ULL + epoch);
      for (const auto& cols : make_batches(n, sched.batch_size, &rng)) {
        const Batch b = obj.batch(cols);
        const double scale = 1.0 / static_cast<double>(cols.size());
        auto g = batch_kernel(b, trial.w, trial.head, clf_ptr ? &trial.clf : nullptr, obj.cfg,
                              obj.lambda_ce, flags.regression);
        trial.head.weights -= head_lr * scale * g.head_weights;
        trial.head.bias -= head_lr * scale * g.head_bias;
        if (flags.update_classifier) {
          trial.clf.weights -= head_lr * scale * g.clf_weights;
          trial.clf.bias -= head_lr * scale * g.clf_bias;
        }
        ++it;
        if (flags.update_dictionary && sched.dict_update_period != kNoDictionaryUpdates &&
            it % sched.dict_update_period == 0) {
          Matrix gw = dictionary_gradient(obj, trial.w, trial.head, sched.batch_size);
          trial.w = clip_unit(trial.w - dict_lr * inv_n * gw);
          if (observer) observer(trial.w, head_encode(trial.head, b.x));
        }
      }
      double next = full_loss(obj, trial, flags.regression);
      if (std::isfinite(next) && next <= current) {
        params = std::move(trial);
        current = next;
        iteration = it;
        accepted = true;
      } else {
        head_lr *= 0.5;
        dict_lr *= 0.5;
      }
    }
    if (!accepted) break;
    history.push_back(current);
  }
  return history;
}

void check_alignment(const ObjectSceneMatrix& a, const FeatureMatrix& x) {
  if (a.instances() != x.matrix.cols())
    throw DimensionError("head: " + std::to_string(a.instances()) + " annotated instances but " +
                         std::to_string(x.matrix.cols()) + " feature columns");
  if (!x.instance_ids.empty() && x.instance_ids != a.instance_ids)
    throw std::invalid_argument("head: feature columns are not aligned with the object matrix");
}

}  // namespace

void TrainSchedule::validate() const {
  if (dict_update_period < 1)
    throw std::invalid_argument("train schedule: dict_update_period must be >= 1");
  if (!(head_lr > 0) || !(dict_lr > 0))
    throw std::invalid_argument("train schedule: learning rates must be > 0");
  if (batch_size < 1) throw std::invalid_argument("train schedule: batch_size must be >= 1");
  if (lambda_ce < 0) throw std::invalid_argument("train schedule: lambda_ce must be >= 0");
}

ScenarioHead init_head(std::size_t k, std::size_t feature_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.01);
  ScenarioHead head;
  head.weights.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(feature_dim));
  for (Eigen::Index i = 0; i < head.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < head.weights.cols(); ++j) head.weights(i, j) = normal(rng);
  head.bias = Vector::Zero(static_cast<Eigen::Index>(k));
  return head;
}

Matrix head_encode(const ScenarioHead& head, const Matrix& x) {
  if (x.rows() != head.weights.cols())
    throw DimensionError("head: feature dimension " + std::to_string(x.rows()) +
                         " but head expects " + std::to_string(head.weights.cols()));
  Matrix z = head.weights * x;
  z.colwise() += head.bias;
  return sigmoid(z);
}

EncodingMatrix head_forward(const ScenarioHead& head, const FeatureMatrix& x) {
  return EncodingMatrix{head_encode(head, x.matrix), x.instance_ids};
}

HeadGradients head_objective(const Matrix& a, const Matrix& x, const Matrix& w,
                             const ScenarioHead& head, const Matrix& omega,
                             const PbmfConfig& cfg) {
  Batch b{a, x, omega, Matrix(), {}};
  auto g = batch_kernel(b, w, head, nullptr, cfg, 0.0, false);
  return HeadGradients{g.loss + dictionary_penalty(w, cfg.alpha1, cfg.alpha2),
                       std::move(g.head_weights), std::move(g.head_bias)};
}

JointGradients joint_objective(const Matrix& a, const Matrix& x,
                               const std::vector<std::size_t>& labels, const Matrix& w,
                               const ScenarioHead& head, const SceneClassifier& clf,
                               const Matrix& omega, const PbmfConfig& cfg, double lambda_ce) {
  if (static_cast<Eigen::Index>(labels.size()) != x.cols())
    throw DimensionError("joint objective: labels do not align with features");
  Batch b{a, x, omega, Matrix(), labels};
  auto g = batch_kernel(b, w, head, &clf, cfg, lambda_ce, false);
  const double penalty = dictionary_penalty(w, cfg.alpha1, cfg.alpha2);
  g.pbmf += penalty;
  g.loss += penalty;
  return g;
}

Matrix batched_dictionary_gradient(const Matrix& a, const Matrix& x, const Matrix& w,
                                   const ScenarioHead& head, const Matrix& omega,
                                   const PbmfConfig& cfg, std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  Objective obj{a, x, omega, cfg};
  return dictionary_gradient(obj, w, head, batch_size);
}

HeadTraining train_head(const ObjectSceneMatrix& a, const FeatureMatrix& x,
                        const ScenarioModel& model, const TrainSchedule& sched,
                        const ScenarioHead* start, const Matrix* target_h,
                        const IterateObserver& observer) {
  sched.validate();
  check_alignment(a, x);
  ObjectSceneMatrix aligned = align_objects(a, model.object_names);
  const bool regression = sched.target == HeadTarget::kRegression;
  if (regression && (!target_h || target_h->cols() != a.instances() ||
                     target_h->rows() != static_cast<Eigen::Index>(model.k())))
    throw std::invalid_argument("train_head: regression target must be k x instances");

  const Matrix omega = model_weights(model, aligned.matrix).matrix;
  Objective obj{aligned.matrix, x.matrix, omega, model.config};
  if (regression) obj.target = target_h;

  Params params{start ? *start
                      : init_head(model.k(), static_cast<std::size_t>(x.matrix.rows()),
                                  sched.seed),
                model.dictionary, SceneClassifier{}};
  if (params.head.k() != model.k() ||
      params.head.feature_dim() != static_cast<std::size_t>(x.matrix.rows()))
    throw DimensionError("train_head: starting head has the wrong shape");

  RunFlags flags;
  flags.regression = regression;
  flags.update_dictionary = !regression;
  HeadTraining out;
  out.loss_history = run_epochs(obj, params, sched, flags, observer);
  out.head = std::move(params.head);
  out.model = model;
  out.model.dictionary = std::move(params.w);
  return out;
}

JointTraining joint_finetune(const ObjectSceneMatrix& a, const FeatureMatrix& x,
                             const std::vector<std::string>& labels, const ScenarioModel& model,
                             const ScenarioHead& head, const SceneClassifier& classifier,
                             const TrainSchedule& sched, const IterateObserver& observer) {
  sched.validate();
  check_alignment(a, x);
  if (static_cast<Eigen::Index>(labels.size()) != a.instances())
    throw DimensionError("joint_finetune: labels do not align with instances");
  if (classifier.weights.cols() != static_cast<Eigen::Index>(model.k()))
    throw DimensionError("joint_finetune: classifier width differs from k");
  ObjectSceneMatrix aligned = align_objects(a, model.object_names);
  const auto y = label_indices(classifier, labels);
  const Matrix omega = model_weights(model, aligned.matrix).matrix;
  Objective obj{aligned.matrix, x.matrix, omega, model.config, &y, sched.lambda_ce};

  Params params{head, model.dictionary, classifier};
  RunFlags flags;
  flags.update_classifier = sched.lambda_ce > 0;
  JointTraining out;
  out.loss_history = run_epochs(obj, params, sched, flags, observer);
  out.head = std::move(params.head);
  out.model = model;
  out.model.dictionary = std::move(params.w);
  out.classifier = std::move(params.clf);
  return out;
}

}  // namespace scenarios
