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

#include "scenarios/pbmf.hpp"

#include "scenarios/baselines.hpp"

#include <cassert>
#include <limits>
#include <random>
#include <unordered_map>

namespace scenarios {

namespace {

constexpr std::size_t kMaxBacktracks = 60;
constexpr double kMaxStep = 1e8;

bool relative_change_below(double previous, double current, double tol) {
  double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
  return std::abs(previous - current) / scale < tol;
}

// Projected gradient step on one factor with backtracking. `loss` holds the
// objective at the current point and is updated on success. Returns false when
// no step size gave a non-increasing loss (the factor is left unchanged).
template <typename LossFn>
bool projected_step(Matrix& factor, const Matrix& grad, double& step, double& loss,
                    double backtrack, LossFn&& loss_at) {
  bool first_try = true;
  for (std::size_t attempt = 0; attempt < kMaxBacktracks; ++attempt) {
    Matrix trial = clip_unit(factor - step * grad);
    double trial_loss = loss_at(trial);
    if (!std::isfinite(trial_loss)) return false;
    if (trial_loss <= loss) {
      factor = std::move(trial);
      loss = trial_loss;
      if (first_try) step = std::min(step / backtrack, kMaxStep);
      return true;
    }
    step *= backtrack;
    first_try = false;
  }
  return false;
}

void check_finite(double loss, std::size_t iteration) {
  if (!std::isfinite(loss))
    throw std::runtime_error("pbmf: non-finite loss at iteration " + std::to_string(iteration));
}

}  // namespace

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kObjectIdf:
      return "object_idf";
    case WeightScheme::kDatasetRatio:
      return "dataset_ratio";
  }
  return "object_idf";
}

WeightScheme parse_weight_scheme(const std::string& text) {
  if (text == "object_idf") return WeightScheme::kObjectIdf;
  if (text == "dataset_ratio") return WeightScheme::kDatasetRatio;
  throw std::invalid_argument("unknown weight scheme '" + text + "'");
}

void PbmfConfig::validate() const {
  if (k < 1) throw std::invalid_argument("pbmf config: k must be >= 1");
  if (alpha1 < 0 || alpha2 < 0 || alpha3 < 0)
    throw std::invalid_argument("pbmf config: penalty weights must be non-negative");
  if (!(step_size > 0)) throw std::invalid_argument("pbmf config: step_size must be > 0");
  if (!(backtrack_factor > 0 && backtrack_factor < 1))
    throw std::invalid_argument("pbmf config: backtrack_factor must lie in (0,1)");
  if (!(tol >= 0)) throw std::invalid_argument("pbmf config: tol must be >= 0");
}

PbmfConfig PbmfConfig::basic(std::size_t k, std::uint64_t seed) {
  PbmfConfig cfg;
  cfg.k = k;
  cfg.alpha1 = cfg.alpha2 = cfg.alpha3 = 0;
  cfg.use_weights = false;
  cfg.seed = seed;
  return cfg;
}

Vector object_weights(const ObjectSceneMatrix& a, WeightScheme scheme) {
  const double n_instances = static_cast<double>(a.instances());
  Vector weights(a.objects());
  if (scheme == WeightScheme::kDatasetRatio) {
    if (a.objects() == 0) return weights;
    weights.setConstant(1.0 + std::log(n_instances / static_cast<double>(a.objects())));
    return weights;
  }
  for (Eigen::Index i = 0; i < a.objects(); ++i) {
    double count = a.matrix.row(i).sum();
    if (count <= 0)
      throw std::invalid_argument("weight matrix: object '" + a.object_names[i] +
                                  "' never occurs");
    weights(i) = 1.0 + std::log(n_instances / count);
  }
  return weights;
}

WeightMatrix apply_object_weights(const Matrix& a, const Vector& weights) {
  if (weights.size() != a.rows())
    throw DimensionError("weight matrix: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(a.rows()) + " objects");
  WeightMatrix omega{Matrix(a.rows(), a.cols())};
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      omega.matrix(i, j) = std::max(a(i, j) * weights(i), 1.0);
  return omega;
}

WeightMatrix build_weight_matrix(const ObjectSceneMatrix& a, WeightScheme scheme) {
  return apply_object_weights(a.matrix, object_weights(a, scheme));
}

WeightMatrix uniform_weights(Eigen::Index objects, Eigen::Index instances) {
  return WeightMatrix{Matrix::Ones(objects, instances)};
}

LossBreakdown pbmf_loss_terms(const Matrix& a, const Matrix& w, const Matrix& h,
                              const WeightMatrix& omega, const PbmfConfig& cfg) {
  LossBreakdown terms;
  terms.reconstruction = reconstruction_loss(a, w, h, omega.matrix);
  terms.orthogonality = orthogonality_penalty(w);
  terms.l1_w = w.cwiseAbs().sum();
  terms.l1_h = h.cwiseAbs().sum();
  terms.total = terms.reconstruction + cfg.alpha1 * terms.orthogonality +
                cfg.alpha2 * terms.l1_w + cfg.alpha3 * terms.l1_h;
  return terms;
}

double pbmf_loss(const ObjectSceneMatrix& a, const Matrix& w, const Matrix& h,
                 const WeightMatrix& omega, const PbmfConfig& cfg) {
  return pbmf_loss_terms(a.matrix, w, h, omega, cfg).total;
}

PbmfGradients pbmf_gradients(const ObjectSceneMatrix& a, const Matrix& w, const Matrix& h,
                             const WeightMatrix& omega, const PbmfConfig& cfg) {
  Matrix r = weighted_residual(a.matrix, w, h, omega.matrix);
  PbmfGradients g;
  g.w = -2.0 * r * h.transpose() + penalty_gradient_w(w, cfg.alpha1, cfg.alpha2);
  g.h = -2.0 * w.transpose() * r;
  g.h.array() += cfg.alpha3;
  return g;
}

InitialFactors initialize_factors(const ObjectSceneMatrix& a, const PbmfConfig& cfg) {
  cfg.validate();
  const auto m = a.objects();
  const auto n = a.instances();
  const auto k = static_cast<Eigen::Index>(cfg.k);
  if (k > std::min(m, n))
    throw std::invalid_argument("initialize_factors: k = " + std::to_string(k) +
                                " exceeds min(objects, instances) = " +
                                std::to_string(std::min(m, n)));
  if (a.matrix.cwiseAbs().sum() == 0)
    throw std::invalid_argument("initialize_factors: A is all zeros");

  // The stream depends on the seed and the dictionary shape only, never on
  // the order of instances.
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(m),
                    static_cast<std::uint64_t>(k)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  InitialFactors out;
  out.nmf_w.resize(m, k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out.nmf_w(i, j) = unif(rng);
  out.nmf_h = Matrix::Constant(k, n, 0.5);
  nmf_multiplicative_updates(a.matrix, out.nmf_w, out.nmf_h, cfg.init_iters);

  out.w = out.nmf_w;
  out.h = out.nmf_h;
  for (Eigen::Index j = 0; j < k; ++j) {
    double top = out.w.col(j).maxCoeff();
    if (top > 0) {
      out.w.col(j) /= top;
      out.h.row(j) *= top;
    }
  }
  out.w = clip_unit(out.w);
  out.h = clip_unit(out.h);
  return out;
}

namespace {

struct Problem {
  const Matrix& a;
  const WeightMatrix& omega;
  const PbmfConfig& cfg;

  double loss(const Matrix& w, const Matrix& h) const {
    return pbmf_loss_terms(a, w, h, omega, cfg).total;
  }
  Matrix grad_h(const Matrix& w, const Matrix& h) const {
    Matrix g = reconstruction_gradient_h(a, w, h, omega.matrix);
    g.array() += cfg.alpha3;
    return g;
  }
  Matrix grad_w(const Matrix& w, const Matrix& h) const {
    return reconstruction_gradient_w(a, w, h, omega.matrix) +
           penalty_gradient_w(w, cfg.alpha1, cfg.alpha2);
  }
};

// Replace all-zero dictionary columns by the object profile of the worst
// reconstructed instance, keeping the change only if the loss does not grow.
std::size_t reseed_dead_columns(const Problem& p, Matrix& w, Matrix& h, double& loss) {
  std::size_t reseeded = 0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if (w.col(j).maxCoeff() > 0) continue;
    Matrix fwh = pseudo_boolean_product(w, h);
    Vector residual =
        (p.omega.matrix.cwiseProduct(p.a - fwh)).colwise().squaredNorm().transpose();
    Eigen::Index worst = 0;
    residual.maxCoeff(&worst);
    if (p.a.col(worst).sum() == 0) continue;
    Matrix w_try = w;
    Matrix h_try = h;
    w_try.col(j) = p.a.col(worst);
    h_try.row(j).setZero();
    h_try(j, worst) = 1.0;
    double trial = p.loss(w_try, h_try);
    if (trial <= loss) {
      w = std::move(w_try);
      h = std::move(h_try);
      loss = trial;
      ++reseeded;
    }
  }
  return reseeded;
}

}  // namespace

FactorizeResult factorize(const ObjectSceneMatrix& a, const PbmfConfig& cfg,
                          const IterateObserver& observer) {
  cfg.validate();
  auto init = initialize_factors(a, cfg);
  Matrix w = std::move(init.w);
  Matrix h = std::move(init.h);

  FactorizeResult result;
  result.model.object_names = a.object_names;
  result.model.config = cfg;
  result.model.object_weights =
      cfg.use_weights ? object_weights(a, cfg.weight_scheme) : Vector::Ones(a.objects());
  const WeightMatrix omega = cfg.use_weights
                                 ? apply_object_weights(a.matrix, result.model.object_weights)
                                 : uniform_weights(a.objects(), a.instances());
  const Problem problem{a.matrix, omega, cfg};

  double loss = problem.loss(w, h);
  check_finite(loss, 0);
  double step_h = cfg.step_size;
  double step_w = cfg.step_size;

  for (std::size_t iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    const double previous = loss;
    for (std::size_t s = 0; s < cfg.inner_steps; ++s) {
      Matrix g = problem.grad_h(w, h);
      if (!g.allFinite()) check_finite(std::numeric_limits<double>::quiet_NaN(), iter);
      projected_step(h, g, step_h, loss, cfg.backtrack_factor,
                     [&](const Matrix& trial) { return problem.loss(w, trial); });
      assert(in_unit_box(h));
      if (observer) observer(w, h);
    }
    for (std::size_t s = 0; s < cfg.inner_steps; ++s) {
      Matrix g = problem.grad_w(w, h);
      if (!g.allFinite()) check_finite(std::numeric_limits<double>::quiet_NaN(), iter);
      projected_step(w, g, step_w, loss, cfg.backtrack_factor,
                     [&](const Matrix& trial) { return problem.loss(trial, h); });
      assert(in_unit_box(w));
      if (observer) observer(w, h);
    }
    std::size_t reseeded = reseed_dead_columns(problem, w, h, loss);
    if (reseeded > 0) {
      result.reseeded_columns += reseeded;
      if (observer) observer(w, h);
    }
    check_finite(loss, iter);
    result.loss_history.push_back(loss);
    if (relative_change_below(previous, loss, cfg.tol)) {
      result.converged = true;
      break;
    }
  }

  result.model.dictionary = std::move(w);
  result.encoding.matrix = std::move(h);
  result.encoding.instance_ids = a.instance_ids;
  return result;
}

FactorizeResult factorize_best_of(const ObjectSceneMatrix& a, const PbmfConfig& cfg,
                                  std::size_t restarts, const IterateObserver& observer) {
  if (restarts == 0) throw std::invalid_argument("factorize_best_of: restarts must be >= 1");
  std::optional<FactorizeResult> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    PbmfConfig run = cfg;
    run.seed = cfg.seed + r;
    auto result = factorize(a, run, observer);
    if (!best || result.loss_history.back() < best->loss_history.back()) best = std::move(result);
  }
  return std::move(*best);
}

ObjectSceneMatrix align_objects(const ObjectSceneMatrix& a,
                                const std::vector<std::string>& object_names) {
  if (a.object_names == object_names) return a;
  std::unordered_map<std::string, Eigen::Index> rows;
  for (std::size_t i = 0; i < a.object_names.size(); ++i)
    rows.emplace(a.object_names[i], static_cast<Eigen::Index>(i));
  for (const auto& name : a.object_names)
    if (std::find(object_names.begin(), object_names.end(), name) == object_names.end())
      throw std::invalid_argument("object '" + name + "' is not in the model vocabulary");
  ObjectSceneMatrix out;
  out.object_names = object_names;
  out.instance_ids = a.instance_ids;
  out.matrix.resize(static_cast<Eigen::Index>(object_names.size()), a.instances());
  for (std::size_t i = 0; i < object_names.size(); ++i) {
    auto it = rows.find(object_names[i]);
    if (it == rows.end())
      throw std::invalid_argument("object '" + object_names[i] + "' is missing from the input");
    out.matrix.row(static_cast<Eigen::Index>(i)) = a.matrix.row(it->second);
  }
  return out;
}

WeightMatrix model_weights(const ScenarioModel& model, const Matrix& a) {
  if (!model.config.use_weights || model.object_weights.size() == 0)
    return uniform_weights(a.rows(), a.cols());
  return apply_object_weights(a, model.object_weights);
}

EncodeResult encode(const ObjectSceneMatrix& a_new, const ScenarioModel& model,
                    const IterateObserver& observer) {
  const PbmfConfig& cfg = model.config;
  ObjectSceneMatrix a = align_objects(a_new, model.object_names);
  const Matrix& w = model.dictionary;
  const WeightMatrix omega = model_weights(model, a.matrix);
  const Problem problem{a.matrix, omega, cfg};

  // Start each column at the covered fraction of every scenario.
  Vector mass = w.colwise().sum().transpose();
  Matrix h = w.transpose() * a.matrix;
  for (Eigen::Index j = 0; j < h.rows(); ++j) h.row(j) /= std::max(mass(j), 1e-12);
  h = clip_unit(h);

  EncodeResult result;
  double loss = problem.loss(w, h);
  check_finite(loss, 0);
  double step = cfg.step_size;
  for (std::size_t iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    const double previous = loss;
    for (std::size_t s = 0; s < cfg.inner_steps; ++s) {
      Matrix g = problem.grad_h(w, h);
      projected_step(h, g, step, loss, cfg.backtrack_factor,
                     [&](const Matrix& trial) { return problem.loss(w, trial); });
      assert(in_unit_box(h));
      if (observer) observer(w, h);
    }
    check_finite(loss, iter);
    result.loss_history.push_back(loss);
    if (relative_change_below(previous, loss, cfg.tol)) {
      result.converged = true;
      break;
    }
  }
  result.encoding.matrix = std::move(h);
  result.encoding.instance_ids = a.instance_ids;
  return result;
}

}  // namespace scenarios
