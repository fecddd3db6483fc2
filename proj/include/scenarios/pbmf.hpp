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

// Pseudo-Boolean matrix factorization.
//
// Given a binary objects x instances matrix A, find a dictionary W (objects x k)
// and encodings H (k x instances), both confined to [0,1], minimizing
//
//   || Omega . (A - f(WH)) ||_F^2 + a1 ||W'W - diag(W'W)||_F^2 + a2 |W|_1 + a3 |H|_1
//
// where f(x) = min(x, 1 + 0.01 x) is a smooth stand-in for the Boolean product
// and Omega up-weights present rare objects. With Omega = 1 and a1 = a2 = a3 = 0
// this is the basic formulation.

#pragma once

#include "scenarios/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scenarios {

// How Omega is derived from A.
enum class WeightScheme {
  // Per-object IDF: 1 + ln(N_instances / n_i), n_i = instances containing object i.
  kObjectIdf,
  // Dataset-level constant: 1 + ln(N_instances / N_objects), same for every object.
  kDatasetRatio,
};

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(const std::string& text);

struct PbmfConfig {
  std::size_t k = 25;
  double alpha1 = 0.1;   // orthogonality
  double alpha2 = 0.01;  // L1 on W
  double alpha3 = 0.01;  // L1 on H
  bool use_weights = true;
  WeightScheme weight_scheme = WeightScheme::kObjectIdf;
  std::size_t max_outer_iters = 300;
  std::size_t inner_steps = 10;
  double step_size = 1e-2;
  double backtrack_factor = 0.5;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  // Multiplicative-update iterations of the NMF initializer.
  std::size_t init_iters = 100;

  void validate() const;

  // The basic formulation: uniform weights, no penalties.
  static PbmfConfig basic(std::size_t k, std::uint64_t seed = 0);
};

struct WeightMatrix {
  Matrix matrix;
};

struct ScenarioModel {
  Matrix dictionary;  // objects x k, entries in [0,1]
  std::vector<std::string> object_names;
  PbmfConfig config;
  // Weight applied to present entries of each object; all ones when the model
  // was trained without Omega.
  Vector object_weights;

  std::size_t k() const { return static_cast<std::size_t>(dictionary.cols()); }
};

struct EncodingMatrix {
  Matrix matrix;  // k x instances, entries in [0,1]
  std::vector<std::string> instance_ids;
};

// Per-object weight 1 + ln(N / n_i) (or the dataset-level constant).
// Throws when an object never occurs.
Vector object_weights(const ObjectSceneMatrix& a, WeightScheme scheme = WeightScheme::kObjectIdf);

// Omega_ij = max(A_ij * weight_i, 1).
WeightMatrix apply_object_weights(const Matrix& a, const Vector& weights);
WeightMatrix build_weight_matrix(const ObjectSceneMatrix& a,
                                 WeightScheme scheme = WeightScheme::kObjectIdf);
WeightMatrix uniform_weights(Eigen::Index objects, Eigen::Index instances);

// ---------------------------------------------------------------------------
// Loss and gradient kernels. They accept any Eigen expression so callers can
// pass column blocks of A, H and Omega for mini-batch evaluation.

template <typename DA, typename DW, typename DH, typename DO>
void check_factor_dims(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DW>& w,
                       const Eigen::MatrixBase<DH>& h, const Eigen::MatrixBase<DO>& omega) {
  check_product_dims(w, h, "pbmf");
  if (a.rows() != w.rows() || a.cols() != h.cols())
    throw DimensionError("pbmf: A is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " but WH is " + std::to_string(w.rows()) +
                         "x" + std::to_string(h.cols()));
  if (omega.rows() != a.rows() || omega.cols() != a.cols())
    throw DimensionError("pbmf: weight matrix shape differs from A");
}

// ||Omega . (A - f(WH))||_F^2
template <typename DA, typename DW, typename DH, typename DO>
typename DW::Scalar reconstruction_loss(const Eigen::MatrixBase<DA>& a,
                                        const Eigen::MatrixBase<DW>& w,
                                        const Eigen::MatrixBase<DH>& h,
                                        const Eigen::MatrixBase<DO>& omega) {
  check_factor_dims(a, w, h, omega);
  auto fwh = pseudo_boolean_product(w, h);
  return (omega.cwiseProduct(a - fwh)).squaredNorm();
}

// R = Omega^2 . (A - f(WH)) . f'(WH); the data-term gradients are -2 R H' and -2 W' R.
template <typename DA, typename DW, typename DH, typename DO>
MatrixT<typename DW::Scalar> weighted_residual(const Eigen::MatrixBase<DA>& a,
                                               const Eigen::MatrixBase<DW>& w,
                                               const Eigen::MatrixBase<DH>& h,
                                               const Eigen::MatrixBase<DO>& omega) {
  using Scalar = typename DW::Scalar;
  check_factor_dims(a, w, h, omega);
  MatrixT<Scalar> wh = w * h;
  MatrixT<Scalar> r(wh.rows(), wh.cols());
  for (Eigen::Index i = 0; i < wh.rows(); ++i)
    for (Eigen::Index j = 0; j < wh.cols(); ++j) {
      Scalar x = wh(i, j);
      Scalar o = omega(i, j);
      r(i, j) = o * o * (a(i, j) - pseudo_boolean(x)) * pseudo_boolean_slope(x);
    }
  return r;
}

// Data-term gradient w.r.t. W over the given columns. Summing this over a
// column partition of (A, H, Omega) gives the full-batch data gradient.
template <typename DA, typename DW, typename DH, typename DO>
MatrixT<typename DW::Scalar> reconstruction_gradient_w(const Eigen::MatrixBase<DA>& a,
                                                       const Eigen::MatrixBase<DW>& w,
                                                       const Eigen::MatrixBase<DH>& h,
                                                       const Eigen::MatrixBase<DO>& omega) {
  using Scalar = typename DW::Scalar;
  return Scalar(-2) * weighted_residual(a, w, h, omega) * h.transpose();
}

template <typename DA, typename DW, typename DH, typename DO>
MatrixT<typename DW::Scalar> reconstruction_gradient_h(const Eigen::MatrixBase<DA>& a,
                                                       const Eigen::MatrixBase<DW>& w,
                                                       const Eigen::MatrixBase<DH>& h,
                                                       const Eigen::MatrixBase<DO>& omega) {
  using Scalar = typename DW::Scalar;
  return Scalar(-2) * w.transpose() * weighted_residual(a, w, h, omega);
}

// ||W'W - diag(W'W)||_F^2
template <typename DW>
typename DW::Scalar orthogonality_penalty(const Eigen::MatrixBase<DW>& w) {
  using Scalar = typename DW::Scalar;
  MatrixT<Scalar> gram = w.transpose() * w;
  gram.diagonal().setZero();
  return gram.squaredNorm();
}

// Gradient of a1 ||W'W - diag||_F^2 + a2 |W|_1 for W >= 0.
template <typename DW>
MatrixT<typename DW::Scalar> penalty_gradient_w(const Eigen::MatrixBase<DW>& w, double alpha1,
                                                double alpha2) {
  using Scalar = typename DW::Scalar;
  MatrixT<Scalar> gram = w.transpose() * w;
  gram.diagonal().setZero();
  MatrixT<Scalar> g = Scalar(4 * alpha1) * (w * gram);
  g.array() += Scalar(alpha2);
  return g;
}

// W-only part of the objective: a1 ||W'W - diag||_F^2 + a2 |W|_1.
template <typename DW>
typename DW::Scalar dictionary_penalty(const Eigen::MatrixBase<DW>& w, double alpha1,
                                       double alpha2) {
  using Scalar = typename DW::Scalar;
  return Scalar(alpha1) * orthogonality_penalty(w) + Scalar(alpha2) * w.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------

struct LossBreakdown {
  double reconstruction = 0;
  double orthogonality = 0;  // unweighted ||W'W - diag||_F^2
  double l1_w = 0;
  double l1_h = 0;
  double total = 0;
};

LossBreakdown pbmf_loss_terms(const Matrix& a, const Matrix& w, const Matrix& h,
                              const WeightMatrix& omega, const PbmfConfig& cfg);
double pbmf_loss(const ObjectSceneMatrix& a, const Matrix& w, const Matrix& h,
                 const WeightMatrix& omega, const PbmfConfig& cfg);

struct PbmfGradients {
  Matrix w;
  Matrix h;
};

PbmfGradients pbmf_gradients(const ObjectSceneMatrix& a, const Matrix& w, const Matrix& h,
                             const WeightMatrix& omega, const PbmfConfig& cfg);

struct InitialFactors {
  Matrix w;      // rescaled and clipped
  Matrix h;
  Matrix nmf_w;  // NMF iterate before rescaling
  Matrix nmf_h;
};

// NMF by multiplicative updates followed by per-scenario max normalization of W
// (with the inverse scale moved into H) and clipping to [0,1]. H starts from a
// constant so the result is equivariant to instance order.
InitialFactors initialize_factors(const ObjectSceneMatrix& a, const PbmfConfig& cfg);

// Called with (W, H) after every accepted projected step.
using IterateObserver = std::function<void(const Matrix& w, const Matrix& h)>;

struct FactorizeResult {
  ScenarioModel model;
  EncodingMatrix encoding;
  std::vector<double> loss_history;  // one entry per outer iteration
  bool converged = false;
  std::size_t reseeded_columns = 0;
};

FactorizeResult factorize(const ObjectSceneMatrix& a, const PbmfConfig& cfg,
                          const IterateObserver& observer = {});

// Runs factorize with seeds cfg.seed, cfg.seed + 1, ... and keeps the lowest
// final loss.
FactorizeResult factorize_best_of(const ObjectSceneMatrix& a, const PbmfConfig& cfg,
                                  std::size_t restarts, const IterateObserver& observer = {});

struct EncodeResult {
  EncodingMatrix encoding;
  std::vector<double> loss_history;
  bool converged = false;
};

// Solve for H with the dictionary held fixed. Rows of a_new are matched to the
// model's objects by name.
EncodeResult encode(const ObjectSceneMatrix& a_new, const ScenarioModel& model,
                    const IterateObserver& observer = {});

// Rows of `a` reordered to follow `object_names`; throws naming the first
// object that is missing on either side.
ObjectSceneMatrix align_objects(const ObjectSceneMatrix& a,
                                const std::vector<std::string>& object_names);

// Omega for data scored against a trained model.
WeightMatrix model_weights(const ScenarioModel& model, const Matrix& a);

}  // namespace scenarios
