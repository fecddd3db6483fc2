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

#include "scenarios/baselines.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <random>

namespace scenarios {

namespace {

constexpr double kDenominatorFloor = 1e-16;

Matrix random_uniform(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double lo,
                      double hi) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = unif(rng);
  return m;
}

Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

void check_rank(const Matrix& a, std::size_t k, const char* what) {
  if (static_cast<Eigen::Index>(k) > std::min(a.rows(), a.cols()))
    throw std::invalid_argument(std::string(what) + ": k = " + std::to_string(k) +
                                " exceeds min(rows, cols) = " +
                                std::to_string(std::min(a.rows(), a.cols())));
}

Matrix round_half(const Matrix& m) {
  return m.unaryExpr([](double x) { return x >= 0.5 ? 1.0 : 0.0; });
}

// Move each scenario's peak to 1 in W and compensate in H, then clip.
void normalize_pair(Matrix& w, Matrix& h) {
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    double top = w.col(j).maxCoeff();
    if (top > 0) {
      w.col(j) /= top;
      h.row(j) *= top;
    }
  }
  w = clip_unit(w);
  h = clip_unit(h);
}

}  // namespace

void nmf_multiplicative_updates(const Matrix& a, Matrix& w, Matrix& h, std::size_t iters,
                                std::vector<double>* objective) {
  check_product_dims(w, h, "nmf");
  if (a.rows() != w.rows() || a.cols() != h.cols())
    throw DimensionError("nmf: factor shapes do not match A");
  for (std::size_t it = 0; it < iters; ++it) {
    Matrix wt_a = w.transpose() * a;
    Matrix wt_w_h = (w.transpose() * w) * h;
    h = h.cwiseProduct(wt_a.cwiseQuotient(wt_w_h.cwiseMax(kDenominatorFloor)));
    Matrix a_ht = a * h.transpose();
    Matrix w_h_ht = w * (h * h.transpose());
    w = w.cwiseProduct(a_ht.cwiseQuotient(w_h_ht.cwiseMax(kDenominatorFloor)));
    if (objective) objective->push_back((a - w * h).squaredNorm());
  }
}

NmfResult nmf(const Matrix& a, std::size_t k, std::size_t iters, std::uint64_t seed) {
  check_rank(a, k, "nmf");
  if (a.size() > 0 && a.minCoeff() < 0)
    throw std::invalid_argument("nmf: A has negative entries");
  std::mt19937_64 rng(seed);
  NmfResult out;
  const auto kk = static_cast<Eigen::Index>(k);
  out.w = random_uniform(a.rows(), kk, rng, 0.1, 1.0);
  out.h = random_uniform(kk, a.cols(), rng, 0.1, 1.0);
  nmf_multiplicative_updates(a, out.w, out.h, iters, &out.objective);
  return out;
}

double boolean_l1_error(const Matrix& a, const Matrix& w, const Matrix& h) {
  check_product_dims(w, h, "boolean_l1_error");
  if (w.cols() == 0) return a.cwiseAbs().sum();
  Matrix product = (w * h).unaryExpr([](double x) { return x > 0 ? 1.0 : 0.0; });
  return (a - product).cwiseAbs().sum();
}

GreedyBmfResult greedy_bmf(const Matrix& a, std::size_t k, double tau) {
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("greedy_bmf: tau must lie in (0,1]");
  const auto m = a.rows();
  const auto n = a.cols();
  const auto kk = static_cast<Eigen::Index>(k);

  // conf(i -> j) = <a_i, a_j> / <a_i, a_i> over object rows.
  Matrix co = a * a.transpose();
  Matrix candidates = Matrix::Zero(m, m);  // row i is the candidate seeded by object i
  for (Eigen::Index i = 0; i < m; ++i) {
    if (co(i, i) <= 0) continue;
    for (Eigen::Index j = 0; j < m; ++j)
      if (co(i, j) / co(i, i) >= tau) candidates(i, j) = 1.0;
  }

  GreedyBmfResult out;
  out.w = Matrix::Zero(m, kk);
  out.h = Matrix::Zero(kk, n);
  Matrix covered = Matrix::Zero(m, n);

  // Gain of covering instance column `col` with candidate `c`: newly covered
  // ones minus newly covered zeros.
  auto column_gain = [&](Eigen::Index c, Eigen::Index col) {
    double gain = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (candidates(c, i) == 0 || covered(i, col) != 0) continue;
      gain += a(i, col) != 0 ? 1.0 : -1.0;
    }
    return gain;
  };

  for (Eigen::Index step = 0; step < kk; ++step) {
    double best_gain = 0;
    Eigen::Index best = -1;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (candidates.row(c).sum() == 0) continue;
      double total = 0;
      for (Eigen::Index col = 0; col < n; ++col) total += std::max(0.0, column_gain(c, col));
      if (total > best_gain) {
        best_gain = total;
        best = c;
      }
    }
    if (best < 0) {
      out.exhausted = true;
      break;
    }
    out.w.col(step) = candidates.row(best).transpose();
    for (Eigen::Index col = 0; col < n; ++col) {
      if (column_gain(best, col) <= 0) continue;
      out.h(step, col) = 1.0;
      for (Eigen::Index i = 0; i < m; ++i)
        if (candidates(best, i) != 0) covered(i, col) = 1.0;
    }
    ++out.used;
  }
  return out;
}

namespace {

double binary_objective(const Matrix& a, const Matrix& w, const Matrix& h, double lambda) {
  auto pen = [](const Matrix& x) { return x.cwiseProduct((1.0 - x.array()).matrix()).squaredNorm(); };
  return (a - w * h).squaredNorm() + lambda * (pen(w) + pen(h));
}

// d/dx of (x(1-x))^2
Matrix binary_penalty_gradient(const Matrix& x) {
  return (2.0 * x.array() * (1.0 - x.array()) * (1.0 - 2.0 * x.array())).matrix();
}

template <typename LossFn>
void backtracking_projected_step(Matrix& factor, const Matrix& grad, double& step, double& loss,
                                 LossFn&& loss_at) {
  bool first = true;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Matrix trial = clip_unit(factor - step * grad);
    double value = loss_at(trial);
    if (value <= loss) {
      factor = std::move(trial);
      loss = value;
      if (first) step *= 2.0;
      return;
    }
    step *= 0.5;
    first = false;
  }
}

}  // namespace

BinaryMfResult binary_mf(const Matrix& a, const Factors& start, const BinaryMfOptions& options) {
  check_product_dims(start.w, start.h, "binary_mf");
  Matrix w = clip_unit(start.w);
  Matrix h = clip_unit(start.h);
  double step_w = 1e-2;
  double step_h = 1e-2;
  for (double lambda : options.lambda_schedule) {
    double loss = binary_objective(a, w, h, lambda);
    for (std::size_t it = 0; it < options.iters_per_lambda; ++it) {
      Matrix gh = -2.0 * w.transpose() * (a - w * h) + lambda * binary_penalty_gradient(h);
      backtracking_projected_step(h, gh, step_h, loss, [&](const Matrix& trial) {
        return binary_objective(a, w, trial, lambda);
      });
      Matrix gw = -2.0 * (a - w * h) * h.transpose() + lambda * binary_penalty_gradient(w);
      backtracking_projected_step(w, gw, step_w, loss, [&](const Matrix& trial) {
        return binary_objective(a, trial, h, lambda);
      });
    }
  }
  BinaryMfResult out;
  out.w = round_half(w);
  out.h = round_half(h);
  out.w_relaxed = std::move(w);
  out.h_relaxed = std::move(h);
  return out;
}

BinaryMfResult binary_mf(const Matrix& a, std::size_t k, std::uint64_t seed,
                         const BinaryMfOptions& options) {
  check_rank(a, k, "binary_mf");
  auto start = nmf(a, k, options.init_iters, seed);
  normalize_pair(start.w, start.h);
  return binary_mf(a, Factors{start.w, start.h}, options);
}

Matrix SvdResult::reconstruct() const { return u * s.asDiagonal() * v.transpose(); }

SvdResult truncated_svd(const Matrix& a, std::size_t k, std::size_t power_iters,
                        std::uint64_t seed, std::size_t oversample) {
  check_rank(a, k, "truncated_svd");
  const auto kk = static_cast<Eigen::Index>(k);
  SvdResult out;
  if (kk == 0) {
    out.u.resize(a.rows(), 0);
    out.s.resize(0);
    out.v.resize(a.cols(), 0);
    return out;
  }
  const Eigen::Index width =
      std::min<Eigen::Index>(kk + static_cast<Eigen::Index>(oversample), std::min(a.rows(), a.cols()));
  std::mt19937_64 rng(seed);
  Matrix sketch = a * random_normal(a.cols(), width, rng);

  auto orthonormal = [](const Matrix& y) {
    Eigen::HouseholderQR<Matrix> qr(y);
    return Matrix(qr.householderQ() * Matrix::Identity(y.rows(), y.cols()));
  };

  Matrix q = orthonormal(sketch);
  for (std::size_t it = 0; it < power_iters; ++it) {
    Matrix z = orthonormal(a.transpose() * q);
    q = orthonormal(a * z);
  }
  Matrix b = q.transpose() * a;  // width x n
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = q * svd.matrixU().leftCols(kk);
  out.s = svd.singularValues().head(kk);
  out.v = svd.matrixV().leftCols(kk);
  return out;
}

TrivialErrors trivial_baselines(const Matrix& a) {
  TrivialErrors out;
  out.zeros = a.squaredNorm();
  if (a.size() > 0) out.mean = (a.array() - a.mean()).matrix().squaredNorm();
  return out;
}

}  // namespace scenarios
