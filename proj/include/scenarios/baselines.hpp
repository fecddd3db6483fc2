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

// Reference factorizations used in reconstruction studies.

#pragma once

#include "scenarios/matrix.hpp"

#include <cstdint>
#include <vector>

namespace scenarios {

struct Factors {
  Matrix w;
  Matrix h;
};

// Lee-Seung multiplicative updates on ||A - WH||_F^2, in place. Returns the
// objective after each full (H then W) update when `objective` is non-null.
void nmf_multiplicative_updates(const Matrix& a, Matrix& w, Matrix& h, std::size_t iters,
                                std::vector<double>* objective = nullptr);

struct NmfResult {
  Matrix w;
  Matrix h;
  std::vector<double> objective;
};

// Random uniform start drawn from `seed`. Requires A >= 0 and k <= min(dims).
NmfResult nmf(const Matrix& a, std::size_t k, std::size_t iters, std::uint64_t seed);

struct GreedyBmfResult {
  Matrix w;  // objects x k, binary
  Matrix h;  // k x instances, binary
  // Set when fewer than k candidates reduced the error; the rest are zero.
  bool exhausted = false;
  std::size_t used = 0;
};

// ASSO-style greedy Boolean factorization. Candidate scenarios are rows of the
// object association matrix conf(i -> j) = |i and j| / |i| thresholded at tau.
GreedyBmfResult greedy_bmf(const Matrix& a, std::size_t k, double tau = 0.6);

// L1 error of A against the Boolean product of binary factors.
double boolean_l1_error(const Matrix& a, const Matrix& w, const Matrix& h);

struct BinaryMfOptions {
  std::vector<double> lambda_schedule{0.01, 0.1, 1.0, 10.0};
  std::size_t iters_per_lambda = 50;
  std::size_t init_iters = 100;  // NMF initializer budget
};

struct BinaryMfResult {
  Matrix w;  // rounded at 0.5
  Matrix h;
  Matrix w_relaxed;  // before rounding
  Matrix h_relaxed;
};

// Projected gradient on ||A - WH||^2 + lambda (||W.(1-W)||^2 + ||H.(1-H)||^2)
// over an increasing lambda schedule, then rounding.
BinaryMfResult binary_mf(const Matrix& a, std::size_t k, std::uint64_t seed,
                         const BinaryMfOptions& options = {});
// Same, starting from the given factors instead of the NMF initializer.
BinaryMfResult binary_mf(const Matrix& a, const Factors& start,
                         const BinaryMfOptions& options = {});

struct SvdResult {
  Matrix u;  // m x k
  Vector s;  // k, non-increasing
  Matrix v;  // n x k

  Matrix reconstruct() const;
};

// Randomized subspace iteration with oversampling.
SvdResult truncated_svd(const Matrix& a, std::size_t k, std::size_t power_iters = 4,
                        std::uint64_t seed = 0, std::size_t oversample = 8);

struct TrivialErrors {
  double zeros = 0;
  double mean = 0;
};

TrivialErrors trivial_baselines(const Matrix& a);

}  // namespace scenarios
