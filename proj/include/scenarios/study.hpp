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


// Reconstruction-error sweep over k for PBMF variants and the baselines.

#pragma once

#include "scenarios/matrix.hpp"
#include "scenarios/pbmf.hpp"

#include <string>
#include <vector>

namespace scenarios {

struct ReconRow {
  std::string method;
  std::size_t k = 0;  // 0 for the rank-free baselines
  double unweighted = 0;
  double weighted = 0;  // residual scaled by the object-IDF weight matrix
};

struct ReconStudyOptions {
  std::size_t nmf_iters = 500;
  std::size_t restarts = 1;
  double greedy_tau = 0.6;
};

// Methods: zeros, mean, truncated_svd, nmf, greedy_bmf, binary_mf, pbmf_basic,
// pbmf_full_uniform and pbmf_full. PBMF variants take everything but k, the
// weights and the penalties from `base`.
std::vector<ReconRow> recon_study(const ObjectSceneMatrix& a, const std::vector<std::size_t>& ks,
                                  const PbmfConfig& base, const ReconStudyOptions& options = {},
                                  const IterateObserver& observer = {});

std::string recon_study_csv(const std::vector<ReconRow>& rows);

}  // namespace scenarios
