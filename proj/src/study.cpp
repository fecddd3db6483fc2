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


#include "scenarios/study.hpp"

#include "scenarios/baselines.hpp"
#include "scenarios/evalkit.hpp"

#include <sstream>

namespace scenarios {

std::vector<ReconRow> recon_study(const ObjectSceneMatrix& a, const std::vector<std::size_t>& ks,
                                  const PbmfConfig& base, const ReconStudyOptions& options,
                                  const IterateObserver& observer) {
  a.validate();
  const Matrix& m = a.matrix;
  const Matrix omega = build_weight_matrix(a).matrix;
  std::vector<ReconRow> rows;
  auto add = [&](const std::string& method, std::size_t k, const Matrix& w, const Matrix& h,
                 ProductKind kind) {
    rows.push_back({method, k, reconstruction_error(m, w, h, nullptr, kind),
                    reconstruction_error(m, w, h, &omega, kind)});
  };

  // Rank-free baselines as rank-one products.
  add("zeros", 0, Matrix::Zero(m.rows(), 1), Matrix::Zero(1, m.cols()), ProductKind::kReal);
  add("mean", 0, Matrix::Constant(m.rows(), 1, m.mean()), Matrix::Ones(1, m.cols()),
      ProductKind::kReal);

  for (auto k : ks) {
    auto svd = truncated_svd(m, k, 4, base.seed);
    add("truncated_svd", k, svd.u * svd.s.asDiagonal(), svd.v.transpose(), ProductKind::kReal);
    auto nm = nmf(m, k, options.nmf_iters, base.seed);
    add("nmf", k, nm.w, nm.h, ProductKind::kReal);
    auto greedy = greedy_bmf(m, k, options.greedy_tau);
    add("greedy_bmf", k, greedy.w, greedy.h, ProductKind::kBoolean);
    auto bin = binary_mf(m, k, base.seed);
    add("binary_mf", k, bin.w, bin.h, ProductKind::kBoolean);

    PbmfConfig basic = base;
    basic.k = k;
    basic.alpha1 = basic.alpha2 = basic.alpha3 = 0;
    basic.use_weights = false;
    auto fb = factorize_best_of(a, basic, options.restarts, observer);
    add("pbmf_basic", k, fb.model.dictionary, fb.encoding.matrix, ProductKind::kPseudoBoolean);

    PbmfConfig uniform = base;
    uniform.k = k;
    uniform.use_weights = false;
    auto fu = factorize_best_of(a, uniform, options.restarts, observer);
    add("pbmf_full_uniform", k, fu.model.dictionary, fu.encoding.matrix,
        ProductKind::kPseudoBoolean);

    PbmfConfig full = base;
    full.k = k;
    full.use_weights = true;
    auto ff = factorize_best_of(a, full, options.restarts, observer);
    add("pbmf_full", k, ff.model.dictionary, ff.encoding.matrix, ProductKind::kPseudoBoolean);
  }
  return rows;
}

std::string recon_study_csv(const std::vector<ReconRow>& rows) {
  std::ostringstream out;
  out << "method,k,error_unweighted,error_weighted\n";
  for (const auto& r : rows)
    out << r.method << ',' << r.k << ',' << format_double(r.unweighted) << ','
        << format_double(r.weighted) << '\n';
  return out.str();
}

}  // namespace scenarios
