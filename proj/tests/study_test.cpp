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

#include "fixtures.hpp"
#include "scenarios/baselines.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

namespace scenarios {
namespace {

TEST(ReconStudy, CoversEveryMethodAndRank) {
  auto a = testing::labelled(testing::random_binary(12, 40, 0.3, 1));
  PbmfConfig base;
  base.max_outer_iters = 40;
  ReconStudyOptions options;
  options.nmf_iters = 100;
  auto rows = recon_study(a, {2, 4}, base, options);

  std::map<std::string, std::set<std::size_t>> seen;
  for (const auto& r : rows) {
    seen[r.method].insert(r.k);
    EXPECT_GE(r.weighted, r.unweighted - 1e-12) << r.method;  // weights are >= 1
  }
  EXPECT_EQ(seen["zeros"], std::set<std::size_t>{0});
  EXPECT_EQ(seen["mean"], std::set<std::size_t>{0});
  for (const char* m : {"truncated_svd", "nmf", "greedy_bmf", "binary_mf", "pbmf_basic",
                        "pbmf_full_uniform", "pbmf_full"})
    EXPECT_EQ(seen[m], (std::set<std::size_t>{2, 4})) << m;

  auto trivial = trivial_baselines(a.matrix);
  for (const auto& r : rows) {
    if (r.method == "zeros") EXPECT_EQ(r.unweighted, trivial.zeros);
    if (r.method == "mean") EXPECT_NEAR(r.unweighted, trivial.mean, 1e-9);
    if (r.method == "truncated_svd")
      for (const auto& other : rows)
        if (other.k == r.k && other.method != r.method)
          EXPECT_LE(r.unweighted, other.unweighted + 1e-9) << other.method << " k " << r.k;
  }
}

TEST(ReconStudy, CsvLayout) {
  std::vector<ReconRow> rows{{"zeros", 0, 12, 30.5}, {"nmf", 3, 1.25, 2.5}};
  const auto csv = recon_study_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,k,error_unweighted,error_weighted");
  EXPECT_NE(csv.find("nmf,3,1.25,2.5"), std::string::npos);
}

}  // namespace
}  // namespace scenarios
