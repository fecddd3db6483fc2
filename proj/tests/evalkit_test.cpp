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


#include "scenarios/evalkit.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

namespace scenarios {
namespace {

using testing::random_binary;
using testing::random_uniform;

using Vec = std::vector<double>;

TEST(Reconstruction, ExactFactorizationIsZero) {
  Matrix w{{1, 0}, {0, 1}, {1, 1}};
  Matrix h{{1, 0, 1}, {0, 1, 0}};
  const Matrix a = w * h;
  for (auto kind : {ProductKind::kReal, ProductKind::kPseudoBoolean, ProductKind::kBoolean})
    EXPECT_EQ(reconstruction_error(a, w, h, nullptr, kind), 0.0);
}

TEST(Reconstruction, ZeroFactorsCountOnes) {
  const Matrix a = random_binary(6, 9, 0.4, 1);
  EXPECT_EQ(reconstruction_error(a, Matrix::Zero(6, 2), Matrix::Zero(2, 9), nullptr,
                                 ProductKind::kPseudoBoolean),
            a.sum());
}

TEST(Reconstruction, KindsAgreeBelowOne) {
  Matrix w = Matrix::Zero(8, 3);
  for (Eigen::Index i = 0; i < 8; ++i) w(i, i % 3) = 1;
  const Matrix h = random_binary(3, 10, 0.5, 2);
  const Matrix a = random_binary(8, 10, 0.4, 3);
  ASSERT_LE((w * h).maxCoeff(), 1.0);
  const double boolean = reconstruction_error(a, w, h, nullptr, ProductKind::kBoolean);
  EXPECT_EQ(reconstruction_error(a, w, h, nullptr, ProductKind::kPseudoBoolean), boolean);
  EXPECT_EQ(reconstruction_error(a, w, h, nullptr, ProductKind::kReal), boolean);
}

TEST(Reconstruction, ProductsDifferAboveOne) {
  const Matrix w = Matrix::Ones(1, 2);
  const Matrix h = Matrix::Ones(2, 1);
  const Matrix a = Matrix::Ones(1, 1);
  EXPECT_EQ(reconstruction_error(a, w, h, nullptr, ProductKind::kReal), 1.0);
  EXPECT_EQ(reconstruction_error(a, w, h, nullptr, ProductKind::kBoolean), 0.0);
  EXPECT_NEAR(reconstruction_error(a, w, h, nullptr, ProductKind::kPseudoBoolean), 0.02 * 0.02,
              1e-15);
}

TEST(Reconstruction, WeightsScaleResidual) {
  const Matrix a = Matrix::Ones(2, 2);
  const Matrix omega{{2, 1}, {1, 3}};
  EXPECT_EQ(reconstruction_error(a, Matrix::Zero(2, 1), Matrix::Zero(1, 2), &omega,
                                 ProductKind::kReal),
            4.0 + 1 + 1 + 9);
  const Matrix bad = Matrix::Ones(3, 2);
  EXPECT_THROW(reconstruction_error(a, Matrix::Zero(2, 1), Matrix::Zero(1, 2), &bad,
                                    ProductKind::kReal),
               DimensionError);
  EXPECT_THROW(reconstruction_error(a, Matrix::Zero(3, 1), Matrix::Zero(1, 2), nullptr,
                                    ProductKind::kReal),
               DimensionError);
}

TEST(ProductKindNames, RoundTrip) {
  for (auto kind : {ProductKind::kReal, ProductKind::kPseudoBoolean, ProductKind::kBoolean})
    EXPECT_EQ(parse_product_kind(to_string(kind)), kind);
  EXPECT_THROW(parse_product_kind("fuzzy"), std::invalid_argument);
}

TEST(AveragePrecision, PerfectRanking) {
  EXPECT_EQ(average_precision(Vec{0.9, 0.8, 0.3, 0.1}, Vec{1, 1, 0, 0}), 1.0);
}

TEST(AveragePrecision, HandWorkedExample) {
  // Hits at ranks 1 and 3: (1/1 + 2/3) / 2.
  EXPECT_NEAR(average_precision(Vec{0.9, 0.8, 0.1}, Vec{1, 0, 1}), 5.0 / 6.0, 1e-15);
}

TEST(AveragePrecision, RandomScoresApproachPrevalence) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t n = 1000;
  const double p = 0.1;
  Vec labels(n, 0);
  for (std::size_t i = 0; i < n * p; ++i) labels[i] = 1;
  double total = 0;
  const int trials = 10000;
  Vec scores(n);
  for (int t = 0; t < trials; ++t) {
    for (auto& s : scores) s = u(rng);
    total += average_precision(scores, labels);
  }
  EXPECT_NEAR(total / trials, p, 0.02);
}

TEST(AveragePrecision, Errors) {
  EXPECT_THROW(average_precision(Vec{0.5}, Vec{1, 0}), DimensionError);
  EXPECT_THROW(average_precision(Vec{0.5, 0.4}, Vec{0, 0}), std::invalid_argument);
}

TEST(PrCurve, StepsThroughRanking) {
  auto curve = precision_recall_curve(Vec{0.9, 0.8, 0.1}, Vec{1, 0, 1});
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].recall, 0.5);
  EXPECT_EQ(curve[0].precision, 1.0);
  EXPECT_EQ(curve[1].recall, 0.5);
  EXPECT_EQ(curve[1].precision, 0.5);
  EXPECT_EQ(curve[2].recall, 1.0);
  EXPECT_NEAR(curve[2].precision, 2.0 / 3.0, 1e-15);
}

TEST(MacroAuprc, ScoresEqualLabels) {
  const Matrix labels = random_binary(10, 30, 0.3, 5);
  auto m = macro_auprc(labels, labels);
  EXPECT_EQ(m.value, 1.0);
  EXPECT_EQ(m.evaluated, 10u);
}

TEST(MacroAuprc, MeanOfRowsAndOrderFree) {
  Matrix labels = random_binary(8, 25, 0.3, 6);
  labels.row(3).setZero();
  const Matrix scores = random_uniform(8, 25, 0, 1, 7);
  auto m = macro_auprc(scores, labels);
  ASSERT_EQ(m.skipped, std::vector<Eigen::Index>{3});
  double sum = 0;
  for (Eigen::Index i = 0; i < 8; ++i) {
    if (i == 3) continue;
    Vector s = scores.row(i).transpose(), l = labels.row(i).transpose();
    sum += average_precision(std::span<const double>(s.data(), 25),
                             std::span<const double>(l.data(), 25));
  }
  EXPECT_NEAR(m.value, sum / 7, 1e-15);

  const std::vector<Eigen::Index> rows{7, 2, 5, 0, 3, 1, 6, 4};
  EXPECT_NEAR(macro_auprc(scores(rows, Eigen::all), labels(rows, Eigen::all)).value, m.value,
              1e-15);
  EXPECT_THROW(macro_auprc(scores, Matrix::Zero(8, 25)), std::invalid_argument);
  EXPECT_THROW(macro_auprc(scores, labels.leftCols(3)), DimensionError);
}

TEST(Accuracy, Basics) {
  std::vector<std::string> a{"x", "y", "z"};
  std::vector<std::string> b{"p", "q", "r"};
  EXPECT_EQ(accuracy(a, a), 1.0);
  EXPECT_EQ(accuracy(a, b), 0.0);
  EXPECT_THROW(accuracy(a, std::vector<std::string>{"x"}), DimensionError);
  EXPECT_THROW(accuracy(std::vector<std::string>{}, std::vector<std::string>{}),
               std::invalid_argument);
}

TEST(Accuracy, MatchesLoop) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<int> p(500), l(500);
  int hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = pick(rng);
    l[i] = pick(rng);
    hits += p[i] == l[i];
  }
  EXPECT_EQ(accuracy<int>(p, l), hits / 500.0);
}

}  // namespace
}  // namespace scenarios
