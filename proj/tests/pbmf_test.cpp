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

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenarios/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace scenarios {
namespace {

using testing::labelled;
using testing::random_binary;
using testing::random_uniform;
using testing::relative_error;

PbmfConfig quiet(std::size_t k) {
  PbmfConfig cfg = PbmfConfig::basic(k);
  cfg.max_outer_iters = 500;
  return cfg;
}

// Records every iterate and checks the box constraint.
struct BoxWatch {
  std::size_t seen = 0;
  std::size_t outside = 0;
  IterateObserver observer() {
    return [this](const Matrix& w, const Matrix& h) {
      ++seen;
      outside += !(in_unit_box(w) && in_unit_box(h));
    };
  }
};

void expect_non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) ASSERT_LE(h[i], h[i - 1]) << "entry " << i;
}

TEST(Weights, AbsentEntriesWeighOne) {
  Matrix a = Matrix::Zero(3, 100);
  a.row(0).head(10).setOnes();
  a.row(1).setOnes();
  a(2, 5) = 1;
  auto omega = build_weight_matrix(labelled(a));
  EXPECT_EQ(omega.matrix(0, 50), 1.0);
  EXPECT_NEAR(omega.matrix(0, 0), 1.0 + std::log(10.0), 1e-12);
  EXPECT_NEAR(omega.matrix(0, 0), 3.3026, 1e-4);
  EXPECT_EQ(omega.matrix(1, 7), 1.0);  // present everywhere
  EXPECT_NEAR(omega.matrix(2, 5), 1.0 + std::log(100.0), 1e-12);
}

TEST(Weights, DatasetRatioIsOneConstant) {
  Matrix a = random_binary(4, 40, 0.3, 1);
  auto omega = build_weight_matrix(labelled(a), WeightScheme::kDatasetRatio);
  const double expected = std::max(1.0 + std::log(40.0 / 4.0), 1.0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      EXPECT_DOUBLE_EQ(omega.matrix(i, j), a(i, j) ? expected : 1.0);
}

TEST(Weights, NeverOccurringObjectIsAnError) {
  Matrix a = Matrix::Zero(2, 3);
  a(0, 0) = 1;
  EXPECT_THROW(object_weights(labelled(a)), std::invalid_argument);
}

TEST(Weights, SchemeNamesRoundTrip) {
  for (auto s : {WeightScheme::kObjectIdf, WeightScheme::kDatasetRatio})
    EXPECT_EQ(parse_weight_scheme(to_string(s)), s);
  EXPECT_THROW(parse_weight_scheme("idf"), std::invalid_argument);
}

TEST(Loss, ZeroAtExactReconstruction) {
  Matrix w{{1, 0}, {0, 1}, {1, 1}};
  Matrix h{{1, 0, 1}, {0, 1, 0}};
  Matrix a = pseudo_boolean_product(w, h);
  ASSERT_TRUE((a.array() <= 1).all());
  auto cfg = PbmfConfig::basic(2);
  EXPECT_EQ(pbmf_loss(labelled(a), w, h, uniform_weights(3, 3), cfg), 0.0);
}

TEST(Loss, OrthogonalityTerm) {
  Matrix disjoint{{1, 0}, {0, 1}, {0, 1}};
  EXPECT_EQ(orthogonality_penalty(disjoint), 0.0);
  Matrix ones = Matrix::Ones(2, 2);
  EXPECT_EQ(orthogonality_penalty(ones), 8.0);
  PbmfConfig cfg = PbmfConfig::basic(2);
  cfg.alpha1 = 0.25;
  auto terms = pbmf_loss_terms(Matrix::Zero(2, 2), ones, Matrix::Zero(2, 2),
                               uniform_weights(2, 2), cfg);
  // f(0) = 0 reconstructs the zero matrix, leaving only the penalty.
  EXPECT_DOUBLE_EQ(terms.total, 8.0 * 0.25);
}

TEST(Loss, MatchesEntrywiseOracle) {
  Matrix a = random_binary(6, 9, 0.4, 2);
  Matrix w = random_uniform(6, 3, 0, 1, 3);
  Matrix h = random_uniform(3, 9, 0, 1, 4);
  auto obj = labelled(a);
  auto omega = build_weight_matrix(obj);
  PbmfConfig cfg;
  cfg.k = 3;
  EXPECT_NEAR(pbmf_loss(obj, w, h, omega, cfg),
              oracle::pbmf_objective(a, w, h, omega.matrix, cfg.alpha1, cfg.alpha2, cfg.alpha3),
              1e-10);
}

TEST(Loss, DimensionMismatchThrows) {
  auto cfg = PbmfConfig::basic(2);
  EXPECT_THROW(pbmf_loss(labelled(Matrix::Ones(3, 3)), Matrix::Ones(3, 2), Matrix::Ones(3, 3),
                         uniform_weights(3, 3), cfg),
               DimensionError);
}

TEST(Gradients, ZeroAtExactReconstruction) {
  Matrix w{{1, 0}, {0, 1}};
  Matrix h{{1, 0, 1}, {0, 1, 1}};
  Matrix a = w * h;
  auto g = pbmf_gradients(labelled(a), w, h, uniform_weights(2, 3), PbmfConfig::basic(2));
  EXPECT_EQ(g.w.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.h.cwiseAbs().maxCoeff(), 0.0);
}

class GradientCheck : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  const std::uint64_t seed = GetParam();
  Matrix a = random_binary(6, 10, 0.4, seed);
  Matrix w, h;
  for (std::uint64_t s = seed;; s += 100) {
    w = random_uniform(6, 3, 0.1, 0.9, s);
    h = random_uniform(3, 10, 0.1, 0.9, s + 1);
    Matrix wh = w * h;
    if ((wh.array() - kPseudoBooleanKink).abs().minCoeff() >= 0.05) break;
  }
  auto obj = labelled(a);
  for (auto scheme : {WeightScheme::kObjectIdf, WeightScheme::kDatasetRatio}) {
    auto omega = build_weight_matrix(obj, scheme);
    PbmfConfig cfg;
    cfg.k = 3;
    cfg.alpha1 = 0.3;
    auto g = pbmf_gradients(obj, w, h, omega, cfg);
    auto fw = [&](const Matrix& x) {
      return oracle::pbmf_objective(a, x, h, omega.matrix, cfg.alpha1, cfg.alpha2, cfg.alpha3);
    };
    auto fh = [&](const Matrix& x) {
      return oracle::pbmf_objective(a, w, x, omega.matrix, cfg.alpha1, cfg.alpha2, cfg.alpha3);
    };
    EXPECT_LT(relative_error(g.w, oracle::central_difference(fw, w)), 1e-5);
    EXPECT_LT(relative_error(g.h, oracle::central_difference(fh, h)), 1e-5);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GradientCheck, ::testing::Values(1, 2, 3, 4));

TEST(Gradients, ColumnPartitionsSum) {
  Matrix a = random_binary(8, 20, 0.3, 5);
  Matrix w = random_uniform(8, 4, 0, 1, 6);
  Matrix h = random_uniform(4, 20, 0, 1, 7);
  auto omega = build_weight_matrix(labelled(a)).matrix;
  const double a1 = 0.1, a2 = 0.01;
  Matrix full = reconstruction_gradient_w(a, w, h, omega) + penalty_gradient_w(w, a1, a2);
  // Uneven partition 3 / 9 / 1 / 7.
  Matrix summed = penalty_gradient_w(w, a1, a2);
  Eigen::Index start = 0;
  for (Eigen::Index len : {3, 9, 1, 7}) {
    summed += reconstruction_gradient_w(a.middleCols(start, len), w, h.middleCols(start, len),
                                        omega.middleCols(start, len));
    start += len;
  }
  EXPECT_LE((full - summed).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Config, Validation) {
  PbmfConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = PbmfConfig{};
  cfg.alpha1 = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = PbmfConfig{};
  cfg.backtrack_factor = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = PbmfConfig{};
  cfg.step_size = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Initialize, InBoxAndDeterministic) {
  auto a = labelled(random_binary(10, 30, 0.3, 8));
  PbmfConfig cfg;
  cfg.k = 4;
  auto x = initialize_factors(a, cfg);
  auto y = initialize_factors(a, cfg);
  EXPECT_TRUE(in_unit_box(x.w));
  EXPECT_TRUE(in_unit_box(x.h));
  EXPECT_EQ(x.w, y.w);
  EXPECT_EQ(x.h, y.h);
  cfg.seed = 1;
  EXPECT_NE(initialize_factors(a, cfg).w, x.w);
}

TEST(Initialize, CloseToNmfOnExactNonnegativeRank) {
  // Nonnegative rank-3 matrix with entries in [0, 1].
  Matrix u = random_uniform(12, 3, 0, 0.6, 9);
  Matrix v = random_uniform(3, 25, 0, 0.55, 10);
  Matrix a = u * v;
  ASSERT_LE(a.maxCoeff(), 1.0);
  ObjectSceneMatrix obj = labelled(a);
  PbmfConfig cfg;
  cfg.k = 3;
  auto x = initialize_factors(obj, cfg);
  const double nmf_error = (a - x.nmf_w * x.nmf_h).squaredNorm();
  const double init_error = (a - pseudo_boolean_product(x.w, x.h)).squaredNorm();
  EXPECT_LE(init_error, 2.0 * nmf_error + 1e-12);
}

TEST(Initialize, RejectsOversizedRank) {
  PbmfConfig cfg;
  cfg.k = 5;
  EXPECT_THROW(initialize_factors(labelled(random_binary(4, 10, 0.5, 1)), cfg),
               std::invalid_argument);
}

TEST(Factorize, BooleanRankTwoToy) {
  auto a = labelled(Matrix{{1, 1, 0}, {1, 1, 1}, {0, 1, 1}});
  EXPECT_EQ(oracle::exhaustive_boolean_error(a.matrix, 1), 2);
  EXPECT_EQ(oracle::exhaustive_boolean_error(a.matrix, 2), 0);
  BoxWatch box;
  auto r = factorize_best_of(a, PbmfConfig::basic(2), 5, box.observer());
  EXPECT_LE(r.loss_history.back(), 0.01);
  EXPECT_EQ(box.outside, 0u);
  expect_non_increasing(r.loss_history);
}

TEST(Factorize, RankEqualToInstancesReachesNearZero) {
  auto a = labelled(random_binary(8, 6, 0.4, 11));
  // W = A, H = I is a feasible certificate of loss 0.
  EXPECT_EQ(pbmf_loss(a, a.matrix, Matrix::Identity(6, 6), uniform_weights(8, 6),
                      PbmfConfig::basic(6)),
            0.0);
  auto r = factorize_best_of(a, quiet(6), 3);
  EXPECT_LE(r.loss_history.back(), 1e-3);
}

TEST(Factorize, MonotoneAndFeasibleOnRandomData) {
  auto a = labelled(random_binary(15, 40, 0.25, 12));
  PbmfConfig cfg;
  cfg.k = 5;
  BoxWatch box;
  auto r = factorize(a, cfg, box.observer());
  EXPECT_GT(box.seen, 0u);
  EXPECT_EQ(box.outside, 0u);
  expect_non_increasing(r.loss_history);
  EXPECT_EQ(r.encoding.instance_ids, a.instance_ids);
  EXPECT_EQ(r.model.object_names, a.object_names);
  // The last recorded loss is the loss of the returned factors.
  auto omega = build_weight_matrix(a);
  EXPECT_NEAR(pbmf_loss(a, r.model.dictionary, r.encoding.matrix, omega, cfg),
              r.loss_history.back(), 1e-9 * r.loss_history.back());
}

TEST(Factorize, Deterministic) {
  auto a = labelled(random_binary(10, 30, 0.3, 13));
  PbmfConfig cfg;
  cfg.k = 3;
  auto x = factorize(a, cfg);
  auto y = factorize(a, cfg);
  EXPECT_EQ(x.model.dictionary, y.model.dictionary);
  EXPECT_EQ(x.encoding.matrix, y.encoding.matrix);
  EXPECT_EQ(x.loss_history, y.loss_history);
}

TEST(Factorize, EquivariantToInstanceOrder) {
  auto a = labelled(random_binary(10, 30, 0.3, 14));
  std::vector<Eigen::Index> perm(30);
  for (Eigen::Index j = 0; j < 30; ++j) perm[static_cast<std::size_t>(j)] = (j * 7) % 30;
  auto b = a.select_instances(perm);
  PbmfConfig cfg;
  cfg.k = 3;
  cfg.max_outer_iters = 20;
  auto x = factorize(a, cfg);
  auto y = factorize(b, cfg);
  EXPECT_LT(relative_error(y.model.dictionary, x.model.dictionary), 1e-8);
  EXPECT_LT(relative_error(y.encoding.matrix, x.encoding.matrix(Eigen::all, perm)), 1e-8);
}

TEST(Factorize, BestOfKeepsLowestLoss) {
  auto a = labelled(random_binary(12, 30, 0.3, 15));
  PbmfConfig cfg;
  cfg.k = 4;
  cfg.max_outer_iters = 30;
  auto best = factorize_best_of(a, cfg, 3);
  for (std::uint64_t s = 0; s < 3; ++s) {
    PbmfConfig run = cfg;
    run.seed = s;
    EXPECT_LE(best.loss_history.back(), factorize(a, run).loss_history.back());
  }
  EXPECT_THROW(factorize_best_of(a, cfg, 0), std::invalid_argument);
}

TEST(Factorize, RecoversPlantedScenarios) {
  SynthSpec spec;
  spec.n_objects = 30;
  spec.n_scenarios = 5;
  spec.objects_per_scenario = 5;
  spec.scenarios_per_instance = 2;
  spec.n_instances = 600;
  spec.missing_object_rate = 0.1;
  spec.flip_noise = 0.01;
  spec.seed = 4;
  auto data = synth(spec);
  PbmfConfig cfg;
  cfg.k = 5;
  auto r = factorize_best_of(data.objects(), cfg, 3);
  auto jac = oracle::matched_jaccard(data.w_true, r.model.dictionary, 0.5);
  for (double j : jac) EXPECT_GE(j, 0.9);
}

TEST(Factorize, ReportsNonFiniteInput) {
  auto a = labelled(random_binary(5, 8, 0.4, 16));
  a.matrix(0, 0) = std::numeric_limits<double>::quiet_NaN();
  PbmfConfig cfg;
  cfg.k = 2;
  cfg.use_weights = false;
  try {
    factorize(a, cfg);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos) << e.what();
  }
}

class EncodeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    a_ = labelled(random_binary(12, 60, 0.3, 17));
    PbmfConfig cfg;
    cfg.k = 3;
    trained_ = factorize_best_of(a_, cfg, 2);
  }
  ObjectSceneMatrix a_;
  FactorizeResult trained_;
};

TEST_F(EncodeTest, TrainingMatrixReachesTrainingLoss) {
  BoxWatch box;
  auto e = encode(a_, trained_.model, box.observer());
  EXPECT_EQ(box.outside, 0u);
  expect_non_increasing(e.loss_history);
  EXPECT_LE(e.loss_history.back(), 1.05 * trained_.loss_history.back());
}

TEST_F(EncodeTest, TrainingColumnMatchesItsResidual) {
  const auto& model = trained_.model;
  const Matrix omega = model_weights(model, a_.matrix).matrix;
  auto column_objective = [&](Eigen::Index col, const Vector& h) {
    Vector fit = (model.dictionary * h).unaryExpr([](double v) { return pseudo_boolean(v); });
    Vector r = omega.col(col).cwiseProduct(a_.matrix.col(col) - fit);
    return r.squaredNorm() + model.config.alpha3 * h.sum();
  };
  for (Eigen::Index col : {0, 17, 42}) {
    auto single = a_.select_instances({col});
    auto e = encode(single, model);
    const double trained = column_objective(col, trained_.encoding.matrix.col(col));
    const double encoded = column_objective(col, e.encoding.matrix.col(0));
    EXPECT_LE(encoded, 1.10 * trained + 1e-9) << "column " << col;
  }
}

TEST_F(EncodeTest, AllZeroInstanceEncodesNearZero) {
  ObjectSceneMatrix zero;
  zero.object_names = a_.object_names;
  zero.instance_ids = {"empty"};
  zero.matrix = Matrix::Zero(a_.objects(), 1);
  auto e = encode(zero, trained_.model);
  EXPECT_LE(e.encoding.matrix.maxCoeff(), 0.05);

  // Grid oracle over [0,1]^3 at resolution 0.01.
  const auto& w = trained_.model.dictionary;
  const double a3 = trained_.model.config.alpha3;
  double best = std::numeric_limits<double>::infinity();
  Vector arg(3);
  for (int x = 0; x <= 100; ++x)
    for (int y = 0; y <= 100; ++y)
      for (int z = 0; z <= 100; ++z) {
        Vector h{{x / 100.0, y / 100.0, z / 100.0}};
        Vector fit = (w * h).unaryExpr([](double v) { return pseudo_boolean(v); });
        double obj = fit.squaredNorm() + a3 * h.sum();
        if (obj < best) {
          best = obj;
          arg = h;
        }
      }
  EXPECT_LE(arg.maxCoeff(), 0.05);
}

TEST_F(EncodeTest, AlignsObjectsByName) {
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = a_.objects() - 1; i >= 0; --i) order.push_back(i);
  ObjectSceneMatrix shuffled;
  shuffled.matrix = a_.matrix(order, Eigen::all);
  for (auto i : order) shuffled.object_names.push_back(a_.object_names[static_cast<std::size_t>(i)]);
  shuffled.instance_ids = a_.instance_ids;
  EXPECT_EQ(encode(shuffled, trained_.model).encoding.matrix,
            encode(a_, trained_.model).encoding.matrix);

  shuffled.object_names[0] = "unicorn";
  try {
    encode(shuffled, trained_.model);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("unicorn"), std::string::npos);
  }
}

}  // namespace
}  // namespace scenarios
