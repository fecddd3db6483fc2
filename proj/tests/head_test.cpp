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

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenarios/evalkit.hpp"
#include "scenarios/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace scenarios {
namespace {

using testing::labelled;
using testing::random_binary;
using testing::random_uniform;
using testing::relative_error;

TEST(HeadEncode, SigmoidValues) {
  ScenarioHead head{Matrix::Zero(3, 2), Vector::Zero(3)};
  const Matrix x = random_uniform(2, 4, -1, 1, 1);
  EXPECT_TRUE((head_encode(head, x).array() == 0.5).all());
  head.bias.setConstant(30);
  EXPECT_GT(head_encode(head, x).minCoeff(), 0.999);

  head.weights = random_uniform(3, 2, -3, 3, 2);
  head.bias = random_uniform(3, 1, -1, 1, 3).col(0);
  const Matrix h = head_encode(head, x);
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      double z = head.bias(r);
      for (Eigen::Index d = 0; d < 2; ++d) z += head.weights(r, d) * x(d, c);
      EXPECT_NEAR(h(r, c), 1 / (1 + std::exp(-z)), 1e-12);
      EXPECT_GT(h(r, c), 0.0);
      EXPECT_LT(h(r, c), 1.0);
    }
}

TEST(HeadEncode, ForwardKeepsIds) {
  auto head = init_head(2, 3, 4);
  FeatureMatrix x{random_uniform(3, 2, 0, 1, 5), {"a", "b"}};
  auto e = head_forward(head, x);
  EXPECT_EQ(e.instance_ids, x.instance_ids);
  EXPECT_EQ(e.matrix, head_encode(head, x.matrix));
  EXPECT_EQ(init_head(2, 3, 4).weights, head.weights);
}

// Five objects, two scenarios, eight instances with four features. Dictionary
// entries stay below 0.5 so W * H stays on the identity branch of f.
struct SmallFixture {
  Matrix a = random_binary(5, 8, 0.4, 6);
  Matrix x = random_uniform(4, 8, -1, 1, 7);
  Matrix w = random_uniform(5, 2, 0, 0.5, 8);
  ScenarioHead head{random_uniform(2, 4, -1, 1, 9), random_uniform(2, 1, -0.5, 0.5, 10).col(0)};
  Matrix omega = build_weight_matrix(labelled(a)).matrix;
  PbmfConfig cfg = [] {
    PbmfConfig c;
    c.k = 2;
    c.alpha1 = 0.2;
    return c;
  }();
};

TEST(HeadGradient, MatchesFiniteDifferences) {
  SmallFixture s;
  auto g = head_objective(s.a, s.x, s.w, s.head, s.omega, s.cfg);
  auto loss_w = [&](const Matrix& m) {
    ScenarioHead h = s.head;
    h.weights = m;
    return head_objective(s.a, s.x, s.w, h, s.omega, s.cfg).loss;
  };
  auto loss_b = [&](const Matrix& m) {
    ScenarioHead h = s.head;
    h.bias = m.col(0);
    return head_objective(s.a, s.x, s.w, h, s.omega, s.cfg).loss;
  };
  EXPECT_LT(relative_error(g.weights, oracle::central_difference(loss_w, s.head.weights)), 1e-4);
  EXPECT_LT(relative_error(g.bias, oracle::central_difference(loss_b, Matrix(s.head.bias))), 1e-4);
}

TEST(HeadGradient, LossEqualsPbmfLoss) {
  SmallFixture s;
  const Matrix h = head_encode(s.head, s.x);
  EXPECT_NEAR(head_objective(s.a, s.x, s.w, s.head, s.omega, s.cfg).loss,
              oracle::pbmf_objective(s.a, s.w, h, s.omega, s.cfg.alpha1, s.cfg.alpha2,
                                     s.cfg.alpha3),
              1e-10);
}

TEST(JointGradient, MatchesFiniteDifferences) {
  SmallFixture s;
  SceneClassifier clf{random_uniform(3, 2, -1, 1, 11), random_uniform(3, 1, -1, 1, 12).col(0),
                      {"p", "q", "r"}};
  const std::vector<std::size_t> y{0, 1, 2, 0, 1, 2, 0, 1};
  const double lambda = 0.7;
  auto g = joint_objective(s.a, s.x, y, s.w, s.head, clf, s.omega, s.cfg, lambda);
  EXPECT_NEAR(g.loss, g.pbmf + lambda * g.cross_entropy, 1e-12);

  auto with_head = [&](const Matrix& m) {
    ScenarioHead h = s.head;
    h.weights = m;
    return joint_objective(s.a, s.x, y, s.w, h, clf, s.omega, s.cfg, lambda).loss;
  };
  auto with_clf = [&](const Matrix& m) {
    SceneClassifier c = clf;
    c.weights = m;
    return joint_objective(s.a, s.x, y, s.w, s.head, c, s.omega, s.cfg, lambda).loss;
  };
  auto with_clf_bias = [&](const Matrix& m) {
    SceneClassifier c = clf;
    c.bias = m.col(0);
    return joint_objective(s.a, s.x, y, s.w, s.head, c, s.omega, s.cfg, lambda).loss;
  };
  EXPECT_LT(relative_error(g.head_weights, oracle::central_difference(with_head, s.head.weights)),
            1e-4);
  EXPECT_LT(relative_error(g.clf_weights, oracle::central_difference(with_clf, clf.weights)),
            1e-4);
  EXPECT_LT(relative_error(g.clf_bias, oracle::central_difference(with_clf_bias, Matrix(clf.bias))),
            1e-4);

  // Cross-entropy is summed, not averaged.
  const Matrix p = class_probabilities(clf, head_encode(s.head, s.x));
  double ce = 0;
  for (std::size_t j = 0; j < y.size(); ++j)
    ce -= std::log(p(static_cast<Eigen::Index>(y[j]), static_cast<Eigen::Index>(j)));
  EXPECT_NEAR(g.cross_entropy, ce, 1e-12);
}

TEST(BatchedGradient, SumsToFullBatch) {
  const Matrix a = random_binary(12, 97, 0.3, 13);
  const Matrix x = random_uniform(6, 97, -1, 1, 14);
  const Matrix w = random_uniform(12, 3, 0, 1, 15);
  const ScenarioHead head{random_uniform(3, 6, -1, 1, 16), Vector::Zero(3)};
  const Matrix omega = build_weight_matrix(labelled(a)).matrix;
  PbmfConfig cfg;
  cfg.k = 3;
  const Matrix full =
      pbmf_gradients(labelled(a), w, head_encode(head, x), WeightMatrix{omega}, cfg).w;
  for (std::size_t batch : {1u, 10u, 64u, 97u, 500u})
    EXPECT_LE((batched_dictionary_gradient(a, x, w, head, omega, cfg, batch) - full)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10)
        << "batch " << batch;
}

class PlantedHead : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthSpec spec;
    spec.n_objects = 24;
    spec.n_scenarios = 8;
    spec.objects_per_scenario = 3;
    spec.scenarios_per_instance = 2;
    spec.n_instances = 400;
    spec.n_classes = 4;
    spec.scenarios_per_class = 4;
    spec.missing_object_rate = 0;
    spec.flip_noise = 0.01;
    spec.seed = 21;
    data_ = new SynthData(synth(spec));
    PbmfConfig cfg;
    cfg.k = 8;
    factorized_ = new FactorizeResult(factorize_best_of(data_->objects(), cfg, 2));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete factorized_;
  }

  static TrainSchedule schedule() {
    TrainSchedule s;
    s.epochs = 60;
    s.batch_size = 32;
    return s;
  }

  static SynthData* data_;
  static FactorizeResult* factorized_;
};

SynthData* PlantedHead::data_ = nullptr;
FactorizeResult* PlantedHead::factorized_ = nullptr;

TEST_F(PlantedHead, IndicatorFeaturesApproachFactorizeLoss) {
  auto a = data_->objects();
  FeatureMatrix x{a.matrix, a.instance_ids};
  std::size_t outside = 0;
  auto t = train_head(a, x, factorized_->model, schedule(), nullptr, nullptr,
                      [&](const Matrix& w, const Matrix& h) {
                        outside += !(in_unit_box(w) && in_unit_box(h));
                      });
  EXPECT_EQ(outside, 0u);
  ASSERT_FALSE(t.loss_history.empty());
  for (std::size_t i = 1; i < t.loss_history.size(); ++i)
    EXPECT_LE(t.loss_history[i], t.loss_history[i - 1]);
  EXPECT_LE(t.loss_history.back(), 1.25 * factorized_->loss_history.back());
}

TEST_F(PlantedHead, NoDictionaryUpdatesKeepsDictionary) {
  auto a = data_->objects();
  FeatureMatrix x{a.matrix, a.instance_ids};
  auto sched = schedule();
  sched.epochs = 5;
  sched.dict_update_period = kNoDictionaryUpdates;
  auto t = train_head(a, x, factorized_->model, sched);
  EXPECT_EQ(t.model.dictionary, factorized_->model.dictionary);
}

TEST_F(PlantedHead, RegressionFitsTargetWithFixedDictionary) {
  auto a = data_->objects();
  FeatureMatrix x{a.matrix, a.instance_ids};
  auto sched = schedule();
  sched.target = HeadTarget::kRegression;
  const Matrix& target = factorized_->encoding.matrix;
  auto t = train_head(a, x, factorized_->model, sched, nullptr, &target);
  EXPECT_EQ(t.model.dictionary, factorized_->model.dictionary);
  ASSERT_GE(t.loss_history.size(), 2u);
  EXPECT_LT(t.loss_history.back(), t.loss_history.front());
  EXPECT_NEAR(t.loss_history.back(), (head_encode(t.head, x.matrix) - target).squaredNorm(), 1e-9);
  EXPECT_THROW(train_head(a, x, factorized_->model, sched), std::invalid_argument);
}

TEST_F(PlantedHead, JointFinetuneKeepsAccuracy) {
  auto a = data_->objects();
  FeatureMatrix x{a.matrix, a.instance_ids};
  const auto labels = data_->labels();
  auto t = train_head(a, x, factorized_->model, schedule());
  const Matrix h = head_encode(t.head, x.matrix);
  auto clf = fit(h, labels);
  const double before = accuracy(predict_labels(clf, h), labels);

  auto sched = schedule();
  sched.epochs = 10;
  sched.head_lr = 0.5;
  std::size_t outside = 0;
  auto j = joint_finetune(a, x, labels, t.model, t.head, clf, sched,
                          [&](const Matrix& w, const Matrix&) { outside += !in_unit_box(w); });
  EXPECT_EQ(outside, 0u);
  const double after =
      accuracy(predict_labels(j.classifier, head_encode(j.head, x.matrix)), labels);
  EXPECT_GE(after, before - 0.01);

  sched.lambda_ce = 0;
  auto frozen = joint_finetune(a, x, labels, t.model, t.head, clf, sched);
  EXPECT_EQ(frozen.classifier.weights, clf.weights);
  EXPECT_EQ(frozen.classifier.bias, clf.bias);
}

TEST(Schedule, Validation) {
  TrainSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.batch_size = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = TrainSchedule{};
  s.head_lr = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = TrainSchedule{};
  s.dict_update_period = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(TrainHead, MisalignedFeaturesThrow) {
  auto a = labelled(random_binary(5, 6, 0.4, 17));
  ScenarioModel model{random_uniform(5, 2, 0, 1, 18), a.object_names, PbmfConfig{},
                      Vector::Ones(5)};
  model.config.k = 2;
  FeatureMatrix x{random_uniform(3, 6, 0, 1, 19), a.instance_ids};
  x.instance_ids[2] = "other";
  EXPECT_ANY_THROW(train_head(a, x, model, TrainSchedule{}));
}

}  // namespace
}  // namespace scenarios
