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


#include "scenarios/pipeline.hpp"

#include "fixtures.hpp"
#include "scenarios/evalkit.hpp"
#include "scenarios/synth.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace scenarios {
namespace {

using testing::TempDir;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("pipeline");
    SynthSpec spec;
    spec.n_objects = 30;
    spec.n_scenarios = 8;
    spec.objects_per_scenario = 3;
    spec.n_instances = 300;
    spec.n_classes = 2;
    spec.scenarios_per_class = 4;
    spec.missing_object_rate = 0;
    spec.seed = 11;
    write_synth(synth(spec), dir_->path().string());
  }
  static void TearDownTestSuite() { delete dir_; }

  static Settings settings(const std::string& out) {
    std::ostringstream text;
    text << "dataset = " << dir_->file("dataset.jsonl") << "\n"
         << "out_dir = " << out << "\n"
         << "k = 8\nrestarts = 1\nmax_outer_iters = 100\nepochs = 10\njoint_epochs = 3\n"
         << "n_queries = 40\ntest_fraction = 0.25\n";
    std::istringstream in(text.str());
    return Settings::parse(in);
  }

  static TempDir* dir_;
};

TempDir* PipelineTest::dir_ = nullptr;

TEST_F(PipelineTest, DeterministicWithAllBlocks) {
  const std::string out1 = dir_->file("run1"), out2 = dir_->file("run2");
  auto a = run_pipeline(settings(out1));
  auto b = run_pipeline(settings(out2));
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_EQ(slurp(out1 + "/report.json"), slurp(out2 + "/report.json"));
  EXPECT_EQ(slurp(out1 + "/index.jsonl"), slurp(out2 + "/index.jsonl"));
  for (const char* block : {"losses", "reconstruction", "accuracy", "macro_auprc", "ndcg"})
    EXPECT_TRUE(a.report.contains(block)) << block;
  EXPECT_EQ(a.report["accuracy"]["final"].get<double>(), a.final_accuracy);
  EXPECT_EQ(a.index.size(), a.dataset.test.ids.size());
}

TEST_F(PipelineTest, ArtifactsAgreeWithResult) {
  const std::string out = dir_->file("run3");
  auto r = run_pipeline(settings(out));
  for (const char* f : {"model.json", "model_factorized.json", "encodings.csv", "loss_history.csv",
                        "head_loss_history.csv", "joint_loss_history.csv", "head.json",
                        "classifier.json", "index.jsonl", "predictions.csv", "report.json"})
    EXPECT_TRUE(std::filesystem::exists(out + "/" + f)) << f;

  auto rows = load_predictions(out + "/predictions.csv");
  ASSERT_EQ(rows.size(), r.dataset.test.ids.size());
  std::vector<std::string> predicted, labels;
  for (const auto& row : rows) {
    predicted.push_back(row.predicted);
    labels.push_back(row.label);
  }
  EXPECT_EQ(accuracy(predicted, labels), r.final_accuracy);
  EXPECT_EQ(load_model(out + "/model.json").dictionary, r.model.dictionary);
  EXPECT_EQ(load_loss_history(out + "/loss_history.csv"), r.factorize_history);
  EXPECT_EQ(load_json(out + "/report.json"), r.report);
}

TEST_F(PipelineTest, FailuresNameThePhase) {
  auto expect_phase = [](const Settings& s, const std::string& phase) {
    try {
      run_pipeline(s);
      FAIL() << "expected failure in " << phase;
    } catch (const PipelineError& e) {
      EXPECT_EQ(e.phase(), phase);
      EXPECT_NE(std::string(e.what()).find("phase '" + phase + "'"), std::string::npos);
    }
  };
  auto s = settings("");
  s.set("k", "500");
  expect_phase(s, "factorize");
  s = settings("");
  s.set("dataset", dir_->file("absent.jsonl"));
  expect_phase(s, "load");
  s = settings("");
  s.set("batch_size", "0");
  expect_phase(s, "config");
  EXPECT_THROW(run_pipeline(dir_->file("absent.conf")), PipelineError);
}

}  // namespace
}  // namespace scenarios
