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

#include "scenarios/evalkit.hpp"

#include <filesystem>
#include <random>
#include <unordered_set>

namespace scenarios {

namespace {

template <typename F>
auto phase(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

Json loss_block(const std::vector<double>& history) {
  return Json{{"iterations", history.size()},
              {"initial", history.empty() ? 0.0 : history.front()},
              {"final", history.empty() ? 0.0 : history.back()}};
}

}  // namespace

PipelineResult run_pipeline(const Settings& settings, const Dataset& dataset,
                            const IterateObserver& observer) {
  const auto cfg = phase("config", [&] { return pbmf_config(settings); });
  const auto sched = phase("config", [&] { return train_schedule(settings); });
  const auto joint = phase("config", [&] { return joint_schedule(settings); });
  const auto fit_opts = phase("config", [&] { return fit_options(settings); });
  const auto thresholds = phase("config", [&] { return index_thresholds(settings); });
  const auto restarts = settings.get_size("restarts", 3);
  const auto n_queries = settings.get_size("n_queries", 500);
  const auto query_seed = settings.get_u64("query_seed", cfg.seed);
  const auto ndcg_k = settings.get_size("ndcg_k", 5);
  const auto out_dir = settings.get_string("out_dir", "");

  PipelineResult r;
  r.dataset = dataset;
  const auto& train = r.dataset.train;
  const auto& test = r.dataset.test;
  if (train.objects.instances() == 0)
    throw PipelineError("load", "no annotated training instances");

  auto fac = phase("factorize",
                   [&] { return factorize_best_of(train.objects, cfg, restarts, observer); });
  const auto x_train_annotated = train.annotated_features();
  auto head = phase("train_head", [&] {
    return train_head(train.objects, x_train_annotated, fac.model, sched, nullptr, nullptr,
                      observer);
  });

  std::vector<double> clf_history;
  auto clf = phase("classifier", [&] {
    return fit(head_encode(head.head, train.features.matrix), train.labels, fit_opts, &clf_history);
  });
  r.phase3_accuracy = phase("classifier", [&] {
    return accuracy(predict_labels(clf, head_encode(head.head, test.features.matrix)), test.labels);
  });

  auto jt = phase("joint_finetune", [&] {
    return joint_finetune(train.objects, x_train_annotated, train.object_labels, head.model,
                          head.head, clf, joint, observer);
  });
  r.model = jt.model;
  r.head = jt.head;
  r.classifier = jt.classifier;
  r.factorize_history = fac.loss_history;
  r.head_history = head.loss_history;
  r.classifier_history = clf_history;
  r.joint_history = jt.loss_history;

  std::vector<PredictionRow> predictions;
  r.index = phase("index", [&] {
    auto index = build_index(r.model, r.head, r.classifier, test.features, thresholds);
    for (std::size_t j = 0; j < test.ids.size(); ++j)
      predictions.push_back({test.ids[j], test.labels[j], index.records[j].predicted_class});
    return index;
  });
  std::vector<std::string> predicted;
  for (const auto& p : predictions) predicted.push_back(p.predicted);
  r.final_accuracy = accuracy(predicted, test.labels);

  Json report;
  phase("evaluate", [&] {
    const auto& w = r.model.dictionary;
    const Matrix omega = model_weights(r.model, train.objects.matrix).matrix;
    report["losses"] = Json{{"factorize", loss_block(fac.loss_history)},
                            {"train_head", loss_block(head.loss_history)},
                            {"classifier", loss_block(clf_history)},
                            {"joint_finetune", loss_block(jt.loss_history)}};
    report["reconstruction"] = Json{
        {"train_unweighted", reconstruction_error(train.objects.matrix, fac.model.dictionary,
                                                  fac.encoding.matrix, nullptr,
                                                  ProductKind::kPseudoBoolean)},
        {"train_weighted", reconstruction_error(train.objects.matrix, fac.model.dictionary,
                                                fac.encoding.matrix, &omega,
                                                ProductKind::kPseudoBoolean)}};
    report["accuracy"] = Json{{"phase3", r.phase3_accuracy},
                              {"final", r.final_accuracy},
                              {"test_instances", test.ids.size()}};

    Json auprc = Json{{"value", nullptr}, {"evaluated", 0}, {"skipped", 0}};
    Json ndcg = Json{{"k", ndcg_k}, {"mean", nullptr}, {"random", nullptr}, {"queries", 0}};
    if (test.objects.instances() > 0) {
      const auto x_test = test.annotated_features();
      const Matrix h_test = head_encode(r.head, x_test.matrix);
      const Matrix scores = pseudo_boolean_product(w, h_test);
      auto m = macro_auprc(scores, test.objects.matrix);
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Matrix random_scores(scores.rows(), scores.cols());
      for (Eigen::Index i = 0; i < random_scores.rows(); ++i)
        for (Eigen::Index j = 0; j < random_scores.cols(); ++j) random_scores(i, j) = u(rng);
      auto rnd = macro_auprc(random_scores, test.objects.matrix);
      auprc = Json{{"value", m.value},
                   {"evaluated", m.evaluated},
                   {"skipped", m.skipped.size()},
                   {"random", rnd.value},
                   {"mean_prevalence", test.objects.matrix.mean()}};
      report["reconstruction"]["test_unweighted"] =
          reconstruction_error(test.objects.matrix, w, h_test, nullptr, ProductKind::kPseudoBoolean);

      std::unordered_set<std::string> annotated(test.objects.instance_ids.begin(),
                                                test.objects.instance_ids.end());
      ContentIndex sub = r.index;
      sub.records.clear();
      for (const auto& rec : r.index.records)
        if (annotated.count(rec.instance_id)) sub.records.push_back(rec);
      auto queries = generate_queries(test.objects, test.object_labels, n_queries, query_seed);
      if (!queries.queries.empty()) {
        auto eval = evaluate_ndcg(sub, queries.queries, test.objects, test.object_labels, ndcg_k);
        auto rnd_eval = evaluate_random_ndcg(queries.queries, test.objects, test.object_labels,
                                             query_seed, ndcg_k);
        ndcg = Json{{"k", ndcg_k},
                    {"mean", eval.mean},
                    {"random", rnd_eval.mean},
                    {"queries", queries.queries.size()},
                    {"skipped", queries.skipped}};
      }
    }
    report["macro_auprc"] = auprc;
    report["ndcg"] = ndcg;
    report["dataset"] = Json{{"vocabulary", r.dataset.vocabulary.size()},
                             {"train_instances", train.ids.size()},
                             {"train_annotated", train.objects.instances()},
                             {"test_instances", test.ids.size()},
                             {"test_annotated", test.objects.instances()},
                             {"warnings", r.dataset.warnings}};
    return 0;
  });
  r.report = report;

  if (!out_dir.empty()) {
    phase("persist", [&] {
      std::filesystem::create_directories(out_dir);
      const auto p = [&](const char* name) { return out_dir + "/" + name; };
      save_model(p("model.json"), r.model);
      save_model(p("model_factorized.json"), fac.model);
      save_encodings(p("encodings.csv"), fac.encoding);
      save_loss_history(p("loss_history.csv"), fac.loss_history);
      save_loss_history(p("head_loss_history.csv"), head.loss_history);
      save_loss_history(p("joint_loss_history.csv"), jt.loss_history);
      save_head(p("head.json"), r.head);
      save_classifier(p("classifier.json"), r.classifier);
      save_index(p("index.jsonl"), r.index);
      save_predictions(p("predictions.csv"), predictions);
      save_json(p("report.json"), r.report);
      return 0;
    });
  }
  return r;
}

PipelineResult run_pipeline(const Settings& settings) {
  const auto path = settings.get_string("dataset", "");
  if (path.empty()) throw PipelineError("load", "no dataset configured");
  auto dataset = phase("load", [&] {
    return load_dataset(path, dataset_config(settings), settings.get_string("features_csv", ""));
  });
  return run_pipeline(settings, dataset);
}

PipelineResult run_pipeline(const std::string& config_file) {
  auto settings = phase("config", [&] { return Settings::read(config_file); });
  return run_pipeline(settings);
}

}  // namespace scenarios
