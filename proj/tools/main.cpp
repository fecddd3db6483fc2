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


// Command-line front end. Every subcommand accepts --config FILE plus one
// flag per setting key; flags override the file.

#include "scenarios/baselines.hpp"
#include "scenarios/classifier.hpp"
#include "scenarios/dataset.hpp"
#include "scenarios/evalkit.hpp"
#include "scenarios/head.hpp"
#include "scenarios/pbmf.hpp"
#include "scenarios/pipeline.hpp"
#include "scenarios/retrieval.hpp"
#include "scenarios/serialize.hpp"
#include "scenarios/settings.hpp"
#include "scenarios/study.hpp"
#include "scenarios/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace scenarios;

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::string config;
  std::map<std::string, std::string> flags;
  std::string out;

  Settings settings() const {
    Settings s = config.empty() ? Settings{} : Settings::read(config);
    for (const auto& [key, value] : flags)
      if (!value.empty()) s.set(key, value);
    return s;
  }
};

Command& add_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands,
                     const std::string& name, const std::string& help) {
  commands.push_back(std::make_unique<Command>());
  auto& c = *commands.back();
  c.app = root.add_subcommand(name, help);
  c.app->add_option("--config", c.config, "key = value settings file")->check(CLI::ExistingFile);
  c.app->add_option("--out", c.out, "output path (stdout when omitted)");
  for (const auto& info : known_settings())
    c.app->add_option("--" + info.key, c.flags[info.key], info.help)->group("Settings");
  return c;
}

void emit(const Command& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  if (auto parent = fs::path(c.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(c.out);
  if (!out) throw std::runtime_error("cannot open " + c.out + " for writing");
  out << text;
}

void emit(const Command& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

Dataset dataset_from(const Settings& s) {
  const auto path = s.get_string("dataset", "");
  if (path.empty()) throw std::invalid_argument("no dataset given (set 'dataset' or --dataset)");
  return load_dataset(path, dataset_config(s), s.get_string("features_csv", ""));
}

// Object-scene matrix from --matrix when given, else the dataset's training split.
ObjectSceneMatrix objects_from(const Settings& s, const std::string& matrix_csv) {
  if (!matrix_csv.empty()) return read_object_scene_csv(matrix_csv);
  return dataset_from(s).train.objects;
}

std::string out_dir_of(const Settings& s) {
  auto dir = s.get_string("out_dir", "");
  if (dir.empty()) throw std::invalid_argument("no output directory (set 'out_dir' or --out_dir)");
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Json loss_summary(const std::vector<double>& h) {
  return Json{{"iterations", h.size()}, {"final", h.empty() ? 0.0 : h.back()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Scenario learning with pseudo-Boolean matrix factorization"};
  root.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  // synth -----------------------------------------------------------------
  auto& synth_cmd = add_command(root, commands, "synth", "generate a planted-scenario dataset");
  synth_cmd.app->callback([&] {
    auto s = synth_cmd.settings();
    auto data = synth(synth_spec(s));
    auto dir = out_dir_of(s);
    write_synth(data, dir);
    emit(synth_cmd, Json{{"dataset", dir + "/dataset.jsonl"},
                         {"ground_truth", dir + "/ground_truth.json"},
                         {"instances", data.instances.size()},
                         {"objects", data.object_names.size()},
                         {"scenarios", data.w_true.cols()}});
  });

  // factorize ---------------------------------------------------------------
  auto& fac_cmd = add_command(root, commands, "factorize", "learn a scenario dictionary");
  std::string fac_matrix;
  fac_cmd.app->add_option("--matrix", fac_matrix, "object-scene CSV instead of the dataset");
  fac_cmd.app->callback([&] {
    auto s = fac_cmd.settings();
    auto a = objects_from(s, fac_matrix);
    auto r = factorize_best_of(a, pbmf_config(s), s.get_size("restarts", 1));
    auto dir = out_dir_of(s);
    save_model(dir + "/model.json", r.model);
    save_encodings(dir + "/encodings.csv", r.encoding);
    save_loss_history(dir + "/loss_history.csv", r.loss_history);
    emit(fac_cmd, Json{{"loss", loss_summary(r.loss_history)},
                       {"converged", r.converged},
                       {"reseeded_columns", r.reseeded_columns},
                       {"model", dir + "/model.json"}});
  });

  // recon-study -------------------------------------------------------------
  auto& study_cmd = add_command(root, commands, "recon-study", "reconstruction error versus k");
  std::string study_matrix, study_ks = "5,10,15,20,25";
  std::size_t study_nmf_iters = 500;
  study_cmd.app->add_option("--matrix", study_matrix, "object-scene CSV instead of the dataset");
  study_cmd.app->add_option("--ks", study_ks, "comma-separated ranks")->capture_default_str();
  study_cmd.app->add_option("--nmf-iters", study_nmf_iters, "NMF iterations")->capture_default_str();
  study_cmd.app->callback([&] {
    auto s = study_cmd.settings();
    std::vector<std::size_t> ks;
    for (const auto& k : split_list(study_ks)) ks.push_back(std::stoul(k));
    ReconStudyOptions opts;
    opts.nmf_iters = study_nmf_iters;
    opts.restarts = s.get_size("restarts", 1);
    auto rows = recon_study(objects_from(s, study_matrix), ks, pbmf_config(s), opts);
    emit(study_cmd, recon_study_csv(rows));
  });

  // encode ------------------------------------------------------------------
  auto& enc_cmd = add_command(root, commands, "encode", "encodings of new instances");
  std::string enc_model, enc_matrix;
  enc_cmd.app->add_option("--model", enc_model, "model.json")->required();
  enc_cmd.app->add_option("--matrix", enc_matrix, "object-scene CSV (default: dataset test split)");
  enc_cmd.app->callback([&] {
    auto s = enc_cmd.settings();
    auto model = load_model(enc_model);
    auto a = enc_matrix.empty() ? dataset_from(s).test.objects : read_object_scene_csv(enc_matrix);
    auto r = encode(a, model);
    LabelledMatrix lm;
    lm.matrix = r.encoding.matrix;
    for (std::size_t i = 0; i < model.k(); ++i) lm.row_labels.push_back("scenario_" + std::to_string(i));
    lm.col_labels = r.encoding.instance_ids;
    std::ostringstream text;
    write_labelled_csv(text, lm, "scenario");
    emit(enc_cmd, text.str());
  });

  // train-head --------------------------------------------------------------
  auto& head_cmd = add_command(root, commands, "train-head", "fit the scenario head");
  std::string head_model;
  head_cmd.app->add_option("--model", head_model, "model.json")->required();
  head_cmd.app->callback([&] {
    auto s = head_cmd.settings();
    auto ds = dataset_from(s);
    auto r = train_head(ds.train.objects, ds.train.annotated_features(), load_model(head_model),
                        train_schedule(s));
    auto dir = out_dir_of(s);
    save_head(dir + "/head.json", r.head);
    save_model(dir + "/model.json", r.model);
    save_loss_history(dir + "/head_loss_history.csv", r.loss_history);
    emit(head_cmd, Json{{"loss", loss_summary(r.loss_history)}, {"head", dir + "/head.json"}});
  });

  // train-classifier --------------------------------------------------------
  auto& clf_cmd = add_command(root, commands, "train-classifier", "fit the scene classifier");
  std::string clf_head;
  clf_cmd.app->add_option("--head", clf_head, "head.json")->required();
  clf_cmd.app->callback([&] {
    auto s = clf_cmd.settings();
    auto ds = dataset_from(s);
    auto head = load_head(clf_head);
    std::vector<double> history;
    auto clf = fit(head_encode(head, ds.train.features.matrix), ds.train.labels, fit_options(s),
                   &history);
    auto dir = out_dir_of(s);
    save_classifier(dir + "/classifier.json", clf);
    double acc = ds.test.ids.empty()
                     ? 0.0
                     : accuracy(predict_labels(clf, head_encode(head, ds.test.features.matrix)),
                                ds.test.labels);
    emit(clf_cmd, Json{{"loss", loss_summary(history)},
                       {"test_accuracy", acc},
                       {"classifier", dir + "/classifier.json"}});
  });

  // joint-finetune ----------------------------------------------------------
  auto& joint_cmd =
      add_command(root, commands, "joint-finetune", "fine-tune head, dictionary and classifier");
  std::string joint_model, joint_head, joint_clf;
  joint_cmd.app->add_option("--model", joint_model, "model.json")->required();
  joint_cmd.app->add_option("--head", joint_head, "head.json")->required();
  joint_cmd.app->add_option("--classifier", joint_clf, "classifier.json")->required();
  joint_cmd.app->callback([&] {
    auto s = joint_cmd.settings();
    auto ds = dataset_from(s);
    auto r = joint_finetune(ds.train.objects, ds.train.annotated_features(),
                            ds.train.object_labels, load_model(joint_model), load_head(joint_head),
                            load_classifier(joint_clf), joint_schedule(s));
    auto dir = out_dir_of(s);
    save_model(dir + "/model.json", r.model);
    save_head(dir + "/head.json", r.head);
    save_classifier(dir + "/classifier.json", r.classifier);
    save_loss_history(dir + "/joint_loss_history.csv", r.loss_history);
    emit(joint_cmd, Json{{"loss", loss_summary(r.loss_history)}});
  });

  // pipeline ----------------------------------------------------------------
  auto& pipe_cmd = add_command(root, commands, "pipeline", "run every phase and write a report");
  pipe_cmd.app->callback([&] {
    auto r = run_pipeline(pipe_cmd.settings());
    emit(pipe_cmd, r.report);
  });

  // explain -----------------------------------------------------------------
  auto& exp_cmd = add_command(root, commands, "explain", "top scenarios behind a prediction");
  std::string exp_model, exp_head, exp_clf, exp_id;
  std::size_t exp_top = 3;
  double exp_threshold = kDefaultMembershipThreshold;
  exp_cmd.app->add_option("--model", exp_model, "model.json")->required();
  exp_cmd.app->add_option("--head", exp_head, "head.json")->required();
  exp_cmd.app->add_option("--classifier", exp_clf, "classifier.json")->required();
  exp_cmd.app->add_option("--id", exp_id, "instance id")->required();
  exp_cmd.app->add_option("--top-n", exp_top, "scenarios to list")->capture_default_str();
  exp_cmd.app->add_option("--membership-threshold", exp_threshold, "minimum W entry of a member")
      ->capture_default_str();
  exp_cmd.app->callback([&] {
    auto s = exp_cmd.settings();
    auto ds = dataset_from(s);
    const FeatureMatrix* x = nullptr;
    Eigen::Index col = -1;
    for (const auto* split : {&ds.train, &ds.test})
      for (std::size_t j = 0; j < split->ids.size(); ++j)
        if (split->ids[j] == exp_id) {
          x = &split->features;
          col = static_cast<Eigen::Index>(j);
        }
    if (!x) throw std::invalid_argument("unknown instance id '" + exp_id + "'");
    auto model = load_model(exp_model);
    auto clf = load_classifier(exp_clf);
    Matrix h = head_encode(load_head(exp_head), x->matrix.col(col));
    auto e = explain(clf, model, h.col(0), exp_top, exp_threshold);
    auto j = to_json(e);
    j["instance_id"] = exp_id;
    j["class_names"] = clf.class_names;
    j["rendering"] = render_explanation(e);
    emit(exp_cmd, j);
  });

  // index -------------------------------------------------------------------
  auto& idx_cmd = add_command(root, commands, "index", "build the content index of the test split");
  std::string idx_model, idx_head, idx_clf;
  idx_cmd.app->add_option("--model", idx_model, "model.json")->required();
  idx_cmd.app->add_option("--head", idx_head, "head.json")->required();
  idx_cmd.app->add_option("--classifier", idx_clf, "classifier.json")->required();
  idx_cmd.app->callback([&] {
    auto s = idx_cmd.settings();
    if (idx_cmd.out.empty()) throw std::invalid_argument("index needs --out");
    auto ds = dataset_from(s);
    auto index = build_index(load_model(idx_model), load_head(idx_head), load_classifier(idx_clf),
                             ds.test.features, index_thresholds(s));
    save_index(idx_cmd.out, index);
    std::cout << Json{{"records", index.size()}, {"index", idx_cmd.out}}.dump(2) << '\n';
  });

  // query -------------------------------------------------------------------
  auto& q_cmd = add_command(root, commands, "query", "run a conjunctive query");
  std::string q_index, q_classes, q_scenarios, q_has, q_not;
  std::size_t q_top = 10;
  q_cmd.app->add_option("--index", q_index, "index.jsonl")->required();
  q_cmd.app->add_option("--class", q_classes, "classes, OR-ed (comma-separated)");
  q_cmd.app->add_option("--has-scenario", q_scenarios, "required scenario indices");
  q_cmd.app->add_option("--has-object", q_has, "required objects");
  q_cmd.app->add_option("--not-object", q_not, "excluded objects");
  q_cmd.app->add_option("--top-k", q_top, "results to return")->capture_default_str();
  q_cmd.app->callback([&] {
    Query q;
    for (const auto& c : split_list(q_classes)) q.classes.insert(c);
    for (const auto& sc : split_list(q_scenarios)) q.required_scenarios.insert(std::stoul(sc));
    for (const auto& o : split_list(q_has)) q.required_objects.insert(o);
    for (const auto& o : split_list(q_not)) q.excluded_objects.insert(o);
    auto index = load_index(q_index);
    Json hits = Json::array();
    for (const auto& h : execute(index, q, q_top))
      hits.push_back({{"instance_id", h.instance_id}, {"score", h.score}});
    emit(q_cmd, Json{{"query", to_json(q)}, {"hits", hits}});
  });

  // compare -----------------------------------------------------------------
  auto& cmp_cmd =
      add_command(root, commands, "compare", "shared and distinct scenarios of two instances");
  std::string cmp_index, cmp_a, cmp_b;
  cmp_cmd.app->add_option("--index", cmp_index, "index.jsonl")->required();
  cmp_cmd.app->add_option("--a", cmp_a, "first instance id")->required();
  cmp_cmd.app->add_option("--b", cmp_b, "second instance id")->required();
  cmp_cmd.app->callback([&] {
    auto c = compare(load_index(cmp_index), cmp_a, cmp_b);
    emit(cmp_cmd, Json{{"a", cmp_a},
                       {"b", cmp_b},
                       {"class_a", c.class_a},
                       {"class_b", c.class_b},
                       {"shared_scenarios", c.shared_scenarios},
                       {"only_a", c.only_a},
                       {"only_b", c.only_b}});
  });

  // eval-objects ------------------------------------------------------------
  auto& eo_cmd = add_command(root, commands, "eval-objects", "macro-AUPRC of predicted objects");
  std::string eo_model, eo_head, eo_pr;
  eo_cmd.app->add_option("--model", eo_model, "model.json")->required();
  eo_cmd.app->add_option("--head", eo_head, "head.json")->required();
  eo_cmd.app->add_option("--pr-csv", eo_pr, "dump per-object PR curves (object,recall,precision)");
  eo_cmd.app->callback([&] {
    auto s = eo_cmd.settings();
    auto ds = dataset_from(s);
    auto model = load_model(eo_model);
    const auto& a = ds.test.objects;
    auto aligned = align_objects(a, model.object_names);
    Matrix h = head_encode(load_head(eo_head), ds.test.annotated_features().matrix);
    Matrix scores = pseudo_boolean_product(model.dictionary, h);
    auto m = macro_auprc(scores, aligned.matrix);
    if (!eo_pr.empty()) {
      std::ofstream pr(eo_pr);
      if (!pr) throw std::runtime_error("cannot open " + eo_pr + " for writing");
      pr << "object,recall,precision\n";
      for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        if (aligned.matrix.row(i).sum() == 0) continue;
        Vector sc = scores.row(i).transpose();
        Vector lb = aligned.matrix.row(i).transpose();
        for (const auto& p : precision_recall_curve({sc.data(), static_cast<std::size_t>(sc.size())},
                                                    {lb.data(), static_cast<std::size_t>(lb.size())}))
          pr << model.object_names[static_cast<std::size_t>(i)] << ',' << format_double(p.recall)
             << ',' << format_double(p.precision) << '\n';
      }
    }
    Json skipped = Json::array();
    for (auto i : m.skipped) skipped.push_back(model.object_names[static_cast<std::size_t>(i)]);
    emit(eo_cmd, Json{{"macro_auprc", m.value},
                      {"evaluated", m.evaluated},
                      {"skipped", skipped},
                      {"mean_prevalence", aligned.matrix.mean()}});
  });

  // eval-retrieval ----------------------------------------------------------
  auto& er_cmd = add_command(root, commands, "eval-retrieval", "NDCG of generated queries");
  std::string er_index;
  er_cmd.app->add_option("--index", er_index, "index.jsonl")->required();
  er_cmd.app->callback([&] {
    auto s = er_cmd.settings();
    auto ds = dataset_from(s);
    const auto& t = ds.test;
    auto full = load_index(er_index);
    ContentIndex index = full;
    index.records.clear();
    for (const auto& id : t.objects.instance_ids) index.records.push_back(full.find(id));
    const auto k = s.get_size("ndcg_k", 5);
    const auto seed = s.get_u64("query_seed", 0);
    auto queries = generate_queries(t.objects, t.object_labels, s.get_size("n_queries", 500), seed);
    auto model = evaluate_ndcg(index, queries.queries, t.objects, t.object_labels, k);
    auto random = evaluate_random_ndcg(queries.queries, t.objects, t.object_labels, seed, k);
    emit(er_cmd, Json{{"k", k},
                      {"ndcg", model.mean},
                      {"random", random.mean},
                      {"queries", queries.queries.size()},
                      {"skipped", queries.skipped}});
  });

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return root.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
