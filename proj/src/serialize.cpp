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


#include "scenarios/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scenarios {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

void check_csv_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw std::invalid_argument("csv field contains a separator: '" + s + "'");
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("ragged matrix in json");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

Json to_json(const PbmfConfig& cfg) {
  return Json{{"k", cfg.k},
              {"alpha1", cfg.alpha1},
              {"alpha2", cfg.alpha2},
              {"alpha3", cfg.alpha3},
              {"use_weights", cfg.use_weights},
              {"weight_scheme", to_string(cfg.weight_scheme)},
              {"max_outer_iters", cfg.max_outer_iters},
              {"inner_steps", cfg.inner_steps},
              {"step_size", cfg.step_size},
              {"backtrack_factor", cfg.backtrack_factor},
              {"tol", cfg.tol},
              {"seed", cfg.seed},
              {"init_iters", cfg.init_iters}};
}

PbmfConfig pbmf_config_from_json(const Json& j) {
  PbmfConfig cfg;
  cfg.k = j.at("k").get<std::size_t>();
  cfg.alpha1 = j.at("alpha1").get<double>();
  cfg.alpha2 = j.at("alpha2").get<double>();
  cfg.alpha3 = j.at("alpha3").get<double>();
  cfg.use_weights = j.at("use_weights").get<bool>();
  cfg.weight_scheme = parse_weight_scheme(j.at("weight_scheme").get<std::string>());
  cfg.max_outer_iters = j.at("max_outer_iters").get<std::size_t>();
  cfg.inner_steps = j.at("inner_steps").get<std::size_t>();
  cfg.step_size = j.at("step_size").get<double>();
  cfg.backtrack_factor = j.at("backtrack_factor").get<double>();
  cfg.tol = j.at("tol").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.init_iters = j.at("init_iters").get<std::size_t>();
  return cfg;
}

Json to_json(const ScenarioModel& model) {
  return Json{{"object_names", model.object_names},
              {"k", model.k()},
              {"config", to_json(model.config)},
              {"dictionary", matrix_to_json(model.dictionary)},
              {"object_weights", vector_to_json(model.object_weights)}};
}

ScenarioModel model_from_json(const Json& j) {
  ScenarioModel model;
  model.object_names = j.at("object_names").get<std::vector<std::string>>();
  model.config = pbmf_config_from_json(j.at("config"));
  model.dictionary = matrix_from_json(j.at("dictionary"));
  if (j.contains("object_weights")) {
    model.object_weights = vector_from_json(j.at("object_weights"));
  } else {
    model.object_weights = Vector::Ones(static_cast<Eigen::Index>(model.object_names.size()));
  }
  const auto k = j.at("k").get<std::size_t>();
  if (static_cast<std::size_t>(model.dictionary.rows()) != model.object_names.size() ||
      model.k() != k || model.object_weights.size() != model.dictionary.rows())
    throw std::invalid_argument("model json: inconsistent shapes");
  return model;
}

void save_model(const std::string& path, const ScenarioModel& model) { save_json(path, to_json(model)); }
ScenarioModel load_model(const std::string& path) { return model_from_json(load_json(path)); }

Json to_json(const ScenarioHead& head) {
  return Json{{"weights", matrix_to_json(head.weights)}, {"bias", vector_to_json(head.bias)}};
}

ScenarioHead head_from_json(const Json& j) {
  ScenarioHead head{matrix_from_json(j.at("weights")), vector_from_json(j.at("bias"))};
  if (head.bias.size() != head.weights.rows())
    throw std::invalid_argument("head json: bias length differs from k");
  return head;
}

void save_head(const std::string& path, const ScenarioHead& head) { save_json(path, to_json(head)); }
ScenarioHead load_head(const std::string& path) { return head_from_json(load_json(path)); }

Json to_json(const SceneClassifier& clf) {
  return Json{{"class_names", clf.class_names},
              {"weights", matrix_to_json(clf.weights)},
              {"bias", vector_to_json(clf.bias)}};
}

SceneClassifier classifier_from_json(const Json& j) {
  SceneClassifier clf{matrix_from_json(j.at("weights")), vector_from_json(j.at("bias")),
                      j.at("class_names").get<std::vector<std::string>>()};
  if (static_cast<std::size_t>(clf.weights.rows()) != clf.classes() ||
      clf.bias.size() != clf.weights.rows())
    throw std::invalid_argument("classifier json: inconsistent shapes");
  return clf;
}

void save_classifier(const std::string& path, const SceneClassifier& clf) {
  save_json(path, to_json(clf));
}
SceneClassifier load_classifier(const std::string& path) {
  return classifier_from_json(load_json(path));
}

Json to_json(const Explanation& e) {
  Json scenarios = Json::array();
  for (const auto& s : e.top_scenarios) {
    Json members = Json::array();
    for (const auto& m : s.members) members.push_back({{"name", m.name}, {"importance", m.importance}});
    scenarios.push_back({{"scenario_index", s.scenario_index},
                         {"encoding_coefficient", s.encoding_coefficient},
                         {"influence_score", s.influence_score},
                         {"members", std::move(members)}});
  }
  return Json{{"predicted_class", e.predicted_class},
              {"class_probabilities", vector_to_json(e.class_probabilities)},
              {"top_scenarios", std::move(scenarios)}};
}

Json to_json(const Query& q) {
  return Json{{"classes", q.classes},
              {"required_scenarios", q.required_scenarios},
              {"required_objects", q.required_objects},
              {"excluded_objects", q.excluded_objects}};
}

Query query_from_json(const Json& j) {
  Query q;
  q.classes = j.at("classes").get<std::set<std::string>>();
  q.required_scenarios = j.at("required_scenarios").get<std::set<std::size_t>>();
  q.required_objects = j.at("required_objects").get<std::set<std::string>>();
  q.excluded_objects = j.at("excluded_objects").get<std::set<std::string>>();
  return q;
}

void save_index(const std::string& path, const ContentIndex& index) {
  auto out = open_out(path);
  Json meta{{"class_names", index.class_names},
            {"object_names", index.object_names},
            {"scenario_theta", index.thresholds.scenario_theta},
            {"object_theta", index.thresholds.object_theta}};
  out << meta.dump() << '\n';
  for (const auto& r : index.records) {
    Json rec{{"instance_id", r.instance_id},
             {"predicted_class", r.predicted_class},
             {"class_probabilities", vector_to_json(r.class_probabilities)},
             {"encoding", vector_to_json(r.encoding)},
             {"object_scores", vector_to_json(r.object_scores)}};
    out << rec.dump() << '\n';
  }
}

ContentIndex load_index(const std::string& path) {
  auto in = open_in(path);
  ContentIndex index;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("index file " + path + " is empty");
  auto meta = Json::parse(line);
  index.class_names = meta.at("class_names").get<std::vector<std::string>>();
  index.object_names = meta.at("object_names").get<std::vector<std::string>>();
  index.thresholds.scenario_theta = meta.at("scenario_theta").get<double>();
  index.thresholds.object_theta = meta.at("object_theta").get<double>();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = Json::parse(line);
      index.records.push_back(IndexRecord{j.at("instance_id").get<std::string>(),
                                          j.at("predicted_class").get<std::string>(),
                                          vector_from_json(j.at("class_probabilities")),
                                          vector_from_json(j.at("encoding")),
                                          vector_from_json(j.at("object_scores"))});
    } catch (const std::exception& e) {
      throw std::runtime_error("index line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return index;
}

void save_encodings(const std::string& path, const EncodingMatrix& h) {
  LabelledMatrix lm;
  lm.matrix = h.matrix;
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) lm.row_labels.push_back("scenario_" + std::to_string(i));
  lm.col_labels = h.instance_ids;
  write_labelled_csv(path, lm, "scenario");
}

EncodingMatrix load_encodings(const std::string& path) {
  auto lm = read_labelled_csv(path);
  return EncodingMatrix{std::move(lm.matrix), std::move(lm.col_labels)};
}

void save_loss_history(const std::string& path, const std::vector<double>& history) {
  auto out = open_out(path);
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << format_double(history[i]) << '\n';
}

std::vector<double> load_loss_history(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != 2) throw std::runtime_error("loss history: malformed row '" + line + "'");
    out.push_back(parse_double(cells[1]));
  }
  return out;
}

void save_predictions(const std::string& path, const std::vector<PredictionRow>& rows) {
  auto out = open_out(path);
  out << "id,label,predicted\n";
  for (const auto& r : rows) {
    check_csv_field(r.id);
    check_csv_field(r.label);
    check_csv_field(r.predicted);
    out << r.id << ',' << r.label << ',' << r.predicted << '\n';
  }
}

std::vector<PredictionRow> load_predictions(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<PredictionRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != 3) throw std::runtime_error("predictions: malformed row '" + line + "'");
    out.push_back({cells[0], cells[1], cells[2]});
  }
  return out;
}

void save_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json load_json(const std::string& path) {
  auto in = open_in(path);
  return Json::parse(in);
}

}  // namespace scenarios
