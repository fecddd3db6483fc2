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

#include "scenarios/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace scenarios {

using nlohmann::json;

namespace {

AnnotatedInstance parse_instance(const json& j) {
  AnnotatedInstance inst;
  inst.id = j.at("id").get<std::string>();
  inst.scene_class = j.at("scene_class").get<std::string>();
  if (j.contains("objects") && !j.at("objects").is_null())
    inst.objects = j.at("objects").get<std::vector<std::string>>();
  if (j.contains("features") && !j.at("features").is_null())
    inst.features = j.at("features").get<std::vector<double>>();
  if (inst.id.empty()) throw std::invalid_argument("empty id");
  return inst;
}

}  // namespace

std::vector<AnnotatedInstance> read_instances_jsonl(std::istream& in) {
  std::vector<AnnotatedInstance> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotatedInstance inst;
    try {
      inst = parse_instance(json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": malformed record (" + e.what() + ")");
    }
    if (!ids.insert(inst.id).second)
      throw std::runtime_error("dataset line " + std::to_string(line_no) + ": duplicate id '" +
                               inst.id + "'");
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<AnnotatedInstance> read_instances_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_instances_jsonl(in);
}

void write_instances_jsonl(std::ostream& out, const std::vector<AnnotatedInstance>& instances) {
  for (const auto& inst : instances) {
    json j;
    j["id"] = inst.id;
    j["scene_class"] = inst.scene_class;
    if (inst.objects) j["objects"] = *inst.objects;
    if (inst.features) j["features"] = *inst.features;
    out << j.dump() << '\n';
  }
}

void write_instances_jsonl(const std::string& path,
                           const std::vector<AnnotatedInstance>& instances) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_instances_jsonl(out, instances);
}

FeatureMatrix read_features_csv(const std::string& path) {
  auto lm = read_labelled_csv(path);
  return FeatureMatrix{lm.matrix.transpose(), std::move(lm.row_labels)};
}

void write_features_csv(const std::string& path, const FeatureMatrix& x) {
  LabelledMatrix lm;
  lm.matrix = x.matrix.transpose();
  lm.row_labels = x.instance_ids;
  for (Eigen::Index f = 0; f < x.matrix.rows(); ++f) lm.col_labels.push_back("f" + std::to_string(f));
  write_labelled_csv(path, lm, "id");
}

void DatasetConfig::validate() const {
  if (!(min_object_frequency > 0 && min_object_frequency < 1))
    throw std::invalid_argument("dataset config: min_object_frequency must lie in (0,1)");
  if (!(test_fraction >= 0 && test_fraction < 1))
    throw std::invalid_argument("dataset config: test_fraction must lie in [0,1)");
}

FeatureMatrix DatasetSplit::annotated_features() const {
  std::unordered_map<std::string, Eigen::Index> col;
  for (std::size_t j = 0; j < ids.size(); ++j) col.emplace(ids[j], static_cast<Eigen::Index>(j));
  std::vector<Eigen::Index> cols;
  for (const auto& id : objects.instance_ids) cols.push_back(col.at(id));
  return FeatureMatrix{features.matrix(Eigen::all, cols), objects.instance_ids};
}

Dataset split_dataset(const std::vector<AnnotatedInstance>& instances, const DatasetConfig& cfg,
                      const std::optional<FeatureMatrix>& external_features) {
  cfg.validate();
  Dataset ds;

  // Stratified split, classes in sorted order.
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) by_class[instances[i].scene_class].push_back(i);
  std::mt19937_64 rng(cfg.split_seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (auto& [cls, rows] : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    std::size_t n_test = cfg.test_per_class;
    if (n_test == 0) {
      n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(rows.size())));
      if (cfg.test_fraction > 0 && rows.size() >= 2) n_test = std::max<std::size_t>(n_test, 1);
    }
    if (n_test >= rows.size())
      throw std::invalid_argument("dataset split: class '" + cls + "' has " +
                                  std::to_string(rows.size()) + " instances, cannot hold out " +
                                  std::to_string(n_test) + " and keep any for training");
    std::size_t n_train = rows.size() - n_test;
    if (cfg.train_per_class > 0) {
      if (cfg.train_per_class > n_train)
        throw std::invalid_argument("dataset split: class '" + cls + "' has only " +
                                    std::to_string(n_train) + " training instances, " +
                                    std::to_string(cfg.train_per_class) + " requested");
      n_train = cfg.train_per_class;
    }
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test),
                      rows.begin() + static_cast<std::ptrdiff_t>(n_test + n_train));
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  // Vocabulary from annotated training instances.
  std::map<std::string, std::size_t> counts;
  std::size_t annotated_train = 0;
  for (auto r : train_rows) {
    const auto& inst = instances[r];
    if (!inst.objects) continue;
    ++annotated_train;
    std::set<std::string> unique(inst.objects->begin(), inst.objects->end());
    for (const auto& o : unique) ++counts[o];
  }
  for (const auto& [name, count] : counts)
    if (static_cast<double>(count) >= cfg.min_object_frequency * static_cast<double>(annotated_train))
      ds.vocabulary.push_back(name);
  std::unordered_map<std::string, Eigen::Index> vocab_index;
  for (std::size_t i = 0; i < ds.vocabulary.size(); ++i)
    vocab_index.emplace(ds.vocabulary[i], static_cast<Eigen::Index>(i));

  std::unordered_map<std::string, Eigen::Index> external_col;
  if (external_features)
    for (std::size_t j = 0; j < external_features->instance_ids.size(); ++j)
      external_col.emplace(external_features->instance_ids[j], static_cast<Eigen::Index>(j));

  // Feature source: external file, then inline features, then object indicators.
  bool inline_features = !instances.empty();
  for (const auto& inst : instances) inline_features = inline_features && inst.features.has_value();
  ds.features_from_objects = !external_features && !inline_features;

  std::set<std::string> warned;
  auto build = [&](const std::vector<std::size_t>& rows, bool is_test) {
    DatasetSplit split;
    const auto vocab = static_cast<Eigen::Index>(ds.vocabulary.size());
    std::vector<std::size_t> annotated;
    for (auto r : rows) {
      split.ids.push_back(instances[r].id);
      split.labels.push_back(instances[r].scene_class);
      if (instances[r].objects) annotated.push_back(r);
    }
    split.objects.object_names = ds.vocabulary;
    split.objects.matrix = Matrix::Zero(vocab, static_cast<Eigen::Index>(annotated.size()));
    for (std::size_t c = 0; c < annotated.size(); ++c) {
      const auto& inst = instances[annotated[c]];
      split.objects.instance_ids.push_back(inst.id);
      split.object_labels.push_back(inst.scene_class);
      for (const auto& o : *inst.objects) {
        auto it = vocab_index.find(o);
        if (it != vocab_index.end()) {
          split.objects.matrix(it->second, static_cast<Eigen::Index>(c)) = 1.0;
        } else if (is_test && !counts.count(o) && warned.insert(o).second) {
          ds.warnings.push_back("object '" + o + "' does not occur in training data; dropped");
        }
      }
    }

    split.features.instance_ids = split.ids;
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (ds.features_from_objects) {
      split.features.matrix = Matrix::Zero(vocab, n);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& inst = instances[rows[j]];
        if (!inst.objects)
          throw std::invalid_argument("instance '" + inst.id +
                                      "' has neither features nor object annotations");
        for (const auto& o : *inst.objects) {
          auto it = vocab_index.find(o);
          if (it != vocab_index.end()) split.features.matrix(it->second, static_cast<Eigen::Index>(j)) = 1.0;
        }
      }
    } else if (external_features) {
      split.features.matrix.resize(external_features->matrix.rows(), n);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        auto it = external_col.find(instances[rows[j]].id);
        if (it == external_col.end())
          throw std::invalid_argument("no features for instance '" + instances[rows[j]].id + "'");
        split.features.matrix.col(static_cast<Eigen::Index>(j)) = external_features->matrix.col(it->second);
      }
    } else {
      const auto dim = static_cast<Eigen::Index>(instances.front().features->size());
      split.features.matrix.resize(dim, n);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& f = *instances[rows[j]].features;
        if (static_cast<Eigen::Index>(f.size()) != dim)
          throw std::invalid_argument("instance '" + instances[rows[j]].id +
                                      "' has a feature vector of the wrong length");
        for (Eigen::Index d = 0; d < dim; ++d)
          split.features.matrix(d, static_cast<Eigen::Index>(j)) = f[static_cast<std::size_t>(d)];
      }
    }
    return split;
  };
  ds.train = build(train_rows, false);
  ds.test = build(test_rows, true);
  return ds;
}

Dataset load_dataset(const std::string& path, const DatasetConfig& cfg,
                     const std::string& features_csv) {
  auto instances = read_instances_jsonl(path);
  std::optional<FeatureMatrix> external;
  if (!features_csv.empty()) external = read_features_csv(features_csv);
  return split_dataset(instances, cfg, external);
}

}  // namespace scenarios
