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


// JSON and CSV persistence for every trained artifact. Doubles are written
// with round-trip precision so load(save(x)) == x exactly.

#pragma once

#include "scenarios/classifier.hpp"
#include "scenarios/head.hpp"
#include "scenarios/pbmf.hpp"
#include "scenarios/retrieval.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace scenarios {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);  // array of rows
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const PbmfConfig& cfg);
PbmfConfig pbmf_config_from_json(const Json& j);

Json to_json(const ScenarioModel& model);
ScenarioModel model_from_json(const Json& j);
void save_model(const std::string& path, const ScenarioModel& model);
ScenarioModel load_model(const std::string& path);

Json to_json(const ScenarioHead& head);
ScenarioHead head_from_json(const Json& j);
void save_head(const std::string& path, const ScenarioHead& head);
ScenarioHead load_head(const std::string& path);

Json to_json(const SceneClassifier& clf);
SceneClassifier classifier_from_json(const Json& j);
void save_classifier(const std::string& path, const SceneClassifier& clf);
SceneClassifier load_classifier(const std::string& path);

Json to_json(const Explanation& e);

Json to_json(const Query& q);
Query query_from_json(const Json& j);

// First line holds class names, object names and thresholds; one record per
// following line.
void save_index(const std::string& path, const ContentIndex& index);
ContentIndex load_index(const std::string& path);

// Rows "scenario_<i>", one column per instance.
void save_encodings(const std::string& path, const EncodingMatrix& h);
EncodingMatrix load_encodings(const std::string& path);

// Columns: iteration,loss.
void save_loss_history(const std::string& path, const std::vector<double>& history);
std::vector<double> load_loss_history(const std::string& path);

struct PredictionRow {
  std::string id;
  std::string label;
  std::string predicted;
};

// Columns: id,label,predicted.
void save_predictions(const std::string& path, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> load_predictions(const std::string& path);

void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

}  // namespace scenarios
