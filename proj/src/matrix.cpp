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

#include "scenarios/matrix.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace scenarios {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

const std::string& csv_label(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw std::invalid_argument("csv label contains a separator: '" + s + "'");
  return s;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::runtime_error("csv: row " + std::to_string(i + 1) + " has " +
                               std::to_string(rows[i].size()) + " fields, expected " +
                               std::to_string(rows[0].size()));
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::runtime_error("not a number: '" + std::string(text) + "'");
  return v;
}

void ObjectSceneMatrix::validate() const {
  if (static_cast<std::size_t>(matrix.rows()) != object_names.size())
    throw std::invalid_argument("object-scene matrix: " + std::to_string(matrix.rows()) +
                                " rows but " + std::to_string(object_names.size()) +
                                " object names");
  if (static_cast<std::size_t>(matrix.cols()) != instance_ids.size())
    throw std::invalid_argument("object-scene matrix: " + std::to_string(matrix.cols()) +
                                " columns but " + std::to_string(instance_ids.size()) +
                                " instance ids");
  std::unordered_set<std::string> seen;
  for (const auto& name : object_names)
    if (!seen.insert(name).second)
      throw std::invalid_argument("object-scene matrix: duplicate object name '" + name + "'");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      double v = matrix(i, j);
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("object-scene matrix: entry (" + object_names[i] + ", " +
                                    instance_ids[j] + ") is not binary");
    }
}

Eigen::Index ObjectSceneMatrix::object_index(const std::string& name) const {
  auto it = std::find(object_names.begin(), object_names.end(), name);
  return it == object_names.end() ? -1 : std::distance(object_names.begin(), it);
}

ObjectSceneMatrix ObjectSceneMatrix::select_instances(
    const std::vector<Eigen::Index>& columns) const {
  ObjectSceneMatrix out;
  out.object_names = object_names;
  out.matrix.resize(matrix.rows(), static_cast<Eigen::Index>(columns.size()));
  out.instance_ids.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.matrix.col(static_cast<Eigen::Index>(c)) = matrix.col(columns[c]);
    out.instance_ids.push_back(instance_ids[columns[c]]);
  }
  return out;
}

Matrix read_matrix_csv(std::istream& in, bool has_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool skip = has_header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (skip) {
      skip = false;
      continue;
    }
    std::vector<double> row;
    for (const auto& f : split_csv_line(line)) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  return rows_to_matrix(rows);
}

Matrix read_matrix_csv(const std::string& path, bool has_header) {
  auto in = open_in(path);
  return read_matrix_csv(in, has_header);
}

void write_matrix_csv(std::ostream& out, const Matrix& m, bool with_header) {
  if (with_header) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << 'c' << j;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m, bool with_header) {
  auto out = open_out(path);
  write_matrix_csv(out, m, with_header);
}

LabelledMatrix read_labelled_csv(std::istream& in) {
  LabelledMatrix result;
  std::string line;
  bool header = true;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (header) {
      result.col_labels.assign(fields.begin() + (fields.empty() ? 0 : 1), fields.end());
      header = false;
      continue;
    }
    if (fields.size() != result.col_labels.size() + 1)
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(result.col_labels.size() + 1) + " fields, got " +
                               std::to_string(fields.size()));
    result.row_labels.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) row.push_back(parse_double(fields[j]));
    rows.push_back(std::move(row));
  }
  result.matrix = rows_to_matrix(rows);
  if (rows.empty()) result.matrix.resize(0, static_cast<Eigen::Index>(result.col_labels.size()));
  return result;
}

LabelledMatrix read_labelled_csv(const std::string& path) {
  auto in = open_in(path);
  return read_labelled_csv(in);
}

void write_labelled_csv(std::ostream& out, const LabelledMatrix& m, const std::string& corner) {
  out << csv_label(corner);
  for (const auto& c : m.col_labels) out << ',' << csv_label(c);
  out << '\n';
  for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
    out << csv_label(m.row_labels[i]);
    for (Eigen::Index j = 0; j < m.matrix.cols(); ++j) out << ',' << format_double(m.matrix(i, j));
    out << '\n';
  }
}

void write_labelled_csv(const std::string& path, const LabelledMatrix& m,
                        const std::string& corner) {
  auto out = open_out(path);
  write_labelled_csv(out, m, corner);
}

ObjectSceneMatrix read_object_scene_csv(std::istream& in) {
  auto lm = read_labelled_csv(in);
  ObjectSceneMatrix a{std::move(lm.matrix), std::move(lm.row_labels), std::move(lm.col_labels)};
  a.validate();
  return a;
}

ObjectSceneMatrix read_object_scene_csv(const std::string& path) {
  auto in = open_in(path);
  return read_object_scene_csv(in);
}

void write_object_scene_csv(std::ostream& out, const ObjectSceneMatrix& a) {
  write_labelled_csv(out, LabelledMatrix{a.matrix, a.object_names, a.instance_ids}, "object");
}

void write_object_scene_csv(const std::string& path, const ObjectSceneMatrix& a) {
  auto out = open_out(path);
  write_object_scene_csv(out, a);
}

}  // namespace scenarios
