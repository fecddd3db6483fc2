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

#include <numeric>

namespace scenarios {

namespace {

std::vector<std::size_t> ranking(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  return order;
}

std::size_t count_positives(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size())
    throw DimensionError("average_precision: scores and labels differ in length");
  std::size_t positives = 0;
  for (double l : labels) positives += l != 0;
  return positives;
}

}  // namespace

ProductKind parse_product_kind(const std::string& text) {
  if (text == "real") return ProductKind::kReal;
  if (text == "pseudo_boolean") return ProductKind::kPseudoBoolean;
  if (text == "boolean") return ProductKind::kBoolean;
  throw std::invalid_argument("unknown product kind '" + text + "'");
}

std::string to_string(ProductKind kind) {
  switch (kind) {
    case ProductKind::kReal:
      return "real";
    case ProductKind::kPseudoBoolean:
      return "pseudo_boolean";
    case ProductKind::kBoolean:
      return "boolean";
  }
  return "real";
}

double reconstruction_error(const Matrix& a, const Matrix& w, const Matrix& h,
                            const Matrix* omega, ProductKind kind) {
  check_product_dims(w, h, "reconstruction_error");
  if (a.rows() != w.rows() || a.cols() != h.cols())
    throw DimensionError("reconstruction_error: factors do not match A");
  Matrix product = w * h;
  switch (kind) {
    case ProductKind::kReal:
      break;
    case ProductKind::kPseudoBoolean:
      product = product.unaryExpr([](double x) { return pseudo_boolean(x); });
      break;
    case ProductKind::kBoolean:
      product = product.cwiseMin(1.0);
      break;
  }
  Matrix residual = a - product;
  if (omega) {
    if (omega->rows() != a.rows() || omega->cols() != a.cols())
      throw DimensionError("reconstruction_error: weight matrix does not match A");
    residual = residual.cwiseProduct(*omega);
  }
  return residual.squaredNorm();
}

double average_precision(std::span<const double> scores, std::span<const double> labels) {
  const std::size_t positives = count_positives(scores, labels);
  if (positives == 0) throw std::invalid_argument("average_precision: no positive labels");
  double ap = 0;
  std::size_t hits = 0;
  auto order = ranking(scores);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 0) continue;
    ++hits;
    ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return ap / static_cast<double>(positives);
}

std::vector<PrPoint> precision_recall_curve(std::span<const double> scores,
                                            std::span<const double> labels) {
  const std::size_t positives = count_positives(scores, labels);
  if (positives == 0) throw std::invalid_argument("precision_recall_curve: no positive labels");
  std::vector<PrPoint> curve;
  std::size_t hits = 0;
  auto order = ranking(scores);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    hits += labels[order[rank]] != 0;
    curve.push_back({static_cast<double>(hits) / static_cast<double>(positives),
                     static_cast<double>(hits) / static_cast<double>(rank + 1)});
  }
  return curve;
}

MacroAuprc macro_auprc(const Matrix& scores, const Matrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols())
    throw DimensionError("macro_auprc: score and label matrices differ in shape");
  MacroAuprc out;
  double total = 0;
  std::vector<double> s(static_cast<std::size_t>(scores.cols()));
  std::vector<double> l(s.size());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (labels.row(i).cwiseAbs().sum() == 0) {
      out.skipped.push_back(i);
      continue;
    }
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      s[j] = scores(i, j);
      l[j] = labels(i, j);
    }
    total += average_precision(s, l);
    ++out.evaluated;
  }
  if (out.evaluated == 0) throw std::invalid_argument("macro_auprc: no object has positives");
  out.value = total / static_cast<double>(out.evaluated);
  return out;
}

}  // namespace scenarios
