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

#pragma once

#include "scenarios/matrix.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scenarios {

enum class ProductKind { kReal, kPseudoBoolean, kBoolean };

ProductKind parse_product_kind(const std::string& text);
std::string to_string(ProductKind kind);

// Squared Frobenius norm of the (optionally Omega-weighted) residual
// A - product(W, H). The Boolean product is min(WH, 1), which is the usual
// OR-of-ANDs on binary factors.
double reconstruction_error(const Matrix& a, const Matrix& w, const Matrix& h,
                            const Matrix* omega, ProductKind kind);

// Step-wise average precision over the ranking by descending score; equal
// scores keep input order.
double average_precision(std::span<const double> scores, std::span<const double> labels);

struct PrPoint {
  double recall;
  double precision;
};
std::vector<PrPoint> precision_recall_curve(std::span<const double> scores,
                                            std::span<const double> labels);

struct MacroAuprc {
  double value = 0;
  std::size_t evaluated = 0;
  std::vector<Eigen::Index> skipped;  // rows without positives
};

// Mean AP over rows (objects); rows with no positive label are skipped.
MacroAuprc macro_auprc(const Matrix& scores, const Matrix& labels);

template <typename T>
double accuracy(std::span<const T> predictions, std::span<const T> labels) {
  if (predictions.size() != labels.size())
    throw DimensionError("accuracy: predictions and labels differ in length");
  if (labels.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

inline double accuracy(const std::vector<std::string>& predictions,
                       const std::vector<std::string>& labels) {
  return accuracy<std::string>(std::span<const std::string>(predictions),
                               std::span<const std::string>(labels));
}

}  // namespace scenarios
