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

#include <Eigen/Dense>

#include <algorithm>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scenarios {

// Row-major dense storage for every matrix in the library (A, W, H, Omega...).
template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using Vector = VectorT<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Slope of the pseudo-Boolean product above the saturation point.
inline constexpr double kPseudoBooleanSlope = 0.01;
// Point where x == 1 + 0.01 x; f is the identity below it.
inline constexpr double kPseudoBooleanKink = 1.0 / (1.0 - kPseudoBooleanSlope);

template <typename Scalar>
inline Scalar pseudo_boolean(Scalar x) {
  return std::min(x, Scalar(1) + Scalar(kPseudoBooleanSlope) * x);
}

// Derivative of pseudo_boolean; slope 1 is used at the kink itself.
template <typename Scalar>
inline Scalar pseudo_boolean_slope(Scalar x) {
  return x <= Scalar(kPseudoBooleanKink) ? Scalar(1) : Scalar(kPseudoBooleanSlope);
}

template <typename DerivedA, typename DerivedB>
void check_product_dims(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b, const char* what) {
  if (a.cols() != b.rows()) {
    throw DimensionError(std::string(what) + ": inner dimensions differ (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

template <typename DerivedA, typename DerivedB>
MatrixT<typename DerivedA::Scalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  check_product_dims(a, b, "matmul");
  return a * b;
}

// f(WH) with f(x) = min(x, 1 + 0.01 x) applied elementwise.
template <typename DerivedW, typename DerivedH>
MatrixT<typename DerivedW::Scalar> pseudo_boolean_product(const Eigen::MatrixBase<DerivedW>& w,
                                                          const Eigen::MatrixBase<DerivedH>& h) {
  using Scalar = typename DerivedW::Scalar;
  check_product_dims(w, h, "pseudo_boolean_product");
  MatrixT<Scalar> out = w * h;
  out = out.unaryExpr([](Scalar x) { return pseudo_boolean(x); });
  return out;
}

// Projection onto the unit box [0,1].
template <typename Derived>
MatrixT<typename Derived::Scalar> clip_unit(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

template <typename Derived>
bool in_unit_box(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 || (m.minCoeff() >= 0 && m.maxCoeff() <= 1);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Binary objects x instances matrix with name registries for both axes.
struct ObjectSceneMatrix {
  Matrix matrix;
  std::vector<std::string> object_names;
  std::vector<std::string> instance_ids;

  Eigen::Index objects() const { return matrix.rows(); }
  Eigen::Index instances() const { return matrix.cols(); }

  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;

  // Index of an object name, or -1.
  Eigen::Index object_index(const std::string& name) const;

  // Column subset in the given order.
  ObjectSceneMatrix select_instances(const std::vector<Eigen::Index>& columns) const;
};

// CSV: one row per matrix row, '.' decimal. When has_header is true the first
// line is skipped on read and a c0,c1,... header is written.
Matrix read_matrix_csv(std::istream& in, bool has_header = false);
Matrix read_matrix_csv(const std::string& path, bool has_header = false);
void write_matrix_csv(std::ostream& out, const Matrix& m, bool with_header = false);
void write_matrix_csv(const std::string& path, const Matrix& m, bool with_header = false);

// First row: "object" followed by instance ids; then one row per object
// starting with its name.
ObjectSceneMatrix read_object_scene_csv(std::istream& in);
ObjectSceneMatrix read_object_scene_csv(const std::string& path);
void write_object_scene_csv(std::ostream& out, const ObjectSceneMatrix& a);
void write_object_scene_csv(const std::string& path, const ObjectSceneMatrix& a);

// Labelled matrix CSV: header "<corner>,<col labels...>", rows "<row label>,values".
struct LabelledMatrix {
  Matrix matrix;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};
LabelledMatrix read_labelled_csv(std::istream& in);
LabelledMatrix read_labelled_csv(const std::string& path);
void write_labelled_csv(std::ostream& out, const LabelledMatrix& m, const std::string& corner);
void write_labelled_csv(const std::string& path, const LabelledMatrix& m,
                        const std::string& corner);

// Shortest text form that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace scenarios
