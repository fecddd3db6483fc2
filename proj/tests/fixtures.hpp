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


// Small builders shared by the unit tests.

#pragma once

#include "scenarios/matrix.hpp"

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace scenarios::testing {

inline ObjectSceneMatrix labelled(const Matrix& a) {
  ObjectSceneMatrix out;
  out.matrix = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.object_names.push_back("o" + std::to_string(i));
  for (Eigen::Index j = 0; j < a.cols(); ++j) out.instance_ids.push_back("i" + std::to_string(j));
  return out;
}

inline Matrix random_binary(Eigen::Index rows, Eigen::Index cols, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = coin(rng) ? 1.0 : 0.0;
  // Every object occurs at least once.
  for (Eigen::Index i = 0; i < rows; ++i) m(i, i % cols) = 1.0;
  return m;
}

inline Matrix random_uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("scenarios_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace scenarios::testing
