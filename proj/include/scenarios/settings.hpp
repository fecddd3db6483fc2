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


// Flat key=value configuration shared by the config file and CLI flags.
//
//   # comment
//   k = 10
//   dataset = data/dataset.jsonl
//
// Keys outside known_settings() are rejected.

#pragma once

#include "scenarios/classifier.hpp"
#include "scenarios/dataset.hpp"
#include "scenarios/head.hpp"
#include "scenarios/pbmf.hpp"
#include "scenarios/retrieval.hpp"
#include "scenarios/synth.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace scenarios {

struct SettingInfo {
  std::string key;
  std::string help;
};

const std::vector<SettingInfo>& known_settings();

class Settings {
 public:
  static Settings parse(std::istream& in);
  static Settings read(const std::string& path);

  void set(const std::string& key, const std::string& value);  // throws on unknown key
  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

PbmfConfig pbmf_config(const Settings& s);
TrainSchedule train_schedule(const Settings& s);
// Schedule for the joint phase: joint_* keys override the head schedule.
TrainSchedule joint_schedule(const Settings& s);
FitOptions fit_options(const Settings& s);
DatasetConfig dataset_config(const Settings& s);
SynthSpec synth_spec(const Settings& s);
IndexThresholds index_thresholds(const Settings& s);

}  // namespace scenarios
