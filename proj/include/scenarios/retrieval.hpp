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

// Content index over predicted classes, scenario encodings and object scores,
// with conjunctive queries, pairwise comparison and NDCG evaluation.

#pragma once

#include "scenarios/classifier.hpp"
#include "scenarios/head.hpp"
#include "scenarios/pbmf.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace scenarios {

struct IndexRecord {
  std::string instance_id;
  std::string predicted_class;
  Vector class_probabilities;  // aligned with ContentIndex::class_names
  Vector encoding;             // k
  Vector object_scores;        // f(W h), aligned with ContentIndex::object_names
};

struct IndexThresholds {
  double scenario_theta = 0.5;
  double object_theta = 0.5;
};

struct ContentIndex {
  std::vector<IndexRecord> records;
  std::vector<std::string> class_names;
  std::vector<std::string> object_names;
  IndexThresholds thresholds;

  std::size_t size() const { return records.size(); }
  const IndexRecord& find(const std::string& id) const;  // throws if absent
};

ContentIndex build_index(const ScenarioModel& model, const ScenarioHead& head,
                         const SceneClassifier& clf, const FeatureMatrix& x,
                         const IndexThresholds& thresholds = {});

// Classes are OR-ed; every other term must hold.
struct Query {
  std::set<std::string> classes;
  std::set<std::size_t> required_scenarios;
  std::set<std::string> required_objects;
  std::set<std::string> excluded_objects;

  std::size_t terms() const;
};

struct Hit {
  std::string instance_id;
  double score;
};

// Fraction of satisfied terms per instance (a class term counts once).
// Sorted by score, then by the probability of the queried classes, then id.
std::vector<Hit> execute(const ContentIndex& index, const Query& q, std::size_t top_k);

// Per-record score of a query, in index order.
std::vector<double> query_scores(const ContentIndex& index, const Query& q);

struct QueryGenOptions {
  std::size_t max_attempts_per_query = 50;
  // Excluded object drawn from this many most frequent co-occurring candidates.
  std::size_t top_cooccurring = 3;
};

struct GeneratedQueries {
  std::vector<Query> queries;
  std::size_t skipped = 0;
};

// Random (class AND o1 AND o2 AND NOT o3) queries from ground-truth annotations.
GeneratedQueries generate_queries(const ObjectSceneMatrix& a_test,
                                  const std::vector<std::string>& labels, std::size_t n,
                                  std::uint64_t seed, const QueryGenOptions& options = {});

// Fraction of query terms each instance satisfies according to annotations.
std::vector<double> ground_truth_relevance(const Query& q, const ObjectSceneMatrix& a_test,
                                           const std::vector<std::string>& labels);

// DCG@k with linear gain and log2(i+1) discount, normalized by the ideal
// ordering of `all_relevances`; 0 when the ideal DCG is 0.
double ndcg_at_k(const std::vector<double>& returned, std::vector<double> all_relevances,
                 std::size_t k);

struct NdcgReport {
  double mean = 0;
  std::vector<double> per_query;
};

NdcgReport evaluate_ndcg(const ContentIndex& index, const std::vector<Query>& queries,
                         const ObjectSceneMatrix& a_test, const std::vector<std::string>& labels,
                         std::size_t k = 5);

// Same protocol with a uniformly random ranking per query instead of the index.
NdcgReport evaluate_random_ndcg(const std::vector<Query>& queries,
                                const ObjectSceneMatrix& a_test,
                                const std::vector<std::string>& labels, std::uint64_t seed,
                                std::size_t k = 5);

struct Comparison {
  std::vector<std::size_t> shared_scenarios;
  std::vector<std::size_t> only_a;
  std::vector<std::size_t> only_b;
  std::string class_a;
  std::string class_b;
};

Comparison compare(const ContentIndex& index, const std::string& id_a, const std::string& id_b);

}  // namespace scenarios
