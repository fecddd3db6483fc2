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

#include "scenarios/retrieval.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace scenarios {

namespace {

Eigen::Index name_index(const std::vector<std::string>& names, const std::string& name,
                        const char* kind) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument(std::string("unknown ") + kind + " '" + name + "'");
  return std::distance(names.begin(), it);
}

// Query terms resolved to indices.
struct ResolvedQuery {
  std::vector<Eigen::Index> classes;
  std::vector<Eigen::Index> scenarios;
  std::vector<Eigen::Index> required;
  std::vector<Eigen::Index> excluded;
  std::size_t terms = 0;
};

void validate_query(const Query& q) {
  if (q.terms() == 0) throw std::invalid_argument("empty query");
  for (const auto& o : q.required_objects)
    if (q.excluded_objects.count(o))
      throw std::invalid_argument("object '" + o + "' is both required and excluded");
}

ResolvedQuery resolve(const ContentIndex& index, const Query& q) {
  validate_query(q);
  ResolvedQuery r;
  for (const auto& c : q.classes) r.classes.push_back(name_index(index.class_names, c, "class"));
  const std::size_t k = index.records.empty() ? 0 : static_cast<std::size_t>(index.records[0].encoding.size());
  for (auto s : q.required_scenarios) {
    if (!index.records.empty() && s >= k)
      throw std::invalid_argument("scenario " + std::to_string(s) + " out of range");
    r.scenarios.push_back(static_cast<Eigen::Index>(s));
  }
  for (const auto& o : q.required_objects) r.required.push_back(name_index(index.object_names, o, "object"));
  for (const auto& o : q.excluded_objects) r.excluded.push_back(name_index(index.object_names, o, "object"));
  r.terms = q.terms();
  return r;
}

double record_score(const ContentIndex& index, const ResolvedQuery& r, const IndexRecord& rec) {
  std::size_t matched = 0;
  if (!r.classes.empty()) {
    for (auto c : r.classes)
      if (index.class_names[static_cast<std::size_t>(c)] == rec.predicted_class) {
        ++matched;
        break;
      }
  }
  for (auto s : r.scenarios) matched += rec.encoding(s) >= index.thresholds.scenario_theta;
  for (auto o : r.required) matched += rec.object_scores(o) >= index.thresholds.object_theta;
  for (auto o : r.excluded) matched += rec.object_scores(o) < index.thresholds.object_theta;
  return static_cast<double>(matched) / static_cast<double>(r.terms);
}

double dcg(const std::vector<double>& rel, std::size_t k) {
  double total = 0;
  for (std::size_t i = 0; i < std::min(k, rel.size()); ++i)
    total += rel[i] / std::log2(static_cast<double>(i) + 2.0);
  return total;
}

std::unordered_map<std::string, Eigen::Index> column_lookup(const ObjectSceneMatrix& a) {
  std::unordered_map<std::string, Eigen::Index> lookup;
  for (std::size_t j = 0; j < a.instance_ids.size(); ++j)
    lookup.emplace(a.instance_ids[j], static_cast<Eigen::Index>(j));
  return lookup;
}

}  // namespace

const IndexRecord& ContentIndex::find(const std::string& id) const {
  for (const auto& r : records)
    if (r.instance_id == id) return r;
  throw std::invalid_argument("unknown instance id '" + id + "'");
}

std::size_t Query::terms() const {
  return (classes.empty() ? 0 : 1) + required_scenarios.size() + required_objects.size() +
         excluded_objects.size();
}

ContentIndex build_index(const ScenarioModel& model, const ScenarioHead& head,
                         const SceneClassifier& clf, const FeatureMatrix& x,
                         const IndexThresholds& thresholds) {
  if (head.k() != model.k() || clf.weights.cols() != static_cast<Eigen::Index>(model.k()))
    throw DimensionError("build_index: head, classifier and dictionary disagree on k");
  if (x.instance_ids.size() != static_cast<std::size_t>(x.matrix.cols()))
    throw DimensionError("build_index: instance ids do not match feature columns");
  ContentIndex index;
  index.class_names = clf.class_names;
  index.object_names = model.object_names;
  index.thresholds = thresholds;
  if (x.matrix.cols() == 0) return index;

  Matrix h = head_encode(head, x.matrix);
  Matrix probs = class_probabilities(clf, h);
  Matrix scores = pseudo_boolean_product(model.dictionary, h);
  std::unordered_set<std::string> seen;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    if (!seen.insert(x.instance_ids[j]).second)
      throw std::invalid_argument("build_index: duplicate instance id '" + x.instance_ids[j] + "'");
    IndexRecord rec;
    rec.instance_id = x.instance_ids[j];
    rec.class_probabilities = probs.col(j);
    Eigen::Index best = 0;
    rec.class_probabilities.maxCoeff(&best);
    rec.predicted_class = clf.class_names[static_cast<std::size_t>(best)];
    rec.encoding = h.col(j);
    rec.object_scores = scores.col(j);
    index.records.push_back(std::move(rec));
  }
  return index;
}

std::vector<double> query_scores(const ContentIndex& index, const Query& q) {
  auto r = resolve(index, q);
  std::vector<double> out;
  out.reserve(index.records.size());
  for (const auto& rec : index.records) out.push_back(record_score(index, r, rec));
  return out;
}

std::vector<Hit> execute(const ContentIndex& index, const Query& q, std::size_t top_k) {
  auto r = resolve(index, q);
  struct Ranked {
    std::size_t record;
    double score;
    double class_prob;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(index.records.size());
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    const auto& rec = index.records[i];
    double p = 0;
    for (auto c : r.classes) p += rec.class_probabilities(c);
    ranked.push_back({i, record_score(index, r, rec), p});
  }
  auto better = [&](const Ranked& x, const Ranked& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.class_prob != y.class_prob) return x.class_prob > y.class_prob;
    return index.records[x.record].instance_id < index.records[y.record].instance_id;
  };
  const std::size_t keep = std::min(top_k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), better);
  std::vector<Hit> hits;
  hits.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i)
    hits.push_back({index.records[ranked[i].record].instance_id, ranked[i].score});
  return hits;
}

GeneratedQueries generate_queries(const ObjectSceneMatrix& a_test,
                                  const std::vector<std::string>& labels, std::size_t n,
                                  std::uint64_t seed, const QueryGenOptions& options) {
  if (labels.size() != static_cast<std::size_t>(a_test.instances()))
    throw DimensionError("generate_queries: labels do not align with instances");
  GeneratedQueries out;
  if (n == 0) return out;

  std::map<std::string, std::vector<Eigen::Index>> by_class;
  for (std::size_t j = 0; j < labels.size(); ++j)
    by_class[labels[j]].push_back(static_cast<Eigen::Index>(j));
  std::vector<const std::string*> classes;
  for (const auto& [name, cols] : by_class) classes.push_back(&name);
  if (classes.empty()) {
    out.skipped = n;
    return out;
  }

  const Matrix& a = a_test.matrix;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
  };

  for (std::size_t q = 0; q < n; ++q) {
    bool made = false;
    for (std::size_t attempt = 0; attempt < options.max_attempts_per_query && !made; ++attempt) {
      const std::string& cls = *classes[uniform(classes.size())];
      const auto& cols = by_class[cls];
      const Eigen::Index seed_col = cols[uniform(cols.size())];
      std::vector<Eigen::Index> present;
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (a(i, seed_col) != 0) present.push_back(i);
      if (present.size() < 2) continue;
      std::size_t first = uniform(present.size());
      std::size_t second = uniform(present.size() - 1);
      if (second >= first) ++second;
      const Eigen::Index o1 = present[first];
      const Eigen::Index o2 = present[second];

      std::vector<Eigen::Index> with_pair;
      for (auto c : cols)
        if (a(o1, c) != 0 && a(o2, c) != 0) with_pair.push_back(c);
      std::vector<std::pair<std::size_t, Eigen::Index>> candidates;  // (count, object)
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (i == o1 || i == o2) continue;
        std::size_t count = 0;
        for (auto c : with_pair) count += a(i, c) != 0;
        if (count > 0 && count < with_pair.size()) candidates.emplace_back(count, i);
      }
      if (candidates.empty()) continue;
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const auto& x, const auto& y) { return x.first > y.first; });
      const std::size_t pool = std::min(options.top_cooccurring, candidates.size());
      const Eigen::Index o3 = candidates[uniform(pool)].second;

      Query query;
      query.classes.insert(cls);
      query.required_objects.insert(a_test.object_names[o1]);
      query.required_objects.insert(a_test.object_names[o2]);
      query.excluded_objects.insert(a_test.object_names[o3]);
      out.queries.push_back(std::move(query));
      made = true;
    }
    if (!made) ++out.skipped;
  }
  return out;
}

std::vector<double> ground_truth_relevance(const Query& q, const ObjectSceneMatrix& a_test,
                                           const std::vector<std::string>& labels) {
  validate_query(q);
  if (!q.required_scenarios.empty())
    throw std::invalid_argument("ground truth relevance: scenario terms have no annotations");
  if (labels.size() != static_cast<std::size_t>(a_test.instances()))
    throw DimensionError("ground truth relevance: labels do not align with instances");
  std::vector<Eigen::Index> required, excluded;
  for (const auto& o : q.required_objects) required.push_back(name_index(a_test.object_names, o, "object"));
  for (const auto& o : q.excluded_objects) excluded.push_back(name_index(a_test.object_names, o, "object"));
  const double terms = static_cast<double>(q.terms());
  std::vector<double> rel(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::size_t matched = 0;
    if (!q.classes.empty()) matched += q.classes.count(labels[j]) > 0;
    for (auto o : required) matched += a_test.matrix(o, col) != 0;
    for (auto o : excluded) matched += a_test.matrix(o, col) == 0;
    rel[j] = static_cast<double>(matched) / terms;
  }
  return rel;
}

double ndcg_at_k(const std::vector<double>& returned, std::vector<double> all_relevances,
                 std::size_t k) {
  std::sort(all_relevances.begin(), all_relevances.end(), std::greater<>());
  const double ideal = dcg(all_relevances, k);
  if (ideal <= 0) return 0.0;
  return dcg(returned, k) / ideal;
}

NdcgReport evaluate_ndcg(const ContentIndex& index, const std::vector<Query>& queries,
                         const ObjectSceneMatrix& a_test, const std::vector<std::string>& labels,
                         std::size_t k) {
  auto lookup = column_lookup(a_test);
  std::vector<Eigen::Index> indexed;
  for (const auto& rec : index.records) {
    auto it = lookup.find(rec.instance_id);
    if (it == lookup.end())
      throw std::invalid_argument("evaluate_ndcg: no annotations for '" + rec.instance_id + "'");
    indexed.push_back(it->second);
  }
  NdcgReport report;
  for (const auto& q : queries) {
    auto rel = ground_truth_relevance(q, a_test, labels);
    std::vector<double> corpus;
    corpus.reserve(indexed.size());
    for (auto c : indexed) corpus.push_back(rel[static_cast<std::size_t>(c)]);
    std::vector<double> returned;
    for (const auto& hit : execute(index, q, k))
      returned.push_back(rel[static_cast<std::size_t>(lookup.at(hit.instance_id))]);
    report.per_query.push_back(ndcg_at_k(returned, std::move(corpus), k));
  }
  if (!report.per_query.empty())
    report.mean = std::accumulate(report.per_query.begin(), report.per_query.end(), 0.0) /
                  static_cast<double>(report.per_query.size());
  return report;
}

NdcgReport evaluate_random_ndcg(const std::vector<Query>& queries,
                                const ObjectSceneMatrix& a_test,
                                const std::vector<std::string>& labels, std::uint64_t seed,
                                std::size_t k) {
  std::mt19937_64 rng(seed);
  NdcgReport report;
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  for (const auto& q : queries) {
    auto rel = ground_truth_relevance(q, a_test, labels);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> returned;
    for (std::size_t i = 0; i < std::min(k, n); ++i) {
      std::size_t pick = std::uniform_int_distribution<std::size_t>(i, n - 1)(rng);
      std::swap(order[i], order[pick]);
      returned.push_back(rel[order[i]]);
    }
    report.per_query.push_back(ndcg_at_k(returned, rel, k));
  }
  if (!report.per_query.empty())
    report.mean = std::accumulate(report.per_query.begin(), report.per_query.end(), 0.0) /
                  static_cast<double>(report.per_query.size());
  return report;
}

Comparison compare(const ContentIndex& index, const std::string& id_a, const std::string& id_b) {
  const auto& a = index.find(id_a);
  const auto& b = index.find(id_b);
  const double theta = index.thresholds.scenario_theta;
  Comparison out;
  out.class_a = a.predicted_class;
  out.class_b = b.predicted_class;
  for (Eigen::Index s = 0; s < a.encoding.size(); ++s) {
    const bool in_a = a.encoding(s) >= theta;
    const bool in_b = b.encoding(s) >= theta;
    const auto idx = static_cast<std::size_t>(s);
    if (in_a && in_b) out.shared_scenarios.push_back(idx);
    else if (in_a) out.only_a.push_back(idx);
    else if (in_b) out.only_b.push_back(idx);
  }
  return out;
}

}  // namespace scenarios
