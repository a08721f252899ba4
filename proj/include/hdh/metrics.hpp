/*
 * Licensed to the Apache Software Foundation (ASF) under one
 * or more contributor license agreements.  See the NOTICE file
 * distributed with this work for additional information
 * regarding copyright ownership.  The ASF licenses this file
 * to you under the Apache License, Version 2.0 (the
 * "License"); you may not use this file except in compliance
 * with the License.  You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing,
 * software distributed under the License is distributed on an
 * "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, either express or implied.  See the License for the
 * specific language governing permissions and limitations
 * under the License.
 */

#ifndef HDH_METRICS_HPP_
#define HDH_METRICS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hdh/hash.hpp"
#include "hdh/sketch.hpp"

namespace hdh {

inline constexpr uint64_t kGroundTruthSeed = derive_seed(kDefaultSeed, 3);

// Exact per-label distinct counts. Items are stored as 64-bit hashes; at
// 10^8 items the chance of any collision is below 10^-3.
class GroundTruth {
 public:
  explicit GroundTruth(uint64_t seed = kGroundTruthSeed) : seed_(seed) {}

  void add(std::string_view label, std::string_view item);

  // d_l; 0 for labels never seen
  uint64_t distinct(std::string_view label) const;
  bool contains(std::string_view label) const { return sets_.count(std::string(label)) != 0; }

  std::size_t label_count() const { return sets_.size(); }
  uint64_t total_entries() const { return entries_; }
  // number of unique (label, item) pairs
  uint64_t unique_pairs() const;

  // The k labels with the largest d_l, ties by ascending label.
  std::vector<std::string> top_k(std::size_t k) const;

  // All (label, d_l) pairs, ascending by label.
  std::vector<std::pair<std::string, uint64_t>> counts() const;

 private:
  uint64_t seed_;
  uint64_t entries_ = 0;
  std::unordered_map<std::string, std::unordered_set<uint64_t>> sets_;
};

struct Sample {
  double truth = 0.0;
  double estimate = 0.0;
};

// sum |d - e| / sum d
double nae(std::span<const Sample> samples);
// sqrt(sum (d - e)^2 / sum d^2)
double nrse(std::span<const Sample> samples);
// (1/|S|) sum |d - e| / d
double rmae(std::span<const Sample> samples);
// (1/|S|) sqrt(sum (d - e)^2 / d)
double rrmse(std::span<const Sample> samples);

// Quadratic mean of the two NAE values.
double qk(double nae_s, double nae_t);

using Estimator = std::function<double(std::string_view)>;

// Pairs each label's true count with its estimate. Throws MetricError if the
// label set is empty or a label is unknown to the ground truth.
std::vector<Sample> collect_samples(std::span<const std::string> labels, const Estimator& estimate,
                                    const GroundTruth& truth);

double nae(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth);
double nrse(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth);
double rmae(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth);
double rrmse(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth);

// One row per k. The _t columns are over the true top k, the _s columns over
// the sketch's own top k.
struct ErrorRow {
  std::size_t k = 0;
  double nae_t = 0, nae_s = 0, q = 0;
  double nrse_t = 0, nrse_s = 0;
  double rmae_t = 0, rmae_s = 0;
  double rrmse_t = 0, rrmse_s = 0;
  std::size_t s_k_size = 0;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;

  const ErrorRow& at_k(std::size_t k) const;
};

// Self-reported top lists come from `top`; estimates for true top-k labels
// come from `query`, so labels missing from the sketch get whatever the
// sketch would answer for them.
ErrorReport evaluate(const GroundTruth& truth, std::span<const std::size_t> ks,
                     const std::function<TopList(std::size_t)>& top, const Estimator& query);

template <class Sketch>
ErrorReport evaluate(const Sketch& sketch, const GroundTruth& truth, std::span<const std::size_t> ks) {
  return evaluate(
      truth, ks, [&](std::size_t k) { return sketch.top(k); },
      [&](std::string_view label) { return sketch.query(label); });
}

// The estimator that answers 0 for everything. Its own top k is the first k
// labels in byte order.
ErrorReport zero_baseline(const GroundTruth& truth, std::span<const std::size_t> ks);

// Tab-separated with a header row:
// k nae_t nae_s q nrse_t nrse_s rmae_t rmae_s rrmse_t rrmse_s s_k_size
void write_table(std::ostream& out, const ErrorReport& report);
// One JSON object per row.
void write_jsonl(std::ostream& out, const ErrorReport& report);

// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace hdh

#endif  // HDH_METRICS_HPP_
