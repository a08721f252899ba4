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

#include "hdh/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "hdh/errors.hpp"
#include "json.hpp"

namespace hdh {

void GroundTruth::add(std::string_view label, std::string_view item) {
  ++entries_;
  sets_[std::string(label)].insert(hash64(item, seed_).bits);
}

uint64_t GroundTruth::distinct(std::string_view label) const {
  auto it = sets_.find(std::string(label));
  return it == sets_.end() ? 0 : it->second.size();
}

uint64_t GroundTruth::unique_pairs() const {
  uint64_t total = 0;
  for (const auto& [label, items] : sets_) total += items.size();
  return total;
}

std::vector<std::string> GroundTruth::top_k(std::size_t k) const {
  std::vector<std::pair<uint64_t, const std::string*>> order;
  order.reserve(sets_.size());
  for (const auto& [label, items] : sets_) order.emplace_back(items.size(), &label);
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return *a.second < *b.second;
                    });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*order[i].second);
  return out;
}

std::vector<std::pair<std::string, uint64_t>> GroundTruth::counts() const {
  std::vector<std::pair<std::string, uint64_t>> out;
  out.reserve(sets_.size());
  for (const auto& [label, items] : sets_) out.emplace_back(label, items.size());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void require_samples(std::span<const Sample> samples, const char* metric) {
  if (samples.empty()) throw MetricError(std::string(metric) + " is undefined over an empty label set");
}

}  // namespace

double nae(std::span<const Sample> samples) {
  require_samples(samples, "NAE");
  double err = 0, total = 0;
  for (const auto& s : samples) {
    err += std::abs(s.truth - s.estimate);
    total += s.truth;
  }
  if (total <= 0) throw MetricError("NAE is undefined when every true count is zero");
  return err / total;
}

double nrse(std::span<const Sample> samples) {
  require_samples(samples, "NRSE");
  double err = 0, total = 0;
  for (const auto& s : samples) {
    err += (s.truth - s.estimate) * (s.truth - s.estimate);
    total += s.truth * s.truth;
  }
  if (total <= 0) throw MetricError("NRSE is undefined when every true count is zero");
  return std::sqrt(err / total);
}

double rmae(std::span<const Sample> samples) {
  require_samples(samples, "RMAE");
  double sum = 0;
  for (const auto& s : samples) {
    if (s.truth == 0) throw MetricError("RMAE is undefined for a zero true count");
    sum += std::abs(s.truth - s.estimate) / std::abs(s.truth);
  }
  return sum / static_cast<double>(samples.size());
}

double rrmse(std::span<const Sample> samples) {
  require_samples(samples, "RRMSE");
  double sum = 0;
  for (const auto& s : samples) {
    if (s.truth == 0) throw MetricError("RRMSE is undefined for a zero true count");
    sum += (s.truth - s.estimate) * (s.truth - s.estimate) / std::abs(s.truth);
  }
  return std::sqrt(sum) / static_cast<double>(samples.size());
}

double qk(double nae_s, double nae_t) { return std::sqrt((nae_s * nae_s + nae_t * nae_t) / 2.0); }

std::vector<Sample> collect_samples(std::span<const std::string> labels, const Estimator& estimate,
                                    const GroundTruth& truth) {
  if (labels.empty()) throw MetricError("metric is undefined over an empty label set");
  std::vector<Sample> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    const uint64_t d = truth.distinct(label);
    if (d == 0) throw MetricError("label '" + label + "' does not occur in the ground truth");
    out.push_back(Sample{static_cast<double>(d), estimate(label)});
  }
  return out;
}

double nae(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth) {
  return nae(collect_samples(labels, estimate, truth));
}
double nrse(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth) {
  return nrse(collect_samples(labels, estimate, truth));
}
double rmae(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth) {
  return rmae(collect_samples(labels, estimate, truth));
}
double rrmse(std::span<const std::string> labels, const Estimator& estimate, const GroundTruth& truth) {
  return rrmse(collect_samples(labels, estimate, truth));
}

const ErrorRow& ErrorReport::at_k(std::size_t k) const {
  for (const auto& row : rows) {
    if (row.k == k) return row;
  }
  throw std::out_of_range("no report row for k=" + std::to_string(k));
}

namespace {

ErrorRow make_row(std::size_t k, std::span<const Sample> truth_side, std::span<const Sample> sketch_side) {
  ErrorRow row;
  row.k = k;
  row.nae_t = nae(truth_side);
  row.nae_s = nae(sketch_side);
  row.q = qk(row.nae_s, row.nae_t);
  row.nrse_t = nrse(truth_side);
  row.nrse_s = nrse(sketch_side);
  row.rmae_t = rmae(truth_side);
  row.rmae_s = rmae(sketch_side);
  row.rrmse_t = rrmse(truth_side);
  row.rrmse_s = rrmse(sketch_side);
  row.s_k_size = sketch_side.size();
  return row;
}

}  // namespace

ErrorReport evaluate(const GroundTruth& truth, std::span<const std::size_t> ks,
                     const std::function<TopList(std::size_t)>& top, const Estimator& query) {
  ErrorReport report;
  for (std::size_t k : ks) {
    const auto true_top = truth.top_k(k);
    const auto truth_side = collect_samples(true_top, query, truth);

    const TopList reported = top(k);
    std::vector<std::string> reported_labels;
    reported_labels.reserve(reported.size());
    for (const auto& e : reported) reported_labels.push_back(e.label);
    std::size_t next = 0;
    // reported estimates come straight from the top list
    const auto sketch_side = collect_samples(
        reported_labels, [&](std::string_view) { return reported[next++].estimate; }, truth);

    report.rows.push_back(make_row(k, truth_side, sketch_side));
  }
  return report;
}

ErrorReport zero_baseline(const GroundTruth& truth, std::span<const std::size_t> ks) {
  const auto counts = truth.counts();
  auto zero = [](std::string_view) { return 0.0; };
  ErrorReport report;
  for (std::size_t k : ks) {
    const auto true_top = truth.top_k(k);
    const auto truth_side = collect_samples(true_top, zero, truth);
    std::vector<std::string> first_k;
    for (std::size_t i = 0; i < std::min(k, counts.size()); ++i) first_k.push_back(counts[i].first);
    const auto sketch_side = collect_samples(first_k, zero, truth);
    report.rows.push_back(make_row(k, truth_side, sketch_side));
  }
  return report;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_table(std::ostream& out, const ErrorReport& report) {
  out << "k\tnae_t\tnae_s\tq\tnrse_t\tnrse_s\trmae_t\trmae_s\trrmse_t\trrmse_s\ts_k_size\n";
  for (const auto& r : report.rows) {
    out << r.k << '\t' << format_number(r.nae_t) << '\t' << format_number(r.nae_s) << '\t' << format_number(r.q)
        << '\t' << format_number(r.nrse_t) << '\t' << format_number(r.nrse_s) << '\t' << format_number(r.rmae_t)
        << '\t' << format_number(r.rmae_s) << '\t' << format_number(r.rrmse_t) << '\t'
        << format_number(r.rrmse_s) << '\t' << r.s_k_size << '\n';
  }
}

void write_jsonl(std::ostream& out, const ErrorReport& report) {
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["nae_t"] = r.nae_t;
    j["nae_s"] = r.nae_s;
    j["q"] = r.q;
    j["nrse_t"] = r.nrse_t;
    j["nrse_s"] = r.nrse_s;
    j["rmae_t"] = r.rmae_t;
    j["rmae_s"] = r.rmae_s;
    j["rrmse_t"] = r.rrmse_t;
    j["rrmse_s"] = r.rrmse_s;
    j["s_k_size"] = r.s_k_size;
    out << j.dump() << '\n';
  }
}

}  // namespace hdh
