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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hdh/datagen.hpp"
#include "hdh/hll.hpp"
#include "hdh/metrics.hpp"
#include "hdh/sketch.hpp"
#include "test_support.hpp"

namespace hdh {
namespace {

using testing::exact_config;
using testing::hll_config;

constexpr uint64_t kZipfSeed = 2024;
constexpr double kZipfNaeLimit = 0.15;
constexpr double kMergedQLimit = 0.5;
constexpr double kCyclingSsssLimit = 0.2;
constexpr double kCyclingUnsampledFloor = 1.0;
constexpr double kGoldenTolerance = 0.005;
constexpr double kScanRatioLimit = 0.10;
constexpr double kHllRelativeError = 0.10;
constexpr double kHllPassFraction = 0.95;
constexpr double kOverlapNaeLimit = 0.15;
constexpr double kMinSuiteSecondsLimit = 30;
constexpr double kZipfSecondsLimit = 60;

// Accumulates a failure description; the first one is kept for the report.
class Check {
 public:
  void require(bool ok, const std::function<std::string()>& why) {
    if (!ok && first_.empty()) first_ = why();
    failed_ = failed_ || !ok;
  }
  bool ok() const { return !failed_; }
  const std::string& reason() const { return first_; }

 private:
  bool failed_ = false;
  std::string first_;
};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Exact counts over raw items, indexed by label.
class Oracle {
 public:
  void add(const std::string& label, const std::string& item) { sets_[label].insert(item); }
  double d(const std::string& label) const {
    auto it = sets_.find(label);
    return it == sets_.end() ? 0.0 : static_cast<double>(it->second.size());
  }
  const std::unordered_map<std::string, std::unordered_set<std::string>>& sets() const { return sets_; }

 private:
  std::unordered_map<std::string, std::unordered_set<std::string>> sets_;
};

struct MinStream {
  Variant variant;
  uint32_t capacity;
  std::size_t length;
  std::size_t labels;
  uint64_t seed;
};

std::vector<MinStream> min_streams() {
  std::vector<MinStream> out;
  std::mt19937_64 rng(17);
  const uint32_t sizes[] = {5, 16, 64};
  for (Variant v : {Variant::kSss, Variant::kRsss, Variant::kSsss}) {
    for (int i = 0; i < 70; ++i) {
      const uint32_t s = sizes[i % 3];
      const std::size_t m = i % 10 == 0 ? 100'000 : 5000 + rng() % 15'000;
      out.push_back(MinStream{v, s, m, s * (20 + rng() % 80), rng()});
    }
  }
  return out;
}

// Minimum-counter properties with exact counters on every stream and variant, checked after
// every insert once the sketch is full. For SSS also the end-of-stream
// two-sided error bound m/s over every label.
std::pair<Outcome, Outcome> min_counter_and_error_bound() {
  Stopwatch clock;
  Check minimum, bound;
  std::size_t streams = 0, sss_streams = 0, checks = 0;
  for (const auto& spec : min_streams()) {
    ++streams;
    std::mt19937_64 rng(spec.seed);
    const auto entries = testing::random_stream(rng, spec.length, spec.labels, spec.length / 4 + 1, 1.3);
    ExactSketch sk(exact_config(spec.variant, spec.capacity, spec.seed));
    Oracle oracle;
    std::set<std::string> resident;
    double last_min = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const uint64_t evictions = sk.stats().evictions;
      sk.insert(e.label, e.item);
      oracle.add(e.label, e.item);
      if (sk.contains(e.label)) resident.insert(e.label);
      if (!sk.full()) continue;
      const double alpha = sk.min_value();
      const double prefix = static_cast<double>(i + 1);
      minimum.require(alpha >= last_min, [&] { return "min decreased at entry " + std::to_string(i); });
      minimum.require(alpha * spec.capacity <= prefix, [&] { return "min above m'/s at entry " + std::to_string(i); });
      last_min = alpha;
      if (sk.contains(e.label)) {
        minimum.require(sk.query(e.label) <= oracle.d(e.label) + alpha,
                      [&] { return "query above d + min for " + e.label; });
      }
      if (sk.stats().evictions != evictions) {
        for (auto it = resident.begin(); it != resident.end();) {
          if (sk.contains(*it)) {
            ++it;
            continue;
          }
          // a label leaving an SSS sketch never had more than min distinct items
          if (spec.variant == Variant::kSss) {
            minimum.require(oracle.d(*it) <= alpha, [&] { return "evicted " + *it + " with d above min"; });
          }
          it = resident.erase(it);
        }
      }
      ++checks;
    }
    // the bound on resident labels holds for all of them at the end
    const double alpha = sk.min_value();
    for (const auto& [label, slot] : sk.entries()) {
      minimum.require(slot.value() <= oracle.d(label) + alpha, [&] { return "final query bound for " + label; });
    }
    if (spec.variant == Variant::kSss) {
      ++sss_streams;
      const double m_over_s = static_cast<double>(entries.size()) / spec.capacity;
      for (const auto& [label, items] : oracle.sets()) {
        const double d = static_cast<double>(items.size());
        bound.require(std::abs(sk.query(label) - d) <= m_over_s, [&] { return "error above m/s for " + label; });
        if (!sk.contains(label)) {
          minimum.require(d <= alpha, [&] { return "non-resident " + label + " with d above min"; });
        }
      }
    }
  }
  const double secs = clock.seconds();
  std::ostringstream a, b;
  a << streams << " streams, " << checks << " post-insert checks, " << fmt("%.1f s", secs) << " (limit "
    << kMinSuiteSecondsLimit << " s)";
  if (!minimum.ok()) a << "; " << minimum.reason();
  b << sss_streams << " SSS streams, every label within m/s";
  if (!bound.ok()) b << "; " << bound.reason();
  return {{minimum.ok() && secs < kMinSuiteSecondsLimit, a.str()}, {bound.ok(), b.str()}};
}

// The cached-threshold sampling sketch against a direct transcription that
// scans for the minimum on every new label.
Outcome cached_gate_equivalence() {
  Check check;
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const uint64_t seed = rng();
    const uint32_t capacity = 8 + static_cast<uint32_t>(rng() % 120);
    const auto config = hll_config(Variant::kSsss, capacity, 4 + trial % 7, seed);
    HllSketch fast(config);
    testing::ReferenceSketch<HyperLogLog> direct(config);
    for (const auto& e : testing::random_stream(rng, 20'000, capacity * 30, 8000, 1.5)) {
      fast.insert(e.label, e.item);
      direct.insert(e.label, e.item);
    }
    std::set<std::string> fast_labels;
    for (const auto& [label, slot] : fast.entries()) fast_labels.insert(label);
    check.require(fast_labels == direct.labels(), [&] { return "resident sets differ on stream " + std::to_string(trial); });
    for (const auto& label : fast_labels) {
      check.require(fast.query(label) == direct.query(label),
                    [&] { return "query differs for " + label + " on stream " + std::to_string(trial); });
    }
    check.require(fast.query("never-seen") == direct.query("never-seen"), [] { return "fallback query differs"; });
  }
  return {check.ok(), "100 streams, identical resident sets and bit-identical queries" +
                          (check.ok() ? std::string() : "; " + check.reason())};
}

Outcome hll_accuracy() {
  Check check;
  std::ostringstream detail;
  bool all = true;
  for (uint64_t n : {1000ULL, 10'000ULL, 100'000ULL}) {
    int within = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      HyperLogLog hll(10, derive_seed(seed, n));
      double last = 0;
      for (uint64_t i = 0; i < n; ++i) {
        hll.insert(HashValue{mix64(i ^ (seed << 40))});
        const double now = hll.distinct();
        check.require(now >= last, [&] { return "estimate decreased at n=" + std::to_string(i); });
        last = now;
      }
      if (std::abs(hll.distinct() - static_cast<double>(n)) / static_cast<double>(n) <= kHllRelativeError) ++within;
    }
    all = all && within >= kHllPassFraction * 100;
    detail << "n=" << n << ": " << within << "/100 within 10%; ";
  }
  detail << "monotone on every trial";
  if (!check.ok()) detail << "; " << check.reason();
  return {all && check.ok(), detail.str()};
}

struct ZipfFixture {
  std::vector<Entry> entries;
  GroundTruth truth;
};

ZipfFixture zipf_fixture() {
  ZipfSpec spec = ZipfSpec::desk();
  spec.seed = kZipfSeed;
  ZipfGenerator gen(spec);
  ZipfFixture f;
  f.entries = drain(gen);
  for (const auto& e : f.entries) f.truth.add(e.label, e.item);
  return f;
}

const std::vector<std::size_t> kTop100{100};
const std::vector<std::size_t> kTop1000{1000};

Outcome zipf_accuracy(const ZipfFixture& f, HllSketch& out_sketch, double& insert_seconds) {
  Stopwatch clock;
  HllSketch sk(hll_config(Variant::kSsss, 2000, 10, 5));
  for (const auto& e : f.entries) sk.insert(e.label, e.item);
  insert_seconds = clock.seconds();
  const auto report = evaluate(sk, f.truth, kTop100);
  const auto base = zero_baseline(f.truth, kTop100);
  const auto& r = report.at_k(100);
  const double secs = clock.seconds();
  const double d100 = static_cast<double>(f.truth.distinct(f.truth.top_k(100).back()));
  const double theta = sk.theta();
  out_sketch = std::move(sk);
  const bool pass = r.nae_t <= kZipfNaeLimit && r.q <= kZipfNaeLimit && r.nae_t < base.at_k(100).nae_t &&
                    r.q < base.at_k(100).q && secs <= kZipfSecondsLimit;
  return {pass, "NAE(T_100)=" + fmt("%.4f", r.nae_t) + " NAE(S_100)=" + fmt("%.4f", r.nae_s) +
                    " Q_100=" + fmt("%.4f", r.q) + " (limit 0.15, baseline " + fmt("%.1f", base.at_k(100).q) +
                    "), theta=" + fmt("%.1f", theta) +
                    " vs d of 100th label " + fmt("%.0f", d100) + ", " + fmt("%.1f s", secs) + " (limit 60 s)"};
}

Outcome merged_shards(const ZipfFixture& f) {
  const auto config = hll_config(Variant::kSsss, 2000, 10, 5);
  const std::size_t shards = 10;
  HllSketch merged(config);
  for (std::size_t i = 0; i < shards; ++i) {
    HllSketch shard(config);
    const std::size_t begin = f.entries.size() * i / shards, end = f.entries.size() * (i + 1) / shards;
    for (std::size_t j = begin; j < end; ++j) shard.insert(f.entries[j].label, f.entries[j].item);
    merged.merge(shard);
  }
  const auto report = evaluate(merged, f.truth, kTop100);
  const auto base = zero_baseline(f.truth, kTop100);
  const auto& r = report.at_k(100);
  return {r.q <= kMergedQLimit && r.q < base.at_k(100).q,
          "10 shards fold-merged: NAE(T_100)=" + fmt("%.4f", r.nae_t) + " NAE(S_100)=" + fmt("%.4f", r.nae_s) +
              " Q_100=" + fmt("%.4f", r.q) + " (limit 0.5)"};
}

double q1000(Variant v, const std::vector<Entry>& entries, const GroundTruth& truth) {
  ExactSketch sk(exact_config(v, 2000, 5));
  for (const auto& e : entries) sk.insert(e.label, e.item);
  return evaluate(sk, truth, kTop1000).at_k(1000).q;
}

// Round-robin over many more labels than the sketch holds, every entry a
// fresh item, so every new label displaces a resident one.
ZipfFixture cycling_fixture() {
  const std::size_t labels = 20'000, entries = 1'000'000;
  ZipfFixture f;
  f.entries.reserve(entries);
  for (std::size_t i = 0; i < entries; ++i) {
    f.entries.push_back(Entry{"c" + std::to_string(i % labels), item_hex(mix64(i))});
  }
  for (const auto& e : f.entries) f.truth.add(e.label, e.item);
  return f;
}

Outcome sampling_necessity(const ZipfFixture& f) {
  const double sss = q1000(Variant::kSss, f.entries, f.truth);
  const double rsss = q1000(Variant::kRsss, f.entries, f.truth);
  const double ssss = q1000(Variant::kSsss, f.entries, f.truth);
  const auto cyc = cycling_fixture();
  const double c_sss = q1000(Variant::kSss, cyc.entries, cyc.truth);
  const double c_rsss = q1000(Variant::kRsss, cyc.entries, cyc.truth);
  const double c_ssss = q1000(Variant::kSsss, cyc.entries, cyc.truth);
  const bool pass = ssss < rsss && ssss < sss && c_ssss <= kCyclingSsssLimit && c_sss > kCyclingUnsampledFloor &&
                    c_rsss > kCyclingUnsampledFloor;
  return {pass, "zipf Q_1000 SSSS=" + fmt("%.4f", ssss) + " RSSS=" + fmt("%.4f", rsss) + " SSS=" + fmt("%.4f", sss) +
                    "; cycling Q_1000 SSSS=" + fmt("%.4f", c_ssss) + " (limit 0.2) RSSS=" + fmt("%.3f", c_rsss) +
                    " SSS=" + fmt("%.3f", c_sss) + " (floor 1.0)"};
}

Outcome metric_goldens() {
  const auto gt = testing::tiered_truth();
  const auto inflating = testing::tiered_inflating_report(gt);
  const auto top_first = testing::tiered_subset_report(gt, testing::tiered_indices(1, 10, 21, 30));
  const auto second_ten = testing::tiered_subset_report(gt, testing::tiered_indices(11, 20, 21, 30));
  const auto& a = inflating.at_k(10);
  const auto& b = top_first.at_k(20);
  const auto& c = second_ten.at_k(20);
  const bool pass = a.nae_s == 999.0 && a.nae_t == 0.0 && std::abs(a.q - 999.0 / std::sqrt(2.0)) <= kGoldenTolerance &&
                    std::abs(b.q - 0.064) <= kGoldenTolerance && std::abs(c.q - 0.64) <= kGoldenTolerance;
  return {pass, "NAE(S_10)=" + fmt("%.6g", a.nae_s) + " Q_10=" + fmt("%.6g", a.q) + " Q_20=" + fmt("%.4f", b.q) +
                    " vs " + fmt("%.4f", c.q)};
}

Outcome gate_and_round_trips(const HllSketch& zipf_sketch) {
  const auto& st = zipf_sketch.stats();
  const uint64_t attempts = st.gate_rejections + st.evictions;
  const double ratio = attempts ? static_cast<double>(st.min_scans) / static_cast<double>(attempts) : 0.0;
  Check check;
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    const Variant v = static_cast<Variant>(i % 3);
    const uint32_t capacity = 1 + static_cast<uint32_t>(rng() % 200);
    auto check_one = [&](auto sk) {
      for (const auto& e : testing::random_stream(rng, 1 + rng() % 20'000, 1 + rng() % 2000, 1 + rng() % 5000)) {
        sk.insert(e.label, e.item);
      }
      const auto bytes = sk.serialize();
      const auto back = decltype(sk)::deserialize(bytes);
      check.require(back.serialize() == bytes, [&] { return "re-serialization differs on sketch " + std::to_string(i); });
      check.require(back.theta() == sk.theta() && back.size() == sk.size(), [&] { return "state differs"; });
      for (const auto& [label, slot] : sk.entries()) {
        check.require(back.query(label) == slot.value(), [&] { return "query differs for " + label; });
      }
      check.require(back.query("absent") == sk.query("absent"), [] { return "fallback differs"; });
    };
    if (i % 4 == 3) {
      check_one(ExactSketch(exact_config(v, capacity, rng())));
    } else {
      check_one(HllSketch(hll_config(v, capacity, 4 + static_cast<uint16_t>(rng() % 9), rng())));
    }
  }
  std::string detail = "min_scans=" + std::to_string(st.min_scans) + " of " + std::to_string(attempts) +
                       " non-resident inserts into the full sketch (" + fmt("%.2f%%", 100 * ratio) +
                       ", limit 10%); 100 sketches round-trip bit-exact";
  if (!check.ok()) detail += "; " + check.reason();
  return {ratio <= kScanRatioLimit && check.ok(), detail};
}

Outcome overlap_heavy_sets() {
  OverlapGenerator gen(OverlapSpec::desk());
  HllSketch sk(hll_config(Variant::kSsss, 100, 10, 5));
  GroundTruth truth;
  while (auto e = gen.next()) {
    sk.insert(e->label, e->item);
    truth.add(e->label, e->item);
  }
  std::size_t heavy_found = 0;
  for (const auto& e : sk.top(100)) heavy_found += e.label[0] == 'h';
  const auto report = evaluate(sk, truth, kTop100);
  const auto& r = report.at_k(100);
  return {heavy_found == 100 && r.nae_t <= kOverlapNaeLimit,
          std::to_string(heavy_found) + "/100 heavy labels in top(100), NAE(T_100)=" + fmt("%.4f", r.nae_t) +
              " (limit 0.15), theta=" + fmt("%.1f", sk.theta())};
}

}  // namespace
}  // namespace hdh

int main() {
  using namespace hdh;
  int failures = 0;
  auto report = [&](int n, const char* name, const Outcome& o, double secs) {
    std::printf("[%s] AC%d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto timed = [](auto&& fn) {
    Stopwatch clock;
    auto result = fn();
    return std::make_pair(std::move(result), clock.seconds());
  };

  {
    const auto [both, secs] = timed(min_counter_and_error_bound);
    report(1, "min-counter properties", both.first, secs);
    report(2, "SSS error bound", both.second, secs);
  }
  {
    const auto [o, secs] = timed(cached_gate_equivalence);
    report(3, "cached gate equivalence", o, secs);
  }
  {
    const auto [o, secs] = timed(hll_accuracy);
    report(4, "HLL accuracy", o, secs);
  }
  Stopwatch fixture_clock;
  const auto zipf = zipf_fixture();
  std::printf("# zipf stream: %zu entries, %zu labels, built in %.1fs\n", zipf.entries.size(),
              zipf.truth.label_count(), fixture_clock.seconds());
  HllSketch zipf_sketch(testing::hll_config(Variant::kSsss, 2000));
  {
    double insert_seconds = 0;
    const auto [o, secs] = timed([&] { return zipf_accuracy(zipf, zipf_sketch, insert_seconds); });
    report(5, "Zipf accuracy", o, secs);
  }
  {
    const auto [o, secs] = timed([&] { return merged_shards(zipf); });
    report(6, "merge degradation", o, secs);
  }
  {
    const auto [o, secs] = timed([&] { return sampling_necessity(zipf); });
    report(7, "sampling necessity", o, secs);
  }
  {
    const auto [o, secs] = timed(metric_goldens);
    report(8, "metric goldens", o, secs);
  }
  {
    const auto [o, secs] = timed([&] { return gate_and_round_trips(zipf_sketch); });
    report(9, "gate fast path and round trips", o, secs);
  }
  {
    const auto [o, secs] = timed(overlap_heavy_sets);
    report(10, "overlap heavy sets", o, secs);
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
