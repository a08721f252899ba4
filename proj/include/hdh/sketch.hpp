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

#ifndef HDH_SKETCH_HPP_
#define HDH_SKETCH_HPP_

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdh/byte_io.hpp"
#include "hdh/distinct_counter.hpp"
#include "hdh/errors.hpp"
#include "hdh/hash.hpp"

namespace hdh {

// SSS keeps an offset per counter (value of the evicted minimum). RSSS hands
// the minimum counter itself to the new label. SSSS recycles like RSSS but
// only admits a new label when 1/h(item) exceeds the minimum counter value.
enum class Variant : uint8_t { kSss = 0, kRsss = 1, kSsss = 2 };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::kSss: return "sss";
    case Variant::kRsss: return "rsss";
    case Variant::kSsss: return "ssss";
  }
  return "?";
}

inline Variant parse_variant(std::string_view name) {
  if (name == "sss") return Variant::kSss;
  if (name == "rsss") return Variant::kRsss;
  if (name == "ssss") return Variant::kSsss;
  throw ConfigError("unknown sketch variant '" + std::string(name) + "' (expected sss, rsss or ssss)");
}

inline constexpr std::size_t kMaxLabelBytes = 0xffff;

struct SketchConfig {
  Variant variant = Variant::kSsss;
  uint32_t capacity = 2000;
  // log2 of the HLL register count; kExactCounterLog2 for exact counters
  uint16_t log2_registers = HyperLogLog::kDefaultLog2Registers;
  uint64_t sample_seed = derive_seed(kDefaultSeed, 1);
  uint64_t register_seed = derive_seed(kDefaultSeed, 2);

  // Sampling and register hashes drawn from one user seed.
  static SketchConfig from_seed(Variant variant, uint32_t capacity, uint16_t log2_registers, uint64_t seed) {
    return SketchConfig{variant, capacity, log2_registers, derive_seed(seed, 1), derive_seed(seed, 2)};
  }

  friend bool operator==(const SketchConfig&, const SketchConfig&) = default;
};

struct SketchStats {
  uint64_t inserts = 0;
  // new labels turned away by the sampling gate (SSSS only)
  uint64_t gate_rejections = 0;
  uint64_t min_scans = 0;
  uint64_t evictions = 0;

  SketchStats& operator+=(const SketchStats& o) {
    inserts += o.inserts;
    gate_rejections += o.gate_rejections;
    min_scans += o.min_scans;
    evictions += o.evictions;
    return *this;
  }
  friend bool operator==(const SketchStats&, const SketchStats&) = default;
};

struct TopEntry {
  std::string label;
  double estimate = 0.0;

  friend bool operator==(const TopEntry&, const TopEntry&) = default;
};

// Descending by estimate, ties by ascending label bytes.
using TopList = std::vector<TopEntry>;

inline constexpr char kSketchMagic[4] = {'S', 'S', 'S', 'S'};
inline constexpr uint8_t kSketchFormatVersion = 1;

// Fixed-size prefix of a serialized sketch.
struct SketchHeader {
  SketchConfig config;
  double theta = 0.0;
  uint32_t entry_count = 0;

  bool exact_counters() const { return config.log2_registers == kExactCounterLog2; }
};

// Parses and validates the header fields. Leaves `in` positioned at the first entry.
inline SketchHeader read_sketch_header(ByteReader& in) {
  const auto magic = in.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kSketchMagic))) {
    throw ParseError("bad magic, not a sketch file", 0);
  }
  const std::size_t version_pos = in.position();
  const uint8_t version = in.u8();
  if (version != kSketchFormatVersion) {
    throw ParseError("unsupported sketch format version " + std::to_string(version), version_pos);
  }
  SketchHeader h;
  const std::size_t variant_pos = in.position();
  const uint8_t variant = in.u8();
  if (variant > static_cast<uint8_t>(Variant::kSsss)) {
    throw ParseError("unknown sketch variant " + std::to_string(variant), variant_pos);
  }
  h.config.variant = static_cast<Variant>(variant);
  const std::size_t capacity_pos = in.position();
  h.config.capacity = in.u32();
  if (h.config.capacity == 0) throw ParseError("sketch capacity must be positive", capacity_pos);
  const std::size_t log2_pos = in.position();
  h.config.log2_registers = in.u16();
  if (h.config.log2_registers != kExactCounterLog2 &&
      (h.config.log2_registers < HyperLogLog::kMinLog2Registers ||
       h.config.log2_registers > HyperLogLog::kMaxLog2Registers)) {
    throw ParseError("invalid register count 2^" + std::to_string(h.config.log2_registers), log2_pos);
  }
  h.config.sample_seed = in.u64();
  h.config.register_seed = in.u64();
  const std::size_t theta_pos = in.position();
  h.theta = in.f64();
  if (!(h.theta >= 0.0) || std::isinf(h.theta)) throw ParseError("invalid theta", theta_pos);
  const std::size_t count_pos = in.position();
  h.entry_count = in.u32();
  if (h.entry_count > h.config.capacity) {
    throw ParseError("entry count " + std::to_string(h.entry_count) + " exceeds capacity " +
                         std::to_string(h.config.capacity),
                     count_pos);
  }
  return h;
}

inline SketchHeader read_sketch_header(std::span<const uint8_t> bytes) {
  ByteReader in(bytes);
  return read_sketch_header(in);
}

/**
 * Space-Saving Sets sketch for heavy distinct hitters.
 *
 * Holds at most `capacity` labels, each with a count-distinct counter. A label
 * already in the sketch always has its item added. A new label arriving at a
 * full sketch displaces the label with the smallest counter value (ties go to
 * the lexicographically smallest label):
 *
 *   - SSS:  the new label gets a fresh counter plus an offset equal to the
 *           evicted value.
 *   - RSSS: the new label takes over the evicted counter as is.
 *   - SSSS: as RSSS, but only when 1/h(item) is above the minimum counter
 *           value. The minimum is cached in theta, a lower bound on the true
 *           minimum, so items with 1/h(item) <= theta are rejected without a
 *           scan. The result is identical to scanning on every insert.
 *
 * The minimum is located through a lazy min-heap: keys are counter values as
 * of the last time they were looked at, and since counter values only grow
 * every key is a lower bound. A stale top is refreshed and pushed back until
 * the top key is current; that entry is then the exact minimum. Inserts into
 * resident labels never touch the heap.
 *
 * Not thread-safe; one writer at a time.
 */
template <DistinctCounter Counter>
class SpaceSavingSets {
 public:
  struct Slot {
    Counter counter;
    double offset = 0.0;

    double value() const { return counter.distinct() + offset; }
  };
  using EntryMap = std::map<std::string, Slot, std::less<>>;

  explicit SpaceSavingSets(SketchConfig config) : config_(config) { validate(config); }

  void insert(std::string_view label, std::string_view item) {
    if (label.size() > kMaxLabelBytes) {
      throw std::length_error("label of " + std::to_string(label.size()) + " bytes exceeds " +
                              std::to_string(kMaxLabelBytes));
    }
    ++stats_.inserts;
    const HashValue item_hash = hash64(item, config_.register_seed);
    if (auto it = entries_.find(label); it != entries_.end()) {
      it->second.counter.insert(item_hash);
      return;
    }
    if (entries_.size() < config_.capacity) {
      auto it = entries_.emplace(std::string(label), Slot{new_counter(), 0.0}).first;
      it->second.counter.insert(item_hash);
      heap_.push(HeapItem{it->second.value(), it->first});
      return;
    }
    switch (config_.variant) {
      case Variant::kSss: {
        ++stats_.min_scans;
        auto victim = find_min();
        const double offset = victim->second.value();
        heap_.pop();
        entries_.erase(victim);
        ++stats_.evictions;
        auto it = entries_.emplace(std::string(label), Slot{new_counter(), offset}).first;
        it->second.counter.insert(item_hash);
        heap_.push(HeapItem{it->second.value(), it->first});
        return;
      }
      case Variant::kRsss: {
        ++stats_.min_scans;
        recycle(find_min(), label, item_hash);
        return;
      }
      case Variant::kSsss: {
        const double sample = sample_value(item);
        if (sample <= theta_) {
          ++stats_.gate_rejections;
          return;
        }
        ++stats_.min_scans;
        auto victim = find_min();
        theta_ = victim->second.counter.distinct();
        if (sample > theta_) {
          recycle(victim, label, item_hash);
        } else {
          ++stats_.gate_rejections;
        }
        return;
      }
    }
  }

  // Counter value for a resident label, the minimum counter value for any
  // other label, and 0 on an empty sketch.
  double query(std::string_view label) const {
    if (auto it = entries_.find(label); it != entries_.end()) return it->second.value();
    return min_value();
  }

  // Smallest counter value (offsets included), 0 when empty.
  double min_value() const {
    if (entries_.empty()) return 0.0;
    double m = entries_.begin()->second.value();
    for (const auto& [label, slot] : entries_) m = std::min(m, slot.value());
    return m;
  }

  TopList top(std::size_t k) const {
    TopList all;
    all.reserve(entries_.size());
    for (const auto& [label, slot] : entries_) all.push_back(TopEntry{label, slot.value()});
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                      [](const TopEntry& a, const TopEntry& b) {
                        if (a.estimate != b.estimate) return a.estimate > b.estimate;
                        return a.label < b.label;
                      });
    all.resize(n);
    return all;
  }

  /**
   * Folds `other` into this sketch. Shared labels merge their counters (SSS
   * keeps the larger offset), other labels are adopted, and then only the
   * `capacity` largest values survive. Ties at the cut are kept in label
   * order, which makes merge(A, B) and merge(B, A) agree. Chains of three or
   * more merges depend on the order because each step truncates.
   *
   * Throws ConfigError, leaving this sketch untouched, if the variant,
   * capacity, register count or seeds differ.
   */
  void merge(const SpaceSavingSets& other) {
    check_mergeable(other.config_);
    for (const auto& [label, slot] : other.entries_) {
      if (auto it = entries_.find(label); it != entries_.end()) {
        it->second.counter.merge(slot.counter);
        it->second.offset = std::max(it->second.offset, slot.offset);
      } else {
        entries_.emplace(label, slot);
      }
    }
    if (entries_.size() > config_.capacity) {
      std::vector<typename EntryMap::iterator> order;
      order.reserve(entries_.size());
      for (auto it = entries_.begin(); it != entries_.end(); ++it) order.push_back(it);
      std::stable_sort(order.begin(), order.end(), [](auto a, auto b) {
        return a->second.value() > b->second.value();
      });
      for (std::size_t i = config_.capacity; i < order.size(); ++i) entries_.erase(order[i]);
    }
    if (config_.variant == Variant::kSsss) theta_ = min_distinct();
    stats_ += other.stats_;
    rebuild_heap();
  }

  // 1/h(item) under the sampling hash.
  double sample_value(std::string_view item) const {
    return 1.0 / unit_interval(hash64(item, config_.sample_seed));
  }

  bool contains(std::string_view label) const { return entries_.find(label) != entries_.end(); }
  const Slot* find(std::string_view label) const {
    auto it = entries_.find(label);
    return it == entries_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return entries_.size() >= config_.capacity; }
  uint32_t capacity() const { return config_.capacity; }
  Variant variant() const { return config_.variant; }
  const SketchConfig& config() const { return config_; }
  double theta() const { return theta_; }
  const SketchStats& stats() const { return stats_; }
  const EntryMap& entries() const { return entries_; }

  /**
   * Layout, little-endian:
   *   "SSSS" | u8 version | u8 variant | u32 capacity | u16 log2(r) |
   *   u64 sample seed | u64 register seed | f64 theta | u32 entry count |
   *   entries in ascending label order: u16 label length | label | f64 offset | counter payload
   * log2(r) is 0 for exact counters. Stats are not stored.
   */
  std::vector<uint8_t> serialize() const {
    ByteWriter out;
    out.bytes(std::string_view(kSketchMagic, 4));
    out.u8(kSketchFormatVersion);
    out.u8(static_cast<uint8_t>(config_.variant));
    out.u32(config_.capacity);
    out.u16(config_.log2_registers);
    out.u64(config_.sample_seed);
    out.u64(config_.register_seed);
    out.f64(theta_);
    out.u32(static_cast<uint32_t>(entries_.size()));
    for (const auto& [label, slot] : entries_) {
      out.u16(static_cast<uint16_t>(label.size()));
      out.bytes(label);
      out.f64(slot.offset);
      slot.counter.serialize(out);
    }
    return std::move(out).release();
  }

  static SpaceSavingSets deserialize(std::span<const uint8_t> bytes) {
    ByteReader in(bytes);
    const SketchHeader header = read_sketch_header(in);
    if (header.exact_counters() != is_exact_counter<Counter>()) {
      throw ParseError(header.exact_counters() ? "sketch uses exact counters, expected HLL"
                                               : "sketch uses HLL counters, expected exact",
                       10);
    }
    SpaceSavingSets sk(header.config);
    sk.theta_ = header.theta;
    const std::string* previous = nullptr;
    for (uint32_t i = 0; i < header.entry_count; ++i) {
      const std::size_t label_pos = in.position();
      const uint16_t len = in.u16();
      if (len > in.remaining()) throw ParseError("label length exceeds remaining input", label_pos);
      std::string label = in.string(len);
      if (previous != nullptr && !(*previous < label)) {
        throw ParseError("labels not in strictly ascending order", label_pos);
      }
      const std::size_t offset_pos = in.position();
      const double offset = in.f64();
      if (!(offset >= 0.0) || std::isinf(offset) ||
          (offset != 0.0 && header.config.variant != Variant::kSss)) {
        throw ParseError("invalid counter offset", offset_pos);
      }
      const std::size_t counter_pos = in.position();
      Counter counter = Counter::deserialize(in);
      if (!counter.compatible_with(sk.new_counter())) {
        throw ParseError("counter configuration does not match sketch header", counter_pos);
      }
      auto it = sk.entries_.emplace_hint(sk.entries_.end(), std::move(label), Slot{std::move(counter), offset});
      previous = &it->first;
    }
    if (!in.done()) throw ParseError("trailing bytes after last entry", in.position());
    sk.rebuild_heap();
    return sk;
  }

 private:
  struct HeapItem {
    double key;
    std::string label;
  };
  struct HeapAfter {
    bool operator()(const HeapItem& a, const HeapItem& b) const {
      if (a.key != b.key) return a.key > b.key;
      return a.label > b.label;
    }
  };

  static void validate(const SketchConfig& c) {
    if (c.capacity == 0) throw ConfigError("sketch capacity must be positive");
    if constexpr (is_exact_counter<Counter>()) {
      if (c.log2_registers != kExactCounterLog2) {
        throw ConfigError("exact-counter sketches require log2_registers = 0");
      }
    } else {
      if (c.log2_registers < HyperLogLog::kMinLog2Registers || c.log2_registers > HyperLogLog::kMaxLog2Registers) {
        throw ConfigError("register count must be 2^4..2^16, got 2^" + std::to_string(c.log2_registers));
      }
    }
  }

  void check_mergeable(const SketchConfig& o) const {
    if (o.variant != config_.variant) {
      throw ConfigError(std::string("cannot merge ") + to_string(o.variant) + " sketch into " +
                        to_string(config_.variant));
    }
    if (o.capacity != config_.capacity) {
      throw ConfigError("cannot merge sketches of capacity " + std::to_string(o.capacity) + " and " +
                        std::to_string(config_.capacity));
    }
    if (o.log2_registers != config_.log2_registers) {
      throw ConfigError("cannot merge sketches with different counter register counts");
    }
    if (o.sample_seed != config_.sample_seed || o.register_seed != config_.register_seed) {
      throw ConfigError("cannot merge sketches built with different seeds");
    }
  }

  Counter new_counter() const { return Counter(config_.log2_registers, config_.register_seed); }

  double min_distinct() const {
    if (entries_.empty()) return 0.0;
    double m = entries_.begin()->second.counter.distinct();
    for (const auto& [label, slot] : entries_) m = std::min(m, slot.counter.distinct());
    return m;
  }

  // Entry with the smallest value, ties to the smallest label. On return it is
  // also the heap top with a current key.
  typename EntryMap::iterator find_min() {
    for (;;) {
      assert(!heap_.empty());
      auto it = entries_.find(heap_.top().label);
      assert(it != entries_.end());
      const double current = it->second.value();
      if (current == heap_.top().key) return it;
      HeapItem refreshed{current, heap_.top().label};
      heap_.pop();
      heap_.push(std::move(refreshed));
    }
  }

  // Re-keys the minimum entry (the current heap top) to `label` and inserts the item.
  void recycle(typename EntryMap::iterator victim, std::string_view label, HashValue item_hash) {
    heap_.pop();
    auto node = entries_.extract(victim);
    node.key() = std::string(label);
    auto it = entries_.insert(std::move(node)).position;
    it->second.counter.insert(item_hash);
    ++stats_.evictions;
    heap_.push(HeapItem{it->second.value(), it->first});
  }

  void rebuild_heap() {
    std::vector<HeapItem> items;
    items.reserve(entries_.size());
    for (const auto& [label, slot] : entries_) items.push_back(HeapItem{slot.value(), label});
    heap_ = decltype(heap_)(HeapAfter{}, std::move(items));
  }

  SketchConfig config_;
  EntryMap entries_;
  double theta_ = 0.0;
  SketchStats stats_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, HeapAfter> heap_;
};

using HllSketch = SpaceSavingSets<HyperLogLog>;
using ExactSketch = SpaceSavingSets<ExactCounter>;

}  // namespace hdh

#endif  // HDH_SKETCH_HPP_
