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

#include "hdh/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include "hdh/errors.hpp"

namespace hdh {

std::vector<Entry> drain(EntrySource& source) {
  std::vector<Entry> out;
  while (auto e = source.next()) out.push_back(std::move(*e));
  return out;
}

uint64_t write_delimited(std::ostream& out, EntrySource& source, char delimiter) {
  uint64_t n = 0;
  while (auto e = source.next()) {
    out << e->label << delimiter << e->item << '\n';
    ++n;
  }
  return n;
}

uint64_t Rng::below(uint64_t n) {
  // rejection on the top of the range keeps the result unbiased
  const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::string item_hex(uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return s;
}

void ZipfSpec::validate() const {
  if (labels == 0) throw ConfigError("zipf: label count must be at least 1");
  if (!(exponent > 0.0) || std::isinf(exponent)) throw ConfigError("zipf: exponent must be positive");
}

ZipfGenerator::ZipfGenerator(const ZipfSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec.validate();
  cumulative_.resize(spec.labels);
  double total = 0.0;
  for (uint64_t rank = 1; rank <= spec.labels; ++rank) {
    total += std::pow(static_cast<double>(rank), -spec.exponent);
    cumulative_[rank - 1] = total;
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double ZipfGenerator::probability(uint64_t rank) const {
  if (rank == 0 || rank > cumulative_.size()) return 0.0;
  return rank == 1 ? cumulative_[0] : cumulative_[rank - 1] - cumulative_[rank - 2];
}

uint64_t ZipfGenerator::draw_rank() {
  const double u = rng_.uniform01();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<uint64_t>(it - cumulative_.begin()) + 1;
}

std::optional<Entry> ZipfGenerator::next() {
  if (emitted_ >= spec_.entries) return std::nullopt;
  ++emitted_;
  const uint64_t rank = draw_rank();
  return Entry{label_for_rank(rank), item_hex(rng_.bits())};
}

void OverlapSpec::validate() const {
  if (universe_size == 0 || common_size == 0 || small_set_size == 0 || heavy_set_size == 0) {
    throw ConfigError("overlap: sizes must be at least 1");
  }
  if (common_size > universe_size) throw ConfigError("overlap: common pool larger than the universe");
  if (small_set_size > common_size) throw ConfigError("overlap: small sets larger than the common pool");
  if (heavy_set_size > universe_size) throw ConfigError("overlap: heavy sets larger than the universe");
  if (universe_size > std::numeric_limits<uint32_t>::max() ||
      small_sets + heavy_sets > std::numeric_limits<uint32_t>::max()) {
    throw ConfigError("overlap: universe and set counts must fit in 32 bits");
  }
}

std::vector<uint64_t> sample_without_replacement(Rng& rng, uint64_t n, uint64_t k) {
  std::vector<uint64_t> out;
  out.reserve(k);
  std::unordered_set<uint64_t> seen;
  seen.reserve(k);
  for (uint64_t j = n - k; j < n; ++j) {
    const uint64_t t = rng.below(j + 1);
    const uint64_t pick = seen.insert(t).second ? t : j;
    if (pick == j) seen.insert(j);
    out.push_back(pick);
  }
  return out;
}

OverlapGenerator::OverlapGenerator(const OverlapSpec& spec) : spec_(spec) {
  spec.validate();
  Rng rng(spec.seed);
  entries_.reserve(spec.total_entries());
  for (uint64_t i = 0; i < spec.small_sets; ++i) {
    for (uint64_t item : sample_without_replacement(rng, spec.common_size, spec.small_set_size)) {
      entries_.emplace_back(static_cast<uint32_t>(i), static_cast<uint32_t>(item));
    }
  }
  for (uint64_t j = 0; j < spec.heavy_sets; ++j) {
    for (uint64_t item : sample_without_replacement(rng, spec.universe_size, spec.heavy_set_size)) {
      entries_.emplace_back(static_cast<uint32_t>(spec.small_sets + j), static_cast<uint32_t>(item));
    }
  }
  // Fisher-Yates with our own bounded draw
  for (std::size_t i = entries_.size(); i > 1; --i) {
    std::swap(entries_[i - 1], entries_[rng.below(i)]);
  }
}

std::optional<Entry> OverlapGenerator::next() {
  if (pos_ >= entries_.size()) return std::nullopt;
  const auto [label_id, item_id] = entries_[pos_++];
  std::string label = label_id < spec_.small_sets ? small_label(label_id) : heavy_label(label_id - spec_.small_sets);
  return Entry{std::move(label), std::to_string(item_id)};
}

DelimitedReader::DelimitedReader(const std::string& path, char delimiter, std::size_t label_col,
                                 std::size_t item_col)
    : path_(path), in_(path, std::ios::binary), delimiter_(delimiter), label_col_(label_col), item_col_(item_col) {
  if (!in_) throw IoError("cannot open '" + path + "' for reading");
  if (label_col == item_col) throw ConfigError("label and item columns must differ");
}

std::optional<Entry> DelimitedReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++lines_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::optional<std::string_view> label, item;
    std::size_t col = 0, start = 0;
    const std::string_view view(line);
    for (;;) {
      const std::size_t end = view.find(delimiter_, start);
      const auto field = view.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      if (col == label_col_) label = field;
      if (col == item_col_) item = field;
      if (end == std::string_view::npos) break;
      start = end + 1;
      ++col;
    }
    if (!label || !item) {
      ++skipped_;
      continue;
    }
    return Entry{std::string(*label), std::string(*item)};
  }
  if (in_.bad()) throw IoError("read error on '" + path_ + "'");
  if (lines_ > 0 && lines_ == skipped_) {
    throw IoError("no valid lines in '" + path_ + "' (" + std::to_string(skipped_) + " skipped)");
  }
  return std::nullopt;
}

}  // namespace hdh
