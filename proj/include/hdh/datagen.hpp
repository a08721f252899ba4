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

#ifndef HDH_DATAGEN_HPP_
#define HDH_DATAGEN_HPP_

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hdh {

// One (label, item) element of a labeled stream.
struct Entry {
  std::string label;
  std::string item;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Pull-based stream of entries. Single consumer.
class EntrySource {
 public:
  virtual ~EntrySource() = default;
  virtual std::optional<Entry> next() = 0;
};

std::vector<Entry> drain(EntrySource& source);

// Writes "label<delim>item" lines and returns the number written.
uint64_t write_delimited(std::ostream& out, EntrySource& source, char delimiter = ',');

// mt19937_64 plus distribution code of our own, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t bits() { return engine_(); }
  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // uniform in [0, n), n > 0
  uint64_t below(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

struct ZipfSpec {
  uint64_t labels = 100'000;
  double exponent = 0.2;
  uint64_t entries = 1'000'000;
  uint64_t seed = 1;

  void validate() const;

  // 10^5 labels, 10^6 entries
  static ZipfSpec desk() { return ZipfSpec{}; }
  // 10^8 labels, 10^8 entries
  static ZipfSpec paper() { return ZipfSpec{100'000'000, 0.2, 100'000'000, 1}; }
};

// Labels are the decimal rank (1 = most frequent), drawn with probability
// proportional to rank^-exponent. Items are independent uniform 64-bit values
// written as 16 hex digits.
class ZipfGenerator : public EntrySource {
 public:
  explicit ZipfGenerator(const ZipfSpec& spec);

  std::optional<Entry> next() override;

  // 1-based rank of the next label draw
  uint64_t draw_rank();

  // cumulative()[i] = sum of weights of ranks 1..i+1, normalized so the last is 1
  const std::vector<double>& cumulative() const { return cumulative_; }
  double probability(uint64_t rank) const;

  static std::string label_for_rank(uint64_t rank) { return std::to_string(rank); }

 private:
  ZipfSpec spec_;
  Rng rng_;
  std::vector<double> cumulative_;
  uint64_t emitted_ = 0;
};

std::string item_hex(uint64_t v);

struct OverlapSpec {
  uint64_t universe_size = 1'000'000;
  uint64_t common_size = 100'000;
  uint64_t small_sets = 100'000;
  uint64_t small_set_size = 1000;
  uint64_t heavy_sets = 1000;
  uint64_t heavy_set_size = 20'000;
  uint64_t seed = 1;

  void validate() const;

  // universe 10^5, common 10^4, 10^4 small sets of 100, 100 heavy sets of 5000
  static OverlapSpec desk() { return OverlapSpec{100'000, 10'000, 10'000, 100, 100, 5000, 1}; }
  static OverlapSpec paper() { return OverlapSpec{}; }

  uint64_t total_entries() const { return small_sets * small_set_size + heavy_sets * heavy_set_size; }
};

// Small sets ("s<i>") draw their items without replacement from the common
// pool [0, common_size); heavy sets ("h<j>") draw theirs from the full universe
// [0, universe_size). All entries are emitted in one seeded shuffle. Items are
// written as decimal ids.
class OverlapGenerator : public EntrySource {
 public:
  explicit OverlapGenerator(const OverlapSpec& spec);

  std::optional<Entry> next() override;

  static std::string small_label(uint64_t i) { return "s" + std::to_string(i); }
  static std::string heavy_label(uint64_t j) { return "h" + std::to_string(j); }

 private:
  OverlapSpec spec_;
  // (label id, item id); label ids >= small_sets are heavy
  std::vector<std::pair<uint32_t, uint32_t>> entries_;
  std::size_t pos_ = 0;
};

// k distinct values from [0, n), in draw order (Floyd's algorithm).
std::vector<uint64_t> sample_without_replacement(Rng& rng, uint64_t n, uint64_t k);

// Reads one entry per line from a delimited text file. Lines lacking either
// column are skipped and counted. An empty file is an empty stream; a
// non-empty file with no usable line raises IoError once exhausted.
class DelimitedReader : public EntrySource {
 public:
  DelimitedReader(const std::string& path, char delimiter = ',', std::size_t label_col = 0,
                  std::size_t item_col = 1);

  std::optional<Entry> next() override;

  uint64_t skipped() const { return skipped_; }
  uint64_t lines() const { return lines_; }

 private:
  std::string path_;
  std::ifstream in_;
  char delimiter_;
  std::size_t label_col_;
  std::size_t item_col_;
  uint64_t lines_ = 0;
  uint64_t skipped_ = 0;
};

}  // namespace hdh

#endif  // HDH_DATAGEN_HPP_
