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

#ifndef HDH_EXACT_COUNTER_HPP_
#define HDH_EXACT_COUNTER_HPP_

#include <cstdint>
#include <unordered_set>

#include "hdh/byte_io.hpp"
#include "hdh/hash.hpp"

namespace hdh {

// Set-backed distinct counter with zero error. Used as the reference counter
// in tests and for small exact runs.
//
// Serialized layout: u64 seed | u64 count | count x u64 item hashes, ascending.
class ExactCounter {
 public:
  // The register-count argument exists so both counters share one constructor
  // shape; it is ignored here.
  explicit ExactCounter(uint16_t /*log2_registers*/ = 0, uint64_t seed = kDefaultSeed) : seed_(seed) {}

  void insert(HashValue item_hash) { items_.insert(item_hash.bits); }
  double distinct() const { return static_cast<double>(items_.size()); }
  std::size_t size() const { return items_.size(); }

  void merge(const ExactCounter& other);
  bool compatible_with(const ExactCounter& other) const { return seed_ == other.seed_; }

  uint64_t seed() const { return seed_; }

  void serialize(ByteWriter& out) const;
  static ExactCounter deserialize(ByteReader& in);

  friend bool operator==(const ExactCounter& a, const ExactCounter& b) {
    return a.seed_ == b.seed_ && a.items_ == b.items_;
  }

 private:
  uint64_t seed_;
  std::unordered_set<uint64_t> items_;
};

}  // namespace hdh

#endif  // HDH_EXACT_COUNTER_HPP_
