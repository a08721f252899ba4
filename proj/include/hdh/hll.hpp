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

#ifndef HDH_HLL_HPP_
#define HDH_HLL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "hdh/byte_io.hpp"
#include "hdh/hash.hpp"

namespace hdh {

/**
 * Dense HyperLogLog with a monotone estimate.
 *
 * The register index is taken from the low log2(r) bits of the item hash and
 * the rank from the leading zeros of the remaining bits. The estimator is the
 * classic harmonic mean with linear counting below 2.5r. That estimator dips
 * once, at the switch from linear counting to the raw estimate, so every
 * register change also raises a watermark and distinct() reports the
 * watermark. The reported value therefore never decreases under insert or
 * merge.
 *
 * The harmonic sum is kept as an exact 128-bit fixed-point integer, so the
 * estimate is a pure function of the register contents (and the watermark)
 * regardless of the order in which registers were raised.
 *
 * Serialized layout (little-endian):
 *   u16 log2(r) | u64 seed | u64 watermark (IEEE-754 bits) | packed 6-bit registers
 * Register i occupies bits [6i, 6i+6) of the packed stream, least significant
 * bit first.
 */
class HyperLogLog {
 public:
  static constexpr uint16_t kMinLog2Registers = 4;
  static constexpr uint16_t kMaxLog2Registers = 16;
  static constexpr uint16_t kDefaultLog2Registers = 10;

  explicit HyperLogLog(uint16_t log2_registers = kDefaultLog2Registers, uint64_t seed = kDefaultSeed);

  void insert(HashValue item_hash);

  // Monotone cardinality estimate.
  double distinct() const { return watermark_; }

  // Estimator over the current registers alone, without the watermark.
  double raw_estimate() const;

  // Pointwise register max. Throws ConfigError on register count or seed mismatch.
  void merge(const HyperLogLog& other);
  bool compatible_with(const HyperLogLog& other) const;

  uint16_t log2_registers() const { return log2_registers_; }
  uint32_t register_count() const { return static_cast<uint32_t>(registers_.size()); }
  uint64_t seed() const { return seed_; }
  double watermark() const { return watermark_; }
  std::span<const uint8_t> registers() const { return registers_; }

  void serialize(ByteWriter& out) const;
  static HyperLogLog deserialize(ByteReader& in);

  static std::size_t serialized_size(uint16_t log2_registers);

  friend bool operator==(const HyperLogLog& a, const HyperLogLog& b) {
    return a.log2_registers_ == b.log2_registers_ && a.seed_ == b.seed_ &&
           a.registers_ == b.registers_ && a.watermark_ == b.watermark_;
  }

 private:
  void set_register(std::size_t index, uint8_t value);
  void raise_watermark();

  uint16_t log2_registers_;
  uint64_t seed_;
  std::vector<uint8_t> registers_;
  // sum over registers of 2^(64 - register); exact because register <= 61
  unsigned __int128 inverse_sum_ = 0;
  uint32_t zero_registers_ = 0;
  double watermark_ = 0.0;
};

}  // namespace hdh

#endif  // HDH_HLL_HPP_
