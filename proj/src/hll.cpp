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

#include "hdh/hll.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hdh/errors.hpp"

namespace hdh {

namespace {

double alpha_for(uint32_t r) {
  switch (r) {
    case 16: return 0.673;
    case 32: return 0.697;
    case 64: return 0.709;
    default: return 0.7213 / (1.0 + 1.079 / static_cast<double>(r));
  }
}

uint8_t max_rank(uint16_t log2_registers) { return static_cast<uint8_t>(64 - log2_registers + 1); }

unsigned __int128 inverse_term(uint8_t value) { return static_cast<unsigned __int128>(1) << (64 - value); }

void check_log2(uint16_t log2_registers) {
  if (log2_registers < HyperLogLog::kMinLog2Registers || log2_registers > HyperLogLog::kMaxLog2Registers) {
    throw ConfigError("HLL register count must be 2^" + std::to_string(HyperLogLog::kMinLog2Registers) +
                      "..2^" + std::to_string(HyperLogLog::kMaxLog2Registers) + ", got 2^" +
                      std::to_string(log2_registers));
  }
}

}  // namespace

HyperLogLog::HyperLogLog(uint16_t log2_registers, uint64_t seed)
    : log2_registers_(log2_registers), seed_(seed) {
  check_log2(log2_registers);
  registers_.assign(std::size_t{1} << log2_registers, 0);
  zero_registers_ = static_cast<uint32_t>(registers_.size());
  inverse_sum_ = static_cast<unsigned __int128>(registers_.size()) << 64;
}

void HyperLogLog::insert(HashValue item_hash) {
  const uint64_t index = item_hash.bits & (registers_.size() - 1);
  const uint64_t rest = item_hash.bits >> log2_registers_;
  const uint8_t rank = rest == 0 ? max_rank(log2_registers_)
                                 : static_cast<uint8_t>(std::countl_zero(rest) - log2_registers_ + 1);
  if (rank > registers_[index]) {
    set_register(index, rank);
    raise_watermark();
  }
}

void HyperLogLog::set_register(std::size_t index, uint8_t value) {
  const uint8_t old = registers_[index];
  inverse_sum_ -= inverse_term(old);
  inverse_sum_ += inverse_term(value);
  if (old == 0) --zero_registers_;
  registers_[index] = value;
}

double HyperLogLog::raw_estimate() const {
  const double r = static_cast<double>(registers_.size());
  const double harmonic = static_cast<double>(inverse_sum_) * 0x1.0p-64;
  const double estimate = alpha_for(register_count()) * r * r / harmonic;
  if (estimate <= 2.5 * r && zero_registers_ > 0) {
    return r * std::log(r / static_cast<double>(zero_registers_));
  }
  return estimate;
}

void HyperLogLog::raise_watermark() { watermark_ = std::max(watermark_, raw_estimate()); }

bool HyperLogLog::compatible_with(const HyperLogLog& other) const {
  return log2_registers_ == other.log2_registers_ && seed_ == other.seed_;
}

void HyperLogLog::merge(const HyperLogLog& other) {
  if (log2_registers_ != other.log2_registers_) {
    throw ConfigError("cannot merge HLL with 2^" + std::to_string(other.log2_registers_) +
                      " registers into one with 2^" + std::to_string(log2_registers_));
  }
  if (seed_ != other.seed_) throw ConfigError("cannot merge HLL sketches built with different seeds");
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    if (other.registers_[i] > registers_[i]) set_register(i, other.registers_[i]);
  }
  watermark_ = std::max(watermark_, other.watermark_);
  raise_watermark();
}

std::size_t HyperLogLog::serialized_size(uint16_t log2_registers) {
  return 2 + 8 + 8 + ((std::size_t{6} << log2_registers) + 7) / 8;
}

void HyperLogLog::serialize(ByteWriter& out) const {
  out.u16(log2_registers_);
  out.u64(seed_);
  out.f64(watermark_);
  const std::size_t packed_len = (registers_.size() * 6 + 7) / 8;
  std::vector<uint8_t> packed(packed_len, 0);
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    const std::size_t bit = i * 6;
    const unsigned v = registers_[i] & 0x3f;
    packed[bit / 8] |= static_cast<uint8_t>(v << (bit % 8));
    if (bit % 8 > 2) packed[bit / 8 + 1] |= static_cast<uint8_t>(v >> (8 - bit % 8));
  }
  out.bytes(packed);
}

HyperLogLog HyperLogLog::deserialize(ByteReader& in) {
  const std::size_t start = in.position();
  const uint16_t log2_registers = in.u16();
  if (log2_registers < kMinLog2Registers || log2_registers > kMaxLog2Registers) {
    throw ParseError("invalid HLL register count 2^" + std::to_string(log2_registers), start);
  }
  const uint64_t seed = in.u64();
  const std::size_t watermark_pos = in.position();
  const double watermark = in.f64();
  if (!(watermark >= 0.0) || std::isinf(watermark)) {
    throw ParseError("invalid HLL watermark", watermark_pos);
  }
  HyperLogLog hll(log2_registers, seed);
  const std::size_t packed_pos = in.position();
  const auto packed = in.bytes((hll.registers_.size() * 6 + 7) / 8);
  const uint8_t limit = max_rank(log2_registers);
  for (std::size_t i = 0; i < hll.registers_.size(); ++i) {
    const std::size_t bit = i * 6;
    unsigned v = packed[bit / 8] >> (bit % 8);
    if (bit % 8 > 2) v |= static_cast<unsigned>(packed[bit / 8 + 1]) << (8 - bit % 8);
    v &= 0x3f;
    if (v > limit) throw ParseError("HLL register value out of range", packed_pos + bit / 8);
    if (v != 0) hll.set_register(i, static_cast<uint8_t>(v));
  }
  hll.watermark_ = watermark;
  hll.raise_watermark();
  return hll;
}

}  // namespace hdh
