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

#ifndef HDH_DISTINCT_COUNTER_HPP_
#define HDH_DISTINCT_COUNTER_HPP_

#include <concepts>
#include <cstdint>

#include "hdh/byte_io.hpp"
#include "hdh/exact_counter.hpp"
#include "hdh/hash.hpp"
#include "hdh/hll.hpp"

namespace hdh {

// What the space-saving sketches need from a count-distinct counter. distinct()
// must never decrease under insert or merge, and inserting a hash twice must
// not change it.
template <class C>
concept DistinctCounter = std::copy_constructible<C> && std::movable<C> && std::equality_comparable<C> &&
    requires(C c, const C& cc, HashValue h, uint16_t log2_registers, uint64_t seed, ByteWriter& w, ByteReader& r) {
      C(log2_registers, seed);
      c.insert(h);
      { cc.distinct() } -> std::same_as<double>;
      c.merge(cc);
      { cc.compatible_with(cc) } -> std::same_as<bool>;
      cc.serialize(w);
      { C::deserialize(r) } -> std::same_as<C>;
    };

// log2(r) value written in sketch headers for exact counters. HLL sketches
// always use log2(r) >= 4, so the two never collide.
inline constexpr uint16_t kExactCounterLog2 = 0;

template <DistinctCounter C>
constexpr bool is_exact_counter() {
  return std::same_as<C, ExactCounter>;
}

static_assert(DistinctCounter<HyperLogLog>);
static_assert(DistinctCounter<ExactCounter>);

}  // namespace hdh

#endif  // HDH_DISTINCT_COUNTER_HPP_
