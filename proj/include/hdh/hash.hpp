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

#ifndef HDH_HASH_HPP_
#define HDH_HASH_HPP_

#include <cstdint>
#include <string_view>

namespace hdh {

// A 64-bit item digest. Strongly typed so raw integers are not passed where
// a hashed value is expected.
struct HashValue {
  uint64_t bits = 0;

  friend constexpr bool operator==(HashValue, HashValue) = default;
};

inline constexpr uint64_t kDefaultSeed = 0;

// splitmix64 finalizer. Full avalanche on 64-bit words.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Seeded hash of an arbitrary byte string. Stable across platforms and runs.
HashValue hash64(std::string_view bytes, uint64_t seed = kDefaultSeed);

// Maps a digest into the open interval (0,1): (bits + 0.5) / 2^64.
double unit_interval(HashValue h);

// Derives an independent child seed so that different consumers of one user
// seed (register selection, sampling, ground truth) never share a hash function.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace hdh

#endif  // HDH_HASH_HPP_
