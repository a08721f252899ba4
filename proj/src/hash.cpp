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

#include "hdh/hash.hpp"

#include <cmath>
#include <cstring>

namespace hdh {

namespace {

constexpr uint64_t kMul = 0x9e3779b97f4a7c15ULL;

uint64_t load_le(const char* p, std::size_t n) {
  uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

HashValue hash64(std::string_view bytes, uint64_t seed) {
  const std::size_t len = bytes.size();
  uint64_t h = mix64(seed + kMul) ^ (static_cast<uint64_t>(len) * kMul);
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    h = mix64(h ^ mix64(load_le(bytes.data() + i, 8)));
    h *= kMul;
  }
  if (i < len) {
    // tail word tagged with its length so "a" and "a\0" differ
    uint64_t tail = load_le(bytes.data() + i, len - i) | (static_cast<uint64_t>(len - i) << 59);
    h = mix64(h ^ mix64(tail));
    h *= kMul;
  }
  return HashValue{mix64(h ^ (h >> 32))};
}

double unit_interval(HashValue h) {
  constexpr double kTwoPowMinus64 = 0x1.0p-64;
  // double(bits) is correctly rounded; near 2^64 the sum rounds to 1.0 and is
  // pulled back inside the interval.
  double v = static_cast<double>(h.bits) * kTwoPowMinus64 + 0.5 * kTwoPowMinus64;
  if (v >= 1.0) v = std::nextafter(1.0, 0.0);
  return v;
}

}  // namespace hdh
