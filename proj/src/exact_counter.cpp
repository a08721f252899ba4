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

#include "hdh/exact_counter.hpp"

#include <algorithm>
#include <vector>

#include "hdh/errors.hpp"

namespace hdh {

void ExactCounter::merge(const ExactCounter& other) {
  if (seed_ != other.seed_) throw ConfigError("cannot merge exact counters built with different seeds");
  items_.insert(other.items_.begin(), other.items_.end());
}

void ExactCounter::serialize(ByteWriter& out) const {
  std::vector<uint64_t> sorted(items_.begin(), items_.end());
  std::sort(sorted.begin(), sorted.end());
  out.u64(seed_);
  out.u64(sorted.size());
  for (uint64_t h : sorted) out.u64(h);
}

ExactCounter ExactCounter::deserialize(ByteReader& in) {
  ExactCounter counter(0, in.u64());
  const std::size_t count_pos = in.position();
  const uint64_t count = in.u64();
  if (count > in.remaining() / 8) throw ParseError("exact counter item count exceeds payload", count_pos);
  counter.items_.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const std::size_t pos = in.position();
    if (!counter.items_.insert(in.u64()).second) throw ParseError("duplicate item hash in exact counter", pos);
  }
  return counter;
}

}  // namespace hdh
