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

#ifndef HDH_BYTE_IO_HPP_
#define HDH_BYTE_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdh/errors.hpp"

namespace hdh {

// Little-endian writer used by every on-disk layout.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { put_le(v, 2); }
  void u32(uint32_t v) { put_le(v, 4); }
  void u64(uint64_t v) { put_le(v, 8); }
  void f64(double v) { put_le(std::bit_cast<uint64_t>(v), 8); }

  void bytes(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void bytes(std::string_view data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
  }

  std::size_t size() const { return buf_.size(); }
  const std::vector<uint8_t>& buffer() const& { return buf_; }
  std::vector<uint8_t> release() && { return std::move(buf_); }

 private:
  void put_le(uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  std::vector<uint8_t> buf_;
};

// Bounds-checked little-endian reader. Every failure throws ParseError with
// the offset of the field that could not be read.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return static_cast<uint8_t>(get_le(1, "u8")); }
  uint16_t u16() { return static_cast<uint16_t>(get_le(2, "u16")); }
  uint32_t u32() { return static_cast<uint32_t>(get_le(4, "u32")); }
  uint64_t u64() { return get_le(8, "u64"); }
  double f64() { return std::bit_cast<double>(get_le(8, "f64")); }

  std::span<const uint8_t> bytes(std::size_t n) {
    require(n, "byte block");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string string(std::size_t n) {
    auto b = bytes(n);
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void require(std::size_t n, const char* what) const {
    if (n > remaining()) {
      throw ParseError(std::string("truncated input reading ") + what, pos_);
    }
  }

  uint64_t get_le(int width, const char* what) {
    require(static_cast<std::size_t>(width), what);
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace hdh

#endif  // HDH_BYTE_IO_HPP_
