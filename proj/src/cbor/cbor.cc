// Copyright 2026 The fido2cap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fido2cap/cbor/cbor.h"

#include <limits>

namespace fido2cap::cbor {
namespace {

constexpr int kMaxDepth = 16;

enum MajorType : uint8_t {
  kUnsigned = 0,
  kNegative = 1,
  kByteString = 2,
  kTextString = 3,
  kArray = 4,
  kMap = 5,
  kSimple = 7,
};

void write_head(Bytes& out, uint8_t major, uint64_t arg) {
  uint8_t mt = static_cast<uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(mt | static_cast<uint8_t>(arg));
  } else if (arg <= 0xff) {
    out.push_back(mt | 24);
    out.push_back(static_cast<uint8_t>(arg));
  } else if (arg <= 0xffff) {
    out.push_back(mt | 25);
    out.push_back(static_cast<uint8_t>(arg >> 8));
    out.push_back(static_cast<uint8_t>(arg));
  } else if (arg <= 0xffffffffULL) {
    out.push_back(mt | 26);
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(arg >> s));
  } else {
    out.push_back(mt | 27);
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(arg >> s));
  }
}

void encode_into(Bytes& out, const Value& v) {
  if (v.is_int()) {
    int64_t i = v.as_int();
    if (i >= 0) {
      write_head(out, kUnsigned, static_cast<uint64_t>(i));
    } else {
      write_head(out, kNegative, static_cast<uint64_t>(-(i + 1)));
    }
  } else if (v.is_bytes()) {
    write_head(out, kByteString, v.as_bytes().size());
    out.insert(out.end(), v.as_bytes().begin(), v.as_bytes().end());
  } else if (v.is_text()) {
    write_head(out, kTextString, v.as_text().size());
    out.insert(out.end(), v.as_text().begin(), v.as_text().end());
  } else if (v.is_array()) {
    write_head(out, kArray, v.as_array().size());
    for (const auto& item : v.as_array()) encode_into(out, item);
  } else if (v.is_map()) {
    write_head(out, kMap, v.as_map().size());
    for (const auto& [k, val] : v.as_map()) {
      encode_into(out, k);
      encode_into(out, val);
    }
  } else if (v.is_bool()) {
    out.push_back(v.as_bool() ? 0xf5 : 0xf4);
  } else {
    out.push_back(0xf6);
  }
}

class Decoder {
 public:
  explicit Decoder(ByteSpan data) : data_(data) {}

  Result<Value> item(int depth) {
    if (depth > kMaxDepth) return Error(Errc::kMalformedCbor, "nesting too deep");
    if (pos_ >= data_.size()) return Error(Errc::kTruncated, "CBOR item truncated");
    uint8_t initial = data_[pos_++];
    uint8_t major = initial >> 5;
    uint8_t info = initial & 0x1f;

    if (major == kSimple) {
      switch (info) {
        case 20: return Value(false);
        case 21: return Value(true);
        case 22: return Value(Null{});
        default: return Error(Errc::kMalformedCbor, "unsupported simple value");
      }
    }
    auto arg = argument(info);
    if (!arg) return arg.error();
    uint64_t n = *arg;

    switch (major) {
      case kUnsigned:
        if (n > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
          return Error(Errc::kMalformedCbor, "integer out of range");
        }
        return Value(static_cast<int64_t>(n));
      case kNegative:
        if (n > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
          return Error(Errc::kMalformedCbor, "integer out of range");
        }
        return Value(-1 - static_cast<int64_t>(n));
      case kByteString:
      case kTextString: {
        if (n > data_.size() - pos_) {
          return Error(Errc::kTruncated, "CBOR string truncated");
        }
        auto begin = data_.begin() + static_cast<ptrdiff_t>(pos_);
        auto end = begin + static_cast<ptrdiff_t>(n);
        pos_ += n;
        if (major == kByteString) return Value(Bytes(begin, end));
        std::string s(begin, end);
        if (!is_valid_utf8(s)) return Error(Errc::kMalformedCbor, "invalid UTF-8 text");
        return Value(std::move(s));
      }
      case kArray: {
        if (n > data_.size() - pos_) return Error(Errc::kTruncated, "CBOR array truncated");
        Array arr;
        for (uint64_t i = 0; i < n; ++i) {
          auto v = item(depth + 1);
          if (!v) return v.error();
          arr.push_back(std::move(*v));
        }
        return Value(std::move(arr));
      }
      case kMap: {
        if (n > data_.size() - pos_) return Error(Errc::kTruncated, "CBOR map truncated");
        Map map;
        for (uint64_t i = 0; i < n; ++i) {
          auto k = item(depth + 1);
          if (!k) return k.error();
          auto v = item(depth + 1);
          if (!v) return v.error();
          for (const auto& [existing, unused] : map) {
            if (existing == *k) return Error(Errc::kMalformedCbor, "duplicate map key");
          }
          map.emplace_back(std::move(*k), std::move(*v));
        }
        return Value(std::move(map));
      }
      default:
        return Error(Errc::kMalformedCbor, "tags are not supported");
    }
  }

  size_t position() const { return pos_; }

 private:
  Result<uint64_t> argument(uint8_t info) {
    if (info < 24) return static_cast<uint64_t>(info);
    size_t width;
    switch (info) {
      case 24: width = 1; break;
      case 25: width = 2; break;
      case 26: width = 4; break;
      case 27: width = 8; break;
      default:
        return Error(Errc::kMalformedCbor, "indefinite or reserved length");
    }
    if (data_.size() - pos_ < width) return Error(Errc::kTruncated, "CBOR header truncated");
    uint64_t v = 0;
    for (size_t i = 0; i < width; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }

  ByteSpan data_;
  size_t pos_ = 0;
};

}  // namespace

const Value* Value::find(int64_t key) const {
  if (!is_map()) return nullptr;
  for (const auto& [k, v] : as_map()) {
    if (k.is_int() && k.as_int() == key) return &v;
  }
  return nullptr;
}

const Value* Value::find(std::string_view key) const {
  if (!is_map()) return nullptr;
  for (const auto& [k, v] : as_map()) {
    if (k.is_text() && k.as_text() == key) return &v;
  }
  return nullptr;
}

Bytes encode(const Value& value) {
  Bytes out;
  encode_into(out, value);
  return out;
}

Result<Value> decode_prefix(ByteSpan data, size_t* consumed) {
  Decoder d(data);
  auto v = d.item(0);
  if (v && consumed != nullptr) *consumed = d.position();
  return v;
}

Result<Value> decode(ByteSpan data) {
  size_t consumed = 0;
  auto v = decode_prefix(data, &consumed);
  if (!v) return v;
  if (consumed != data.size()) {
    return Error(Errc::kTrailingGarbage, "bytes after CBOR item");
  }
  return v;
}

}  // namespace fido2cap::cbor
