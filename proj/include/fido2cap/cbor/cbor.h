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

#ifndef FIDO2CAP_CBOR_CBOR_H_
#define FIDO2CAP_CBOR_CBOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/result.h"

// Minimal CBOR (RFC 8949) covering what WebAuthn needs: integers, byte and
// text strings, arrays, maps, booleans and null. Definite lengths only; tags
// and floats are rejected.
namespace fido2cap::cbor {

class Value;
using Array = std::vector<Value>;
// Insertion ordered; encoders are responsible for canonical key order.
using Map = std::vector<std::pair<Value, Value>>;

struct Null {
  bool operator==(const Null&) const = default;
};

class Value {
 public:
  Value() : v_(Null{}) {}
  Value(int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<int64_t>(i)) {}
  Value(Bytes b) : v_(std::move(b)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(Array a) : v_(std::move(a)) {}
  Value(Map m) : v_(std::move(m)) {}
  Value(bool b) : v_(b) {}
  Value(Null n) : v_(n) {}

  bool is_int() const { return std::holds_alternative<int64_t>(v_); }
  bool is_bytes() const { return std::holds_alternative<Bytes>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_map() const { return std::holds_alternative<Map>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_null() const { return std::holds_alternative<Null>(v_); }

  int64_t as_int() const { return std::get<int64_t>(v_); }
  const Bytes& as_bytes() const { return std::get<Bytes>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }
  const Map& as_map() const { return std::get<Map>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }

  // Map lookups; nullptr when absent or when this is not a map.
  const Value* find(int64_t key) const;
  const Value* find(std::string_view key) const;

  bool operator==(const Value& other) const { return v_ == other.v_; }

 private:
  std::variant<int64_t, Bytes, std::string, Array, Map, bool, Null> v_;
};

Bytes encode(const Value& value);

// Decodes one item from the front of `data`; `consumed` receives its length.
Result<Value> decode_prefix(ByteSpan data, size_t* consumed);
// Decodes exactly one item spanning all of `data`.
Result<Value> decode(ByteSpan data);

}  // namespace fido2cap::cbor

#endif  // FIDO2CAP_CBOR_CBOR_H_
