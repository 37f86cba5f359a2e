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

#ifndef FIDO2CAP_COMMON_BYTES_H_
#define FIDO2CAP_COMMON_BYTES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fido2cap/common/result.h"

namespace fido2cap {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteSpan b) {
  return std::string(b.begin(), b.end());
}

Bytes concat(ByteSpan a, ByteSpan b);

// Lowercase hex.
std::string hex_encode(ByteSpan data);
// Accepts either case; fails on odd length or non-hex characters.
Result<Bytes> hex_decode(std::string_view hex);
bool is_hex(std::string_view s, size_t expected_length);

// Standard alphabet with '=' padding. Decoding is strict: the input must be
// the canonical encoding of its bytes.
std::string base64_encode(ByteSpan data);
Result<Bytes> base64_decode(std::string_view text);

// URL-safe alphabet without padding, as used on the WebAuthn wire.
std::string base64url_encode(ByteSpan data);
Result<Bytes> base64url_decode(std::string_view text);

// RFC 3986 percent-encoding of everything outside the unreserved set.
std::string percent_encode(std::string_view text);
// Decodes %XX escapes; when plus_as_space is set, '+' decodes to ' '
// (application/x-www-form-urlencoded).
Result<std::string> percent_decode(std::string_view text,
                                   bool plus_as_space = false);

bool is_valid_utf8(std::string_view text);

}  // namespace fido2cap

#endif  // FIDO2CAP_COMMON_BYTES_H_
