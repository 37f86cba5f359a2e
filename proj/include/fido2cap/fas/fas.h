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

#ifndef FIDO2CAP_FAS_FAS_H_
#define FIDO2CAP_FAS_FAS_H_

#include <string>
#include <utility>
#include <vector>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/random.h"
#include "fido2cap/common/result.h"

namespace fido2cap::fas {

inline constexpr size_t kFasKeySize = 32;
inline constexpr size_t kHidHexLength = 64;

// Settings the gateway and the FAS server must agree on.
struct FasSharedConfig {
  Bytes fas_key;
  std::string fas_fqdn;
  int fas_port = 443;
  int64_t session_timeout_seconds = 3600;

  Status validate() const;
};

struct FasParams {
  std::string hid;
  std::string client_ip;
  std::string client_mac;
  std::string gateway_name;
  std::string original_url;
  // Fields this codec does not interpret, kept in arrival order.
  std::vector<std::pair<std::string, std::string>> extras;

  bool operator==(const FasParams&) const = default;
};

enum class BlobProfile {
  // Plaintext carries a trailing HMAC-SHA256 field keyed from fas_key, so any
  // modification of the blob is detected.
  kAuthenticated,
  // Bare key/value text, as emitted by a stock gateway.
  kPlain,
};

// base64(IV || AES-256-CBC(text)) where text is "hid=..., clientip=..., ...".
std::string encrypt_fas_blob(const FasParams& params,
                             const FasSharedConfig& config,
                             RandomSource& random,
                             BlobProfile profile = BlobProfile::kAuthenticated);

// Errors: kBase64Error, kCipherError (short, misaligned, bad padding, wrong
// key, failed integrity), kMalformedKeyValueText, kMissingHid, kMalformedHid.
Result<FasParams> decrypt_fas_blob(std::string_view blob,
                                   const FasSharedConfig& config,
                                   BlobProfile profile = BlobProfile::kAuthenticated);

// Key/value text layer, exposed for tests.
std::string serialize_params(const FasParams& params);
Result<FasParams> parse_params(std::string_view text);

// Lowercase hex SHA-256 over the hid text followed by the raw key bytes.
Result<std::string> compute_rhid(std::string_view hid, ByteSpan fas_key);

bool is_valid_hid(std::string_view hid);

}  // namespace fido2cap::fas

#endif  // FIDO2CAP_FAS_FAS_H_
