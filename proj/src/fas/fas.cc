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

#include "fido2cap/fas/fas.h"

#include <set>

#include "fido2cap/crypto/crypto.h"

namespace fido2cap::fas {
namespace {

constexpr std::string_view kSeparator = ", ";
constexpr std::string_view kIntegrityField = ", integrity=";
constexpr std::string_view kIntegrityLabel = "fido2cap-fas-integrity";

Error malformed(std::string detail) {
  return Error(Errc::kMalformedKeyValueText, std::move(detail));
}

crypto::Sha256Digest integrity_tag(ByteSpan fas_key, std::string_view text) {
  auto subkey = crypto::hmac_sha256(fas_key, to_bytes(kIntegrityLabel));
  return crypto::hmac_sha256(subkey, to_bytes(text));
}

}  // namespace

Status FasSharedConfig::validate() const {
  if (fas_key.size() != kFasKeySize) {
    return Error(Errc::kConfigError,
                 "fas_key must be 32 bytes, got " +
                     std::to_string(fas_key.size()));
  }
  if (fas_fqdn.empty()) return Error(Errc::kConfigError, "fas_fqdn is empty");
  if (fas_port <= 0 || fas_port > 65535) {
    return Error(Errc::kConfigError, "fas_port out of range");
  }
  if (session_timeout_seconds <= 0) {
    return Error(Errc::kConfigError, "session timeout must be positive");
  }
  return {};
}

bool is_valid_hid(std::string_view hid) { return is_hex(hid, kHidHexLength); }

std::string serialize_params(const FasParams& p) {
  std::string out;
  auto add = [&](std::string_view key, std::string_view value) {
    if (!out.empty()) out += kSeparator;
    out += percent_encode(key);
    out += '=';
    out += percent_encode(value);
  };
  add("hid", p.hid);
  add("clientip", p.client_ip);
  add("clientmac", p.client_mac);
  add("gatewayname", p.gateway_name);
  add("originurl", p.original_url);
  for (const auto& [k, v] : p.extras) add(k, v);
  return out;
}

Result<FasParams> parse_params(std::string_view text) {
  if (text.empty()) return malformed("empty parameter text");
  FasParams p;
  bool have_hid = false;
  std::set<std::string> seen;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(kSeparator, start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      return malformed("item without key=value form");
    }
    auto key = percent_decode(item.substr(0, eq));
    auto value = percent_decode(item.substr(eq + 1));
    if (!key || !value || !is_valid_utf8(*key) || !is_valid_utf8(*value)) {
      return malformed("bad escape or non UTF-8 text");
    }
    if (!seen.insert(*key).second) return malformed("duplicate key " + *key);

    if (*key == "hid") {
      p.hid = std::move(*value);
      have_hid = true;
    } else if (*key == "clientip") {
      p.client_ip = std::move(*value);
    } else if (*key == "clientmac") {
      p.client_mac = std::move(*value);
    } else if (*key == "gatewayname") {
      p.gateway_name = std::move(*value);
    } else if (*key == "originurl") {
      p.original_url = std::move(*value);
    } else {
      p.extras.emplace_back(std::move(*key), std::move(*value));
    }
    start = end + kSeparator.size();
  }
  if (!have_hid || p.hid.empty()) return Error(Errc::kMissingHid, "no hid");
  if (!is_valid_hid(p.hid)) {
    return Error(Errc::kMalformedHid, "hid is not 64 hex characters");
  }
  return p;
}

std::string encrypt_fas_blob(const FasParams& params,
                             const FasSharedConfig& config,
                             RandomSource& random, BlobProfile profile) {
  std::string text = serialize_params(params);
  if (profile == BlobProfile::kAuthenticated) {
    text += kIntegrityField;
    text += hex_encode(integrity_tag(config.fas_key, text.substr(
        0, text.size() - kIntegrityField.size())));
  }
  Bytes iv = random.bytes(crypto::kAesBlockSize);
  auto ct = crypto::aes256_cbc_encrypt(config.fas_key, iv, to_bytes(text));
  return base64_encode(concat(iv, *ct));
}

Result<FasParams> decrypt_fas_blob(std::string_view blob,
                                   const FasSharedConfig& config,
                                   BlobProfile profile) {
  auto raw = base64_decode(blob);
  if (!raw) return Error(Errc::kBase64Error, "blob is not base64");
  if (raw->size() < 2 * crypto::kAesBlockSize ||
      raw->size() % crypto::kAesBlockSize != 0) {
    return Error(Errc::kCipherError, "blob length " +
                                         std::to_string(raw->size()) +
                                         " is not IV plus whole blocks");
  }
  ByteSpan all(*raw);
  auto plain = crypto::aes256_cbc_decrypt(
      config.fas_key, all.first(crypto::kAesBlockSize),
      all.subspan(crypto::kAesBlockSize));
  if (!plain) return plain.error();
  std::string text = to_string(*plain);
  if (!is_valid_utf8(text)) return malformed("plaintext is not UTF-8");

  if (profile == BlobProfile::kAuthenticated) {
    size_t at = text.rfind(kIntegrityField);
    if (at == std::string::npos) {
      return Error(Errc::kCipherError, "integrity field missing");
    }
    auto tag = hex_decode(std::string_view(text).substr(
        at + kIntegrityField.size()));
    auto expected = integrity_tag(config.fas_key, std::string_view(text).substr(0, at));
    if (!tag || !crypto::constant_time_equal(*tag, expected)) {
      return Error(Errc::kCipherError, "integrity check failed");
    }
    text.resize(at);
  }
  return parse_params(text);
}

Result<std::string> compute_rhid(std::string_view hid, ByteSpan fas_key) {
  if (!is_valid_hid(hid)) {
    return Error(Errc::kMalformedHid, "hid is not 64 hex characters");
  }
  if (fas_key.size() != kFasKeySize) {
    return Error(Errc::kInvalidArgument, "fas key must be 32 bytes");
  }
  return hex_encode(crypto::sha256(concat(to_bytes(hid), fas_key)));
}

}  // namespace fido2cap::fas
