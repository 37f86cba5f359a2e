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

#include "fido2cap/webauthn/authenticator_data.h"

#include <algorithm>

#include "fido2cap/crypto/crypto.h"

namespace fido2cap::webauthn {
namespace {

// COSE key labels (RFC 9052/9053).
constexpr int64_t kKty = 1;
constexpr int64_t kAlg = 3;
constexpr int64_t kEc2Crv = -1;
constexpr int64_t kEc2X = -2;
constexpr int64_t kEc2Y = -3;
constexpr int64_t kRsaN = -1;
constexpr int64_t kRsaE = -2;

constexpr int64_t kKtyEc2 = 2;
constexpr int64_t kKtyRsa = 3;
constexpr int64_t kCrvP256 = 1;

Error malformed(std::string detail) {
  return Error(Errc::kMalformedCoseKey, std::move(detail));
}

}  // namespace

cbor::Value cose_key_to_cbor(const CoseKey& key) {
  // CTAP2 canonical order: 1, 3, -1, -2, -3.
  cbor::Map map;
  map.emplace_back(kKty, key.kty);
  map.emplace_back(kAlg, key.alg);
  if (const auto* ec = std::get_if<Ec2Params>(&key.params)) {
    map.emplace_back(kEc2Crv, ec->crv);
    map.emplace_back(kEc2X, ec->x);
    map.emplace_back(kEc2Y, ec->y);
  } else {
    const auto& rsa = std::get<RsaParams>(key.params);
    map.emplace_back(kRsaN, rsa.n);
    map.emplace_back(kRsaE, rsa.e);
  }
  return cbor::Value(std::move(map));
}

Bytes encode_cose_key(const CoseKey& key) {
  return cbor::encode(cose_key_to_cbor(key));
}

Result<CoseKey> cose_key_from_cbor(const cbor::Value& value) {
  if (!value.is_map()) return malformed("COSE key is not a map");
  const auto* kty = value.find(kKty);
  const auto* alg = value.find(kAlg);
  if (kty == nullptr || !kty->is_int() || alg == nullptr || !alg->is_int()) {
    return malformed("COSE key lacks kty or alg");
  }
  CoseKey key;
  key.kty = kty->as_int();
  key.alg = alg->as_int();
  if (key.kty == kKtyEc2) {
    if (key.alg != kAlgEs256) {
      return Error(Errc::kUnsupportedAlgorithm, "EC2 key must use ES256");
    }
    const auto* crv = value.find(kEc2Crv);
    const auto* x = value.find(kEc2X);
    const auto* y = value.find(kEc2Y);
    if (crv == nullptr || !crv->is_int() || crv->as_int() != kCrvP256) {
      return malformed("EC2 key is not on P-256");
    }
    if (x == nullptr || !x->is_bytes() || x->as_bytes().size() != 32 ||
        y == nullptr || !y->is_bytes() || y->as_bytes().size() != 32) {
      return malformed("P-256 coordinates must be 32 bytes each");
    }
    key.params = Ec2Params{kCrvP256, x->as_bytes(), y->as_bytes()};
    return key;
  }
  if (key.kty == kKtyRsa) {
    if (key.alg != kAlgRs256) {
      return Error(Errc::kUnsupportedAlgorithm, "RSA key must use RS256");
    }
    const auto* n = value.find(kRsaN);
    const auto* e = value.find(kRsaE);
    if (n == nullptr || !n->is_bytes() || n->as_bytes().size() < 256 ||
        e == nullptr || !e->is_bytes() || e->as_bytes().empty() ||
        e->as_bytes().size() > 8) {
      return malformed("RSA key needs a 2048+ bit modulus and an exponent");
    }
    key.params = RsaParams{n->as_bytes(), e->as_bytes()};
    return key;
  }
  return Error(Errc::kUnsupportedAlgorithm, "unsupported COSE key type");
}

bool verify_signature(const CoseKey& key, ByteSpan message,
                      ByteSpan signature) {
  if (key.alg == kAlgEs256) {
    const auto* ec = std::get_if<Ec2Params>(&key.params);
    return ec != nullptr &&
           crypto::verify_es256(ec->x, ec->y, message, signature);
  }
  if (key.alg == kAlgRs256) {
    const auto* rsa = std::get_if<RsaParams>(&key.params);
    return rsa != nullptr &&
           crypto::verify_rs256(rsa->n, rsa->e, message, signature);
  }
  return false;
}

Result<AuthenticatorData> parse_authenticator_data(ByteSpan raw) {
  if (raw.size() < kMinAuthenticatorDataSize) {
    return Error(Errc::kTruncated, "authenticator data shorter than 37 bytes");
  }
  AuthenticatorData out;
  std::copy_n(raw.begin(), 32, out.rp_id_hash.begin());
  out.flags = raw[32];
  out.sign_count = (uint32_t{raw[33]} << 24) | (uint32_t{raw[34]} << 16) |
                   (uint32_t{raw[35]} << 8) | uint32_t{raw[36]};
  size_t pos = kMinAuthenticatorDataSize;

  if (out.flags & flags::kAttestedCredential) {
    if (raw.size() - pos < 18) {
      return Error(Errc::kTruncated, "attested credential header truncated");
    }
    AttestedCredential cred;
    std::copy_n(raw.begin() + static_cast<ptrdiff_t>(pos), 16,
                cred.aaguid.begin());
    pos += 16;
    size_t id_len = (size_t{raw[pos]} << 8) | raw[pos + 1];
    pos += 2;
    if (id_len > kMaxCredentialIdSize) {
      return Error(Errc::kMalformedAttestation, "credential id longer than 1023 bytes");
    }
    if (raw.size() - pos < id_len) {
      return Error(Errc::kTruncated, "credential id truncated");
    }
    auto id_begin = raw.begin() + static_cast<ptrdiff_t>(pos);
    cred.credential_id.assign(id_begin, id_begin + static_cast<ptrdiff_t>(id_len));
    pos += id_len;

    size_t consumed = 0;
    auto key_cbor = cbor::decode_prefix(raw.subspan(pos), &consumed);
    if (!key_cbor) {
      if (key_cbor.code() == Errc::kTruncated && pos == raw.size()) {
        return Error(Errc::kTruncated, "credential public key missing");
      }
      return malformed("credential public key is not valid CBOR: " +
                       key_cbor.error().detail);
    }
    auto key = cose_key_from_cbor(*key_cbor);
    if (!key) return key.error();
    cred.public_key = std::move(*key);
    pos += consumed;
    out.attested_credential = std::move(cred);
  }

  if (out.flags & flags::kExtensionData) {
    size_t consumed = 0;
    auto ext = cbor::decode_prefix(raw.subspan(pos), &consumed);
    if (!ext) return Error(ext.code() == Errc::kTruncated ? Errc::kTruncated : Errc::kMalformedCbor,
                           "extension data: " + ext.error().detail);
    if (!ext->is_map()) {
      return Error(Errc::kMalformedCbor, "extension data is not a map");
    }
    auto begin = raw.begin() + static_cast<ptrdiff_t>(pos);
    out.extensions.assign(begin, begin + static_cast<ptrdiff_t>(consumed));
    pos += consumed;
  }

  if (pos != raw.size()) {
    return Error(Errc::kTrailingGarbage,
                 std::to_string(raw.size() - pos) + " unexpected trailing bytes");
  }
  return out;
}

Bytes serialize_authenticator_data(const AuthenticatorData& data) {
  Bytes out(data.rp_id_hash.begin(), data.rp_id_hash.end());
  out.push_back(data.flags);
  for (int s = 24; s >= 0; s -= 8) {
    out.push_back(static_cast<uint8_t>(data.sign_count >> s));
  }
  if (data.attested_credential) {
    const auto& cred = *data.attested_credential;
    out.insert(out.end(), cred.aaguid.begin(), cred.aaguid.end());
    out.push_back(static_cast<uint8_t>(cred.credential_id.size() >> 8));
    out.push_back(static_cast<uint8_t>(cred.credential_id.size()));
    out.insert(out.end(), cred.credential_id.begin(), cred.credential_id.end());
    Bytes key = encode_cose_key(cred.public_key);
    out.insert(out.end(), key.begin(), key.end());
  }
  out.insert(out.end(), data.extensions.begin(), data.extensions.end());
  return out;
}

}  // namespace fido2cap::webauthn
