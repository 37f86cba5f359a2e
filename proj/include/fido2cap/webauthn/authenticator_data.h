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

#ifndef FIDO2CAP_WEBAUTHN_AUTHENTICATOR_DATA_H_
#define FIDO2CAP_WEBAUTHN_AUTHENTICATOR_DATA_H_

#include "fido2cap/cbor/cbor.h"
#include "fido2cap/common/bytes.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/types.h"

namespace fido2cap::webauthn {

inline constexpr size_t kMinAuthenticatorDataSize = 37;

// COSE_Key <-> CoseKey. Only EC2/P-256/ES256 and RSA/RS256 are accepted.
cbor::Value cose_key_to_cbor(const CoseKey& key);
Result<CoseKey> cose_key_from_cbor(const cbor::Value& value);
Bytes encode_cose_key(const CoseKey& key);

// Verifies `signature` over `message` with the algorithm the key names.
bool verify_signature(const CoseKey& key, ByteSpan message, ByteSpan signature);

// Layout: rpIdHash(32) | flags(1) | signCount(4, big endian)
//         [ aaguid(16) | credIdLen(2) | credId | COSE_Key ]   if AT
//         [ extensions CBOR map ]                             if ED
Result<AuthenticatorData> parse_authenticator_data(ByteSpan raw);
Bytes serialize_authenticator_data(const AuthenticatorData& data);

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_AUTHENTICATOR_DATA_H_
