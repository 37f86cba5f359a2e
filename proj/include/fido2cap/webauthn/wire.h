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

#ifndef FIDO2CAP_WEBAUTHN_WIRE_H_
#define FIDO2CAP_WEBAUTHN_WIRE_H_

#include <string>

#include <nlohmann/json.hpp>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/types.h"

// JSON transport encodings of WebAuthn structures. Byte fields travel as
// unpadded base64url; clientDataJSON is carried verbatim as UTF-8 bytes.
namespace fido2cap::webauthn {

inline constexpr std::string_view kTypeCreate = "webauthn.create";
inline constexpr std::string_view kTypeGet = "webauthn.get";

struct CollectedClientData {
  std::string type;
  Bytes challenge;
  std::string origin;
  bool cross_origin = false;
};

Result<CollectedClientData> parse_client_data(ByteSpan client_data_json);
Bytes build_client_data_json(std::string_view type, ByteSpan challenge,
                             std::string_view origin);

nlohmann::json to_json(const CreationOptions& options);
Result<CreationOptions> creation_options_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RequestOptions& options);
Result<RequestOptions> request_options_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttestationResponse& response);
Result<AttestationResponse> attestation_response_from_json(
    const nlohmann::json& j);

nlohmann::json to_json(const AssertionResponse& response);
Result<AssertionResponse> assertion_response_from_json(const nlohmann::json& j);

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_WIRE_H_
