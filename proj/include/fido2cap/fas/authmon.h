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

#ifndef FIDO2CAP_FAS_AUTHMON_H_
#define FIDO2CAP_FAS_AUTHMON_H_

#include <optional>
#include <string>
#include <vector>

#include "fido2cap/common/result.h"

// Wire format of the gateway's polling channel to the FAS server. Requests are
// form-encoded POST bodies selected by auth_get; responses are plain text.
namespace fido2cap::fas {

enum class AuthmonVerb { kClear, kList, kView };

std::string_view to_string(AuthmonVerb verb);

struct AuthmonMessage {
  AuthmonVerb verb = AuthmonVerb::kView;
  // For view: "*" or "* <rhid>". Empty for clear and list.
  std::string payload;
  // Optional gatewayname field scoping the request to one gateway.
  std::optional<std::string> gateway;

  // The rhid of a confirmation ("* <rhid>"), if this is one.
  std::optional<std::string> confirmed_rhid() const;
  bool operator==(const AuthmonMessage&) const = default;
};

inline constexpr std::string_view kAuthmonAck = "ack";
inline constexpr std::string_view kAuthmonNak = "nak";
inline constexpr std::string_view kEmptyAuthList = "*";

// Errors: kMalformedBody, kUnknownVerb.
Result<AuthmonMessage> parse_authmon_request(std::string_view body);
std::string serialize_authmon_request(const AuthmonMessage& message);

AuthmonMessage view_all(std::optional<std::string> gateway = std::nullopt);
AuthmonMessage confirm(std::string_view rhid,
                       std::optional<std::string> gateway = std::nullopt);
AuthmonMessage clear(std::optional<std::string> gateway = std::nullopt);
AuthmonMessage list(std::optional<std::string> gateway = std::nullopt);

// One "* <rhid>" line per entry; kEmptyAuthList when empty.
std::string render_auth_list(const std::vector<std::string>& rhids);
// Inverse of render_auth_list. Errors: kMalformedBody.
Result<std::vector<std::string>> parse_auth_list(std::string_view text);

// application/x-www-form-urlencoded helpers.
std::string form_encode(std::string_view text);
Result<std::vector<std::pair<std::string, std::string>>> parse_form(
    std::string_view body);

}  // namespace fido2cap::fas

#endif  // FIDO2CAP_FAS_AUTHMON_H_
