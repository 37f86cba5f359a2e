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

#include "fido2cap/webauthn/types.h"

namespace fido2cap::webauthn {

std::string origin_host(std::string_view origin) {
  auto scheme_end = origin.find("://");
  if (scheme_end == std::string_view::npos) return {};
  std::string_view rest = origin.substr(scheme_end + 3);
  if (rest.empty() || rest.find('/') != std::string_view::npos) return {};
  auto colon = rest.rfind(':');
  if (colon != std::string_view::npos) rest = rest.substr(0, colon);
  return std::string(rest);
}

bool is_registrable_suffix(std::string_view rp_id, std::string_view host) {
  if (rp_id.empty() || host.empty()) return false;
  if (host == rp_id) return true;
  return host.size() > rp_id.size() + 1 && host.ends_with(rp_id) &&
         host[host.size() - rp_id.size() - 1] == '.';
}

Status RelyingPartyConfig::validate() const {
  if (challenge_ttl <= Duration::zero()) {
    return Error(Errc::kConfigError, "challenge_ttl must be positive");
  }
  if (!expected_origin.starts_with("https://") &&
      !expected_origin.starts_with("http://")) {
    return Error(Errc::kConfigError, "expected_origin must be an http(s) origin");
  }
  std::string host = origin_host(expected_origin);
  if (host.empty()) {
    return Error(Errc::kConfigError, "expected_origin is malformed");
  }
  if (!is_registrable_suffix(rp_id, host)) {
    return Error(Errc::kConfigError,
                 "rp_id '" + rp_id + "' is not a suffix of origin host '" + host + "'");
  }
  return {};
}

std::string_view to_string(ResidentKeyRequirement r) {
  switch (r) {
    case ResidentKeyRequirement::kDiscouraged: return "discouraged";
    case ResidentKeyRequirement::kPreferred: return "preferred";
    case ResidentKeyRequirement::kRequired: return "required";
  }
  return "preferred";
}

std::string_view to_string(UserVerificationRequirement r) {
  switch (r) {
    case UserVerificationRequirement::kDiscouraged: return "discouraged";
    case UserVerificationRequirement::kPreferred: return "preferred";
    case UserVerificationRequirement::kRequired: return "required";
  }
  return "preferred";
}

Result<ResidentKeyRequirement> parse_resident_key(std::string_view s) {
  if (s == "discouraged") return ResidentKeyRequirement::kDiscouraged;
  if (s == "preferred") return ResidentKeyRequirement::kPreferred;
  if (s == "required") return ResidentKeyRequirement::kRequired;
  return Error(Errc::kInvalidArgument, "unknown residentKey value");
}

Result<UserVerificationRequirement> parse_user_verification(std::string_view s) {
  if (s == "discouraged") return UserVerificationRequirement::kDiscouraged;
  if (s == "preferred") return UserVerificationRequirement::kPreferred;
  if (s == "required") return UserVerificationRequirement::kRequired;
  return Error(Errc::kInvalidArgument, "unknown userVerification value");
}

}  // namespace fido2cap::webauthn
