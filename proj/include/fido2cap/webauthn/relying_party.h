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

#ifndef FIDO2CAP_WEBAUTHN_RELYING_PARTY_H_
#define FIDO2CAP_WEBAUTHN_RELYING_PARTY_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fido2cap/common/random.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/challenge_store.h"
#include "fido2cap/webauthn/credential_repository.h"
#include "fido2cap/webauthn/types.h"
#include "fido2cap/webauthn/wire.h"

namespace fido2cap::webauthn {

// WebAuthn ceremony engine. Independent of transport and of how users and
// credentials are stored.
//
// Sign-counter policy: a stored counter of zero accepts any reported value
// (many platform authenticators never count); a non-zero stored counter
// requires a strictly larger reported value.
class RelyingParty {
 public:
  // `decoy_key` keys the synthetic allow-lists served for unknown usernames.
  RelyingParty(RelyingPartyConfig config, ChallengeStore& challenges,
               CredentialRepository& repository, const Clock& clock,
               Bytes decoy_key);

  const RelyingPartyConfig& config() const { return config_; }

  CreationOptions generate_registration_options(
      const UserEntity& user, const std::vector<CredentialRecord>& existing,
      ChallengeBinding binding = {},
      ResidentKeyRequirement resident_key = ResidentKeyRequirement::kPreferred);

  Result<VerifiedRegistration> verify_registration_response(
      const AttestationResponse& response);

  // With a username, allowCredentials lists that user's credentials; without
  // one it is empty (discoverable flow). Unknown usernames get a decoy list
  // whose shape does not reveal that the account is missing; `decoy_out`
  // reports that case to the caller.
  RequestOptions generate_authentication_options(
      std::optional<std::string_view> username, ChallengeBinding binding = {},
      bool* decoy_out = nullptr);

  Result<VerifiedAuthentication> verify_authentication_response(
      const AssertionResponse& response);

  std::vector<Bytes> decoy_credentials(std::string_view username) const;

 private:
  UserVerificationRequirement uv_requirement() const;
  Status check_common(const CollectedClientData& client_data,
                      std::string_view expected_type,
                      const AuthenticatorData& auth_data) const;

  RelyingPartyConfig config_;
  ChallengeStore& challenges_;
  CredentialRepository& repository_;
  const Clock& clock_;
  Bytes decoy_key_;
  std::array<uint8_t, 32> rp_id_hash_;
};

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_RELYING_PARTY_H_
