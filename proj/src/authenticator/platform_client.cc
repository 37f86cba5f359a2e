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

#include "fido2cap/authenticator/platform_client.h"

#include "fido2cap/crypto/crypto.h"
#include "fido2cap/webauthn/wire.h"

namespace fido2cap::authenticator {

using webauthn::ResidentKeyRequirement;
using webauthn::UserVerificationRequirement;

bool PlatformClient::want_uv(UserVerificationRequirement r) const {
  switch (r) {
    case UserVerificationRequirement::kRequired:
      return true;
    case UserVerificationRequirement::kPreferred:
      return authenticator_.options().user_verification_supported;
    case UserVerificationRequirement::kDiscouraged:
      return false;
  }
  return false;
}

Result<webauthn::AttestationResponse> PlatformClient::create(
    const webauthn::CreationOptions& options) {
  Bytes client_data = webauthn::build_client_data_json(
      webauthn::kTypeCreate, options.challenge, origin_);
  auto hash = crypto::sha256(client_data);
  bool resident = options.resident_key != ResidentKeyRequirement::kDiscouraged;
  UserInfo user{options.user.id, options.user.name, options.user.display_name};
  auto made = authenticator_.make_credential(
      options.rp_id, user, options.exclude_credentials, resident,
      want_uv(options.user_verification), hash);
  if (!made) return made.error();
  webauthn::AttestationResponse out;
  out.raw_id = made->credential_id;
  out.client_data_json = std::move(client_data);
  out.attestation_object = std::move(made->attestation_object);
  out.resident_key = resident;
  return out;
}

Result<webauthn::AssertionResponse> PlatformClient::get(
    const webauthn::RequestOptions& options) {
  Bytes client_data = webauthn::build_client_data_json(
      webauthn::kTypeGet, options.challenge, origin_);
  auto hash = crypto::sha256(client_data);
  auto got = authenticator_.get_assertion(options.rp_id,
                                          options.allow_credentials, hash,
                                          want_uv(options.user_verification));
  if (!got) return got.error();
  webauthn::AssertionResponse out;
  out.raw_id = got->credential_id;
  out.client_data_json = std::move(client_data);
  out.authenticator_data = std::move(got->authenticator_data);
  out.signature = std::move(got->signature);
  out.user_handle = std::move(got->user_handle);
  return out;
}

}  // namespace fido2cap::authenticator
