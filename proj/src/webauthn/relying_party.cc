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

#include "fido2cap/webauthn/relying_party.h"

#include <algorithm>
#include <cctype>

#include "fido2cap/cbor/cbor.h"
#include "fido2cap/crypto/crypto.h"
#include "fido2cap/webauthn/authenticator_data.h"
#include "fido2cap/webauthn/wire.h"

namespace fido2cap::webauthn {
namespace {

// Length of a wrapped (non-resident) credential id from our own soft
// authenticator; decoys mimic the two id sizes real accounts carry.
constexpr size_t kDecoyLongIdSize = 92;
constexpr size_t kDecoyShortIdSize = 16;

std::string fold(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

Bytes expand(ByteSpan key, std::string_view label, size_t length) {
  Bytes out;
  uint8_t counter = 0;
  while (out.size() < length) {
    Bytes input = to_bytes(label);
    input.push_back(counter++);
    auto block = crypto::hmac_sha256(key, input);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(length);
  return out;
}

Status verify_attestation_statement(std::string_view fmt,
                                    const cbor::Value& att_stmt,
                                    const CoseKey& credential_key,
                                    ByteSpan auth_data_raw,
                                    ByteSpan client_data_hash) {
  if (!att_stmt.is_map()) {
    return Error(Errc::kMalformedAttestation, "attStmt is not a map");
  }
  if (fmt == "none") {
    if (!att_stmt.as_map().empty()) {
      return Error(Errc::kMalformedAttestation, "'none' attStmt must be empty");
    }
    return {};
  }
  if (fmt == "packed") {
    if (att_stmt.find("x5c") != nullptr) {
      return Error(Errc::kUnsupportedAttestationFormat,
                   "packed attestation with a certificate chain");
    }
    const auto* alg = att_stmt.find("alg");
    const auto* sig = att_stmt.find("sig");
    if (alg == nullptr || !alg->is_int() || sig == nullptr || !sig->is_bytes()) {
      return Error(Errc::kMalformedAttestation, "packed attStmt lacks alg or sig");
    }
    if (alg->as_int() != credential_key.alg) {
      return Error(Errc::kMalformedAttestation,
                   "self attestation alg differs from credential alg");
    }
    Bytes signed_data = concat(auth_data_raw, client_data_hash);
    if (!verify_signature(credential_key, signed_data, sig->as_bytes())) {
      return Error(Errc::kBadSignature, "self attestation signature invalid");
    }
    return {};
  }
  return Error(Errc::kUnsupportedAttestationFormat,
               "attestation format '" + std::string(fmt) + "'");
}

}  // namespace

RelyingParty::RelyingParty(RelyingPartyConfig config,
                           ChallengeStore& challenges,
                           CredentialRepository& repository,
                           const Clock& clock, Bytes decoy_key)
    : config_(std::move(config)),
      challenges_(challenges),
      repository_(repository),
      clock_(clock),
      decoy_key_(std::move(decoy_key)),
      rp_id_hash_(crypto::sha256(to_bytes(config_.rp_id))) {}

UserVerificationRequirement RelyingParty::uv_requirement() const {
  return config_.require_user_verification
             ? UserVerificationRequirement::kRequired
             : UserVerificationRequirement::kPreferred;
}

CreationOptions RelyingParty::generate_registration_options(
    const UserEntity& user, const std::vector<CredentialRecord>& existing,
    ChallengeBinding binding, ResidentKeyRequirement resident_key) {
  binding.user_id = user.id;
  binding.username = user.name;
  Challenge c = challenges_.issue(Ceremony::kRegistration,
                                  config_.challenge_ttl, std::move(binding));
  CreationOptions o;
  o.challenge = c.value;
  o.rp_id = config_.rp_id;
  o.rp_name = config_.rp_name;
  o.user = user;
  o.algorithms = {kAlgEs256, kAlgRs256};
  o.timeout = config_.challenge_ttl;
  for (const auto& cred : existing) {
    o.exclude_credentials.push_back(cred.credential_id);
  }
  o.resident_key = resident_key;
  o.user_verification = uv_requirement();
  return o;
}

Status RelyingParty::check_common(const CollectedClientData& client_data,
                                  std::string_view expected_type,
                                  const AuthenticatorData& auth_data) const {
  if (client_data.type != expected_type) {
    return Error(Errc::kMalformedClientData,
                 "clientData.type is '" + client_data.type + "'");
  }
  if (client_data.origin != config_.expected_origin) {
    return Error(Errc::kOriginMismatch,
                 "origin '" + client_data.origin + "' is not expected");
  }
  if (!crypto::constant_time_equal(auth_data.rp_id_hash, rp_id_hash_)) {
    return Error(Errc::kRpIdMismatch, "rpIdHash does not match");
  }
  if (!auth_data.user_present()) {
    return Error(Errc::kUserPresenceMissing, "UP flag not set");
  }
  if (config_.require_user_verification && !auth_data.user_verified()) {
    return Error(Errc::kUserVerificationMissing, "UV flag not set");
  }
  return {};
}

Result<VerifiedRegistration> RelyingParty::verify_registration_response(
    const AttestationResponse& response) {
  auto client_data = parse_client_data(response.client_data_json);
  if (!client_data) return client_data.error();
  auto challenge = challenges_.take(client_data->challenge,
                                    Ceremony::kRegistration);
  if (!challenge) return challenge.error();

  auto att_obj = cbor::decode(response.attestation_object);
  if (!att_obj || !att_obj->is_map()) {
    return Error(Errc::kMalformedAttestation, "attestationObject is not a CBOR map");
  }
  const auto* fmt = att_obj->find("fmt");
  const auto* att_stmt = att_obj->find("attStmt");
  const auto* auth_data_raw = att_obj->find("authData");
  if (fmt == nullptr || !fmt->is_text() || att_stmt == nullptr ||
      auth_data_raw == nullptr || !auth_data_raw->is_bytes()) {
    return Error(Errc::kMalformedAttestation,
                 "attestationObject lacks fmt, attStmt or authData");
  }
  auto auth_data = parse_authenticator_data(auth_data_raw->as_bytes());
  if (!auth_data) return auth_data.error();
  if (auto s = check_common(*client_data, kTypeCreate, *auth_data); !s) {
    return s.error();
  }
  if (!auth_data->attested_credential) {
    return Error(Errc::kMalformedAttestation, "no attested credential data");
  }
  const auto& attested = *auth_data->attested_credential;
  if (attested.credential_id != response.raw_id) {
    return Error(Errc::kMalformedAttestation, "rawId differs from attested id");
  }

  auto client_data_hash = crypto::sha256(response.client_data_json);
  if (auto s = verify_attestation_statement(fmt->as_text(), *att_stmt,
                                            attested.public_key,
                                            auth_data_raw->as_bytes(),
                                            client_data_hash);
      !s) {
    return s.error();
  }
  if (repository_.credential_exists(attested.credential_id)) {
    return Error(Errc::kDuplicateCredentialId, "credential already registered");
  }

  VerifiedRegistration out;
  out.credential.credential_id = attested.credential_id;
  out.credential.public_key = attested.public_key;
  out.credential.sign_count = auth_data->sign_count;
  out.credential.discoverable = response.resident_key.value_or(false);
  out.credential.user_id = challenge->binding.user_id.value_or(Bytes{});
  out.credential.created_at = clock_.now();
  out.challenge = std::move(*challenge);
  return out;
}

std::vector<Bytes> RelyingParty::decoy_credentials(
    std::string_view username) const {
  std::string name = fold(username);
  auto seed = crypto::hmac_sha256(decoy_key_, to_bytes("decoy:" + name));
  size_t count = 1 + (seed[0] & 1);
  std::vector<Bytes> out;
  for (size_t i = 0; i < count; ++i) {
    size_t len = (seed[1 + i] & 1) ? kDecoyLongIdSize : kDecoyShortIdSize;
    out.push_back(expand(decoy_key_,
                         "decoy-id:" + std::to_string(i) + ":" + name, len));
  }
  return out;
}

RequestOptions RelyingParty::generate_authentication_options(
    std::optional<std::string_view> username, ChallengeBinding binding,
    bool* decoy_out) {
  RequestOptions o;
  o.rp_id = config_.rp_id;
  o.timeout = config_.challenge_ttl;
  o.user_verification = uv_requirement();
  bool decoy = false;

  if (username) {
    // Computed for every named request so both branches do the same work.
    std::vector<Bytes> decoys = decoy_credentials(*username);
    auto user = repository_.find_user_by_name(*username);
    if (user) {
      binding.user_id = user->id;
      binding.username = user->name;
      for (const auto& cred : repository_.credentials_for(user->id)) {
        o.allow_credentials.push_back(cred.credential_id);
      }
    } else {
      decoy = true;
      o.allow_credentials = std::move(decoys);
    }
  }
  Challenge c = challenges_.issue(Ceremony::kAuthentication,
                                  config_.challenge_ttl, std::move(binding),
                                  decoy);
  o.challenge = c.value;
  if (decoy_out != nullptr) *decoy_out = decoy;
  return o;
}

Result<VerifiedAuthentication> RelyingParty::verify_authentication_response(
    const AssertionResponse& response) {
  auto client_data = parse_client_data(response.client_data_json);
  if (!client_data) return client_data.error();
  auto challenge = challenges_.take(client_data->challenge,
                                    Ceremony::kAuthentication);
  if (!challenge) return challenge.error();

  auto auth_data = parse_authenticator_data(response.authenticator_data);
  if (!auth_data) return auth_data.error();
  if (auto s = check_common(*client_data, kTypeGet, *auth_data); !s) {
    return s.error();
  }
  if (challenge->decoy) {
    return Error(Errc::kUnknownCredential, "credential not registered");
  }

  // Discoverable flow identifies the user from the userHandle; otherwise the
  // user was named when the challenge was issued.
  Bytes user_id;
  if (response.user_handle) {
    if (challenge->binding.user_id &&
        *challenge->binding.user_id != *response.user_handle) {
      return Error(Errc::kUnknownCredential, "userHandle names another user");
    }
    user_id = *response.user_handle;
  } else if (challenge->binding.user_id) {
    user_id = *challenge->binding.user_id;
  } else {
    return Error(Errc::kUnknownCredential,
                 "no userHandle and no user bound to the challenge");
  }
  if (!repository_.find_user_by_id(user_id)) {
    return Error(Errc::kUnknownCredential, "userHandle does not name a user");
  }
  std::optional<CredentialRecord> credential;
  for (auto& cred : repository_.credentials_for(user_id)) {
    if (cred.credential_id == response.raw_id) {
      credential = std::move(cred);
      break;
    }
  }
  if (!credential) {
    return Error(Errc::kUnknownCredential, "credential not registered for user");
  }

  auto client_data_hash = crypto::sha256(response.client_data_json);
  Bytes signed_data = concat(response.authenticator_data, client_data_hash);
  if (!verify_signature(credential->public_key, signed_data,
                        response.signature)) {
    return Error(Errc::kBadSignature, "assertion signature invalid");
  }

  uint32_t stored = credential->sign_count;
  uint32_t reported = auth_data->sign_count;
  if (stored != 0 && reported <= stored) {
    return Error(Errc::kCounterRegression,
                 "sign count " + std::to_string(reported) +
                     " not above stored " + std::to_string(stored));
  }
  if (reported != stored &&
      !repository_.update_sign_count(credential->credential_id, stored,
                                     reported)) {
    return Error(Errc::kCounterRegression, "concurrent counter update");
  }

  VerifiedAuthentication out;
  out.user_id = std::move(user_id);
  out.credential_id = credential->credential_id;
  out.new_sign_count = reported;
  out.challenge = std::move(*challenge);
  return out;
}

}  // namespace fido2cap::webauthn
