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

#ifndef FIDO2CAP_WEBAUTHN_TYPES_H_
#define FIDO2CAP_WEBAUTHN_TYPES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/clock.h"
#include "fido2cap/common/result.h"

namespace fido2cap::webauthn {

inline constexpr int64_t kAlgEs256 = -7;
inline constexpr int64_t kAlgRs256 = -257;

inline constexpr size_t kChallengeSize = 32;
inline constexpr size_t kUserIdSize = 16;
inline constexpr size_t kMaxCredentialIdSize = 1023;

struct RelyingPartyConfig {
  std::string rp_id;
  std::string rp_name = "fido2cap";
  std::string expected_origin;
  Duration challenge_ttl = std::chrono::seconds(120);
  bool require_user_verification = false;

  // rp_id must be a registrable suffix of the origin host; ttl positive.
  Status validate() const;
};

// Host part of "scheme://host[:port]"; empty on malformed origins.
std::string origin_host(std::string_view origin);
bool is_registrable_suffix(std::string_view rp_id, std::string_view host);

enum class Ceremony { kRegistration, kAuthentication };

// Context a challenge is issued under and replayed back to the caller on
// verification.
struct ChallengeBinding {
  std::optional<Bytes> user_id;
  std::optional<std::string> username;
  std::optional<std::string> hid;
  std::optional<std::string> gateway_name;
};

struct Challenge {
  Bytes value;
  Ceremony ceremony = Ceremony::kAuthentication;
  Timestamp issued_at;
  Timestamp expires_at;
  ChallengeBinding binding;
  bool consumed = false;
  bool decoy = false;
};

struct Ec2Params {
  int64_t crv = 1;  // P-256
  Bytes x;
  Bytes y;
  bool operator==(const Ec2Params&) const = default;
};

struct RsaParams {
  Bytes n;
  Bytes e;
  bool operator==(const RsaParams&) const = default;
};

struct CoseKey {
  int64_t kty = 2;
  int64_t alg = kAlgEs256;
  std::variant<Ec2Params, RsaParams> params;
  bool operator==(const CoseKey&) const = default;
};

namespace flags {
inline constexpr uint8_t kUserPresent = 0x01;
inline constexpr uint8_t kUserVerified = 0x04;
inline constexpr uint8_t kBackupEligible = 0x08;
inline constexpr uint8_t kBackedUp = 0x10;
inline constexpr uint8_t kAttestedCredential = 0x40;
inline constexpr uint8_t kExtensionData = 0x80;
}  // namespace flags

struct AttestedCredential {
  std::array<uint8_t, 16> aaguid{};
  Bytes credential_id;
  CoseKey public_key;
  bool operator==(const AttestedCredential&) const = default;
};

struct AuthenticatorData {
  std::array<uint8_t, 32> rp_id_hash{};
  uint8_t flags = 0;
  uint32_t sign_count = 0;
  std::optional<AttestedCredential> attested_credential;
  // Raw CBOR extension map when the ED flag is set. Parsed and ignored.
  Bytes extensions;

  bool user_present() const { return flags & flags::kUserPresent; }
  bool user_verified() const { return flags & flags::kUserVerified; }
  bool operator==(const AuthenticatorData&) const = default;
};

struct CredentialRecord {
  Bytes credential_id;
  CoseKey public_key;
  uint32_t sign_count = 0;
  bool discoverable = false;
  Bytes user_id;
  Timestamp created_at;
  std::string label;
};

struct UserEntity {
  Bytes id;
  std::string name;
  std::string display_name;
};

enum class ResidentKeyRequirement { kDiscouraged, kPreferred, kRequired };
enum class UserVerificationRequirement { kDiscouraged, kPreferred, kRequired };

std::string_view to_string(ResidentKeyRequirement r);
std::string_view to_string(UserVerificationRequirement r);
Result<ResidentKeyRequirement> parse_resident_key(std::string_view s);
Result<UserVerificationRequirement> parse_user_verification(std::string_view s);

struct CreationOptions {
  Bytes challenge;
  std::string rp_id;
  std::string rp_name;
  UserEntity user;
  std::vector<int64_t> algorithms;
  Duration timeout{};
  std::vector<Bytes> exclude_credentials;
  ResidentKeyRequirement resident_key = ResidentKeyRequirement::kPreferred;
  UserVerificationRequirement user_verification =
      UserVerificationRequirement::kPreferred;
  std::string attestation = "none";
};

struct RequestOptions {
  Bytes challenge;
  std::string rp_id;
  Duration timeout{};
  std::vector<Bytes> allow_credentials;
  UserVerificationRequirement user_verification =
      UserVerificationRequirement::kPreferred;
};

// PublicKeyCredential with an AuthenticatorAttestationResponse.
struct AttestationResponse {
  Bytes raw_id;
  Bytes client_data_json;
  Bytes attestation_object;
  // credProps.rk client extension output, when reported.
  std::optional<bool> resident_key;
};

// PublicKeyCredential with an AuthenticatorAssertionResponse.
struct AssertionResponse {
  Bytes raw_id;
  Bytes client_data_json;
  Bytes authenticator_data;
  Bytes signature;
  std::optional<Bytes> user_handle;
};

struct VerifiedRegistration {
  CredentialRecord credential;
  Challenge challenge;
};

struct VerifiedAuthentication {
  Bytes user_id;
  Bytes credential_id;
  uint32_t new_sign_count = 0;
  Challenge challenge;
};

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_TYPES_H_
