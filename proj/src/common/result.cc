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

#include "fido2cap/common/result.h"

namespace fido2cap {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kOk: return "Ok";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kStorage: return "StorageError";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kChallengeUnknownOrExpired: return "ChallengeUnknownOrExpired";
    case Errc::kOriginMismatch: return "OriginMismatch";
    case Errc::kRpIdMismatch: return "RpIdMismatch";
    case Errc::kUserPresenceMissing: return "UserPresenceMissing";
    case Errc::kUserVerificationMissing: return "UserVerificationMissing";
    case Errc::kUnsupportedAttestationFormat:
      return "UnsupportedAttestationFormat";
    case Errc::kUnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case Errc::kBadSignature: return "BadSignature";
    case Errc::kDuplicateCredentialId: return "DuplicateCredentialId";
    case Errc::kUnknownUsername: return "UnknownUsername";
    case Errc::kUnknownCredential: return "UnknownCredential";
    case Errc::kCounterRegression: return "CounterRegression";
    case Errc::kTruncated: return "Truncated";
    case Errc::kMalformedCoseKey: return "MalformedCoseKey";
    case Errc::kTrailingGarbage: return "TrailingGarbage";
    case Errc::kMalformedCbor: return "MalformedCbor";
    case Errc::kMalformedClientData: return "MalformedClientData";
    case Errc::kMalformedAttestation: return "MalformedAttestation";
    case Errc::kExcludedCredentialExists: return "ExcludedCredentialExists";
    case Errc::kUserPresenceDenied: return "UserPresenceDenied";
    case Errc::kUserVerificationUnavailable:
      return "UserVerificationUnavailable";
    case Errc::kNoMatchingCredential: return "NoMatchingCredential";
    case Errc::kBusy: return "Busy";
    case Errc::kBase64Error: return "Base64Error";
    case Errc::kCipherError: return "CipherError";
    case Errc::kMissingHid: return "MissingHid";
    case Errc::kMalformedHid: return "MalformedHid";
    case Errc::kMalformedKeyValueText: return "MalformedKeyValueText";
    case Errc::kUnknownVerb: return "UnknownVerb";
    case Errc::kMalformedBody: return "MalformedBody";
    case Errc::kMissingFasContext: return "MissingFasContext";
    case Errc::kForbidden: return "Forbidden";
    case Errc::kTokenExpiredOrExhausted: return "TokenExpiredOrExhausted";
    case Errc::kLastAdminProtection: return "LastAdminProtection";
    case Errc::kUnknownUser: return "UnknownUser";
    case Errc::kUsernameTaken: return "UsernameTaken";
    case Errc::kNoSession: return "NoSession";
    case Errc::kAdminAlreadyExists: return "AdminAlreadyExists";
    case Errc::kRateLimited: return "RateLimited";
    case Errc::kNotFound: return "NotFound";
    case Errc::kUnknownClient: return "UnknownClient";
    case Errc::kExpectationFailed: return "ExpectationFailed";
    case Errc::kTimeout: return "Timeout";
    case Errc::kTransportError: return "TransportError";
  }
  return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(Errc::kTransportError); ++i) {
    auto code = static_cast<Errc>(i);
    if (errc_name(code) == name) return code;
  }
  return std::nullopt;
}

std::string Error::to_string() const {
  std::string out(errc_name(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace fido2cap
