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

#ifndef FIDO2CAP_COMMON_RESULT_H_
#define FIDO2CAP_COMMON_RESULT_H_

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace fido2cap {

// Stable, machine-readable error codes. The names returned by errc_name() are
// part of the HTTP API and must not change.
enum class Errc {
  kOk,
  kInvalidArgument,
  kStorage,
  kConfigError,

  // WebAuthn relying party.
  kChallengeUnknownOrExpired,
  kOriginMismatch,
  kRpIdMismatch,
  kUserPresenceMissing,
  kUserVerificationMissing,
  kUnsupportedAttestationFormat,
  kUnsupportedAlgorithm,
  kBadSignature,
  kDuplicateCredentialId,
  kUnknownUsername,
  kUnknownCredential,
  kCounterRegression,
  kTruncated,
  kMalformedCoseKey,
  kTrailingGarbage,
  kMalformedCbor,
  kMalformedClientData,
  kMalformedAttestation,

  // Software authenticator.
  kExcludedCredentialExists,
  kUserPresenceDenied,
  kUserVerificationUnavailable,
  kNoMatchingCredential,
  kBusy,

  // FAS codec and Authmon grammar.
  kBase64Error,
  kCipherError,
  kMissingHid,
  kMalformedHid,
  kMalformedKeyValueText,
  kUnknownVerb,
  kMalformedBody,

  // WAWA service.
  kMissingFasContext,
  kForbidden,
  kTokenExpiredOrExhausted,
  kLastAdminProtection,
  kUnknownUser,
  kUsernameTaken,
  kNoSession,
  kAdminAlreadyExists,
  kRateLimited,
  kNotFound,

  // Gateway simulator.
  kUnknownClient,
  kExpectationFailed,
  kTimeout,
  kTransportError,
};

std::string_view errc_name(Errc code);
// Inverse of errc_name().
std::optional<Errc> errc_from_name(std::string_view name);

struct Error {
  Errc code;
  std::string detail;

  Error(Errc c, std::string d = {}) : code(c), detail(std::move(d)) {}

  std::string to_string() const;
};

// Value-or-error. Mirrors the subset of std::expected we need.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Error error) : state_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  T& value() & {
    assert(ok());
    return std::get<T>(state_);
  }
  const T& value() const& {
    assert(ok());
    return std::get<T>(state_);
  }
  T&& value() && {
    assert(ok());
    return std::get<T>(std::move(state_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(state_);
  }
  // kOk on success.
  Errc code() const { return ok() ? Errc::kOk : error().code; }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)), ok_(false) {}

  bool ok() const { return ok_; }
  explicit operator bool() const { return ok_; }
  const Error& error() const {
    assert(!ok_);
    return error_;
  }
  Errc code() const { return ok_ ? Errc::kOk : error_.code; }

 private:
  Error error_{Errc::kInvalidArgument};
  bool ok_ = true;
};

using Status = Result<void>;

}  // namespace fido2cap

#endif  // FIDO2CAP_COMMON_RESULT_H_
