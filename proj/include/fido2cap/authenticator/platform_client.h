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

#ifndef FIDO2CAP_AUTHENTICATOR_PLATFORM_CLIENT_H_
#define FIDO2CAP_AUTHENTICATOR_PLATFORM_CLIENT_H_

#include <string>

#include "fido2cap/authenticator/soft_authenticator.h"
#include "fido2cap/webauthn/types.h"

namespace fido2cap::authenticator {

// The browser half of a ceremony: builds clientDataJSON for `origin`, drives
// the authenticator and packages the result as the RP expects it.
class PlatformClient {
 public:
  PlatformClient(SoftAuthenticator& authenticator, std::string origin)
      : authenticator_(authenticator), origin_(std::move(origin)) {}

  const std::string& origin() const { return origin_; }
  void set_origin(std::string origin) { origin_ = std::move(origin); }

  Result<webauthn::AttestationResponse> create(
      const webauthn::CreationOptions& options);
  Result<webauthn::AssertionResponse> get(
      const webauthn::RequestOptions& options);

 private:
  bool want_uv(webauthn::UserVerificationRequirement r) const;

  SoftAuthenticator& authenticator_;
  std::string origin_;
};

}  // namespace fido2cap::authenticator

#endif  // FIDO2CAP_AUTHENTICATOR_PLATFORM_CLIENT_H_
