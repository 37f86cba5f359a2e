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

#ifndef FIDO2CAP_WEBAUTHN_CREDENTIAL_REPOSITORY_H_
#define FIDO2CAP_WEBAUTHN_CREDENTIAL_REPOSITORY_H_

#include <optional>
#include <string_view>
#include <vector>

#include "fido2cap/webauthn/types.h"

namespace fido2cap::webauthn {

// Read side of the user database plus the one write the ceremony engine
// performs (sign counter persistence).
class CredentialRepository {
 public:
  virtual ~CredentialRepository() = default;

  virtual std::optional<UserEntity> find_user_by_name(
      std::string_view username) const = 0;
  virtual std::optional<UserEntity> find_user_by_id(ByteSpan user_id) const = 0;
  virtual std::vector<CredentialRecord> credentials_for(
      ByteSpan user_id) const = 0;
  virtual bool credential_exists(ByteSpan credential_id) const = 0;

  // Compare-and-set; false when the stored counter is no longer `expected`.
  virtual bool update_sign_count(ByteSpan credential_id, uint32_t expected,
                                 uint32_t next) = 0;
};

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_CREDENTIAL_REPOSITORY_H_
