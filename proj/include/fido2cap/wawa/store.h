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

#ifndef FIDO2CAP_WAWA_STORE_H_
#define FIDO2CAP_WAWA_STORE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fido2cap/common/clock.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/credential_repository.h"
#include "fido2cap/webauthn/types.h"

namespace fido2cap::wawa {

struct UserAccount {
  Bytes user_id;
  std::string username;  // case-folded
  std::string display_name;
  bool is_admin = false;
  std::vector<webauthn::CredentialRecord> credentials;
  Timestamp created_at;
};

enum class SessionState { kAuthenticated, kAuthorized, kExpired, kRevoked };

std::string_view to_string(SessionState state);
bool is_live(SessionState state);

struct SessionRecord {
  std::string session_id;  // 32 hex chars
  Bytes user_id;
  // Empty for web-only sessions that did not come through a gateway.
  std::string hid;
  std::string rhid;
  SessionState state = SessionState::kAuthenticated;
  Timestamp created_at;
  Timestamp expires_at;
  std::string gateway_name;
  std::optional<Timestamp> authorized_at;
  std::optional<Timestamp> ended_at;
  uint64_t seq = 0;
};

struct RegistrationToken {
  std::string token;
  std::optional<Bytes> issued_by;  // absent for the bootstrap token
  Timestamp expires_at;
  int max_uses = 1;
  int uses = 0;
  std::string qr_payload;
  bool grants_admin = false;
  std::optional<std::string> bound_username;

  bool usable_at(Timestamp now) const {
    return now < expires_at && uses < max_uses;
  }
};

// Everything the service persists. Users are keyed by case-folded username;
// sessions are kept in creation order.
struct StoreData {
  std::map<std::string, UserAccount> users;
  std::vector<SessionRecord> sessions;
  std::map<std::string, RegistrationToken> tokens;
  uint64_t next_session_seq = 1;

  UserAccount* user_by_id(ByteSpan id);
  const UserAccount* user_by_id(ByteSpan id) const;
  SessionRecord* session(std::string_view session_id);
  size_t admin_count() const;
};

std::string fold_username(std::string_view username);

nlohmann::json to_json(const StoreData& data);
Result<StoreData> store_data_from_json(const nlohmann::json& j);

// Document store with atomic multi-collection updates. Also serves as the
// credential repository of the ceremony engine.
class Store : public webauthn::CredentialRepository {
 public:
  // Runs `fn` with exclusive access. `fn` must validate before it mutates:
  // when it returns an error nothing may have been changed.
  virtual Status transact(const std::function<Status(StoreData&)>& fn) = 0;
  virtual void read(const std::function<void(const StoreData&)>& fn) const = 0;

  std::optional<webauthn::UserEntity> find_user_by_name(
      std::string_view username) const override;
  std::optional<webauthn::UserEntity> find_user_by_id(
      ByteSpan user_id) const override;
  std::vector<webauthn::CredentialRecord> credentials_for(
      ByteSpan user_id) const override;
  bool credential_exists(ByteSpan credential_id) const override;
  bool update_sign_count(ByteSpan credential_id, uint32_t expected,
                         uint32_t next) override;

  StoreData snapshot() const;
};

// In-memory store, optionally mirrored to a JSON file after every commit.
class MemoryStore final : public Store {
 public:
  MemoryStore() = default;
  // Loads `path` if it exists. Errors: kStorage.
  static Result<std::unique_ptr<MemoryStore>> open(std::string path);

  Status transact(const std::function<Status(StoreData&)>& fn) override;
  void read(const std::function<void(const StoreData&)>& fn) const override;

 private:
  Status persist_locked() const;

  mutable std::mutex mu_;
  StoreData data_;
  std::string path_;
};

}  // namespace fido2cap::wawa

#endif  // FIDO2CAP_WAWA_STORE_H_
