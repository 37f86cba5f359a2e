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

#include "fido2cap/wawa/store.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include "fido2cap/cbor/cbor.h"
#include "fido2cap/webauthn/authenticator_data.h"

namespace fido2cap::wawa {

using nlohmann::json;

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::kAuthenticated: return "authenticated";
    case SessionState::kAuthorized: return "authorized";
    case SessionState::kExpired: return "expired";
    case SessionState::kRevoked: return "revoked";
  }
  return "revoked";
}

bool is_live(SessionState state) {
  return state == SessionState::kAuthenticated ||
         state == SessionState::kAuthorized;
}

std::string fold_username(std::string_view username) {
  std::string out(username);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

UserAccount* StoreData::user_by_id(ByteSpan id) {
  for (auto& [_, u] : users) {
    if (std::ranges::equal(u.user_id, id)) return &u;
  }
  return nullptr;
}

const UserAccount* StoreData::user_by_id(ByteSpan id) const {
  return const_cast<StoreData*>(this)->user_by_id(id);
}

SessionRecord* StoreData::session(std::string_view session_id) {
  for (auto& s : sessions) {
    if (s.session_id == session_id) return &s;
  }
  return nullptr;
}

size_t StoreData::admin_count() const {
  return std::ranges::count_if(users,
                               [](const auto& kv) { return kv.second.is_admin; });
}

// Serialization.

namespace {

int64_t ms(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_ms(int64_t v) { return Timestamp(Duration(v)); }

json opt_ms(const std::optional<Timestamp>& t) {
  return t ? json(ms(*t)) : json(nullptr);
}

std::optional<Timestamp> read_opt_ms(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return from_ms(j[key].get<int64_t>());
}

Bytes b64(const json& j) { return *base64url_decode(j.get<std::string>()); }

SessionState parse_state(const std::string& s) {
  if (s == "authenticated") return SessionState::kAuthenticated;
  if (s == "authorized") return SessionState::kAuthorized;
  if (s == "expired") return SessionState::kExpired;
  return SessionState::kRevoked;
}

}  // namespace

json to_json(const StoreData& data) {
  json users = json::array();
  for (const auto& [_, u] : data.users) {
    json creds = json::array();
    for (const auto& c : u.credentials) {
      creds.push_back({{"credential_id", base64url_encode(c.credential_id)},
                       {"public_key",
                        base64url_encode(webauthn::encode_cose_key(c.public_key))},
                       {"sign_count", c.sign_count},
                       {"discoverable", c.discoverable},
                       {"created_at", ms(c.created_at)},
                       {"label", c.label}});
    }
    users.push_back({{"user_id", base64url_encode(u.user_id)},
                     {"username", u.username},
                     {"display_name", u.display_name},
                     {"is_admin", u.is_admin},
                     {"created_at", ms(u.created_at)},
                     {"credentials", creds}});
  }
  json sessions = json::array();
  for (const auto& s : data.sessions) {
    sessions.push_back({{"session_id", s.session_id},
                        {"user_id", base64url_encode(s.user_id)},
                        {"hid", s.hid},
                        {"rhid", s.rhid},
                        {"state", to_string(s.state)},
                        {"created_at", ms(s.created_at)},
                        {"expires_at", ms(s.expires_at)},
                        {"gateway_name", s.gateway_name},
                        {"authorized_at", opt_ms(s.authorized_at)},
                        {"ended_at", opt_ms(s.ended_at)},
                        {"seq", s.seq}});
  }
  json tokens = json::array();
  for (const auto& [_, t] : data.tokens) {
    tokens.push_back(
        {{"token", t.token},
         {"issued_by",
          t.issued_by ? json(base64url_encode(*t.issued_by)) : json(nullptr)},
         {"expires_at", ms(t.expires_at)},
         {"max_uses", t.max_uses},
         {"uses", t.uses},
         {"qr_payload", t.qr_payload},
         {"grants_admin", t.grants_admin},
         {"bound_username",
          t.bound_username ? json(*t.bound_username) : json(nullptr)}});
  }
  return {{"users", users},
          {"sessions", sessions},
          {"tokens", tokens},
          {"next_session_seq", data.next_session_seq}};
}

Result<StoreData> store_data_from_json(const json& j) {
  try {
    StoreData data;
    for (const auto& ju : j.at("users")) {
      UserAccount u;
      u.user_id = b64(ju.at("user_id"));
      u.username = ju.at("username").get<std::string>();
      u.display_name = ju.at("display_name").get<std::string>();
      u.is_admin = ju.at("is_admin").get<bool>();
      u.created_at = from_ms(ju.at("created_at").get<int64_t>());
      for (const auto& jc : ju.at("credentials")) {
        webauthn::CredentialRecord c;
        c.credential_id = b64(jc.at("credential_id"));
        auto cose = cbor::decode(b64(jc.at("public_key")));
        if (!cose) return cose.error();
        auto key = webauthn::cose_key_from_cbor(*cose);
        if (!key) return key.error();
        c.public_key = std::move(*key);
        c.sign_count = jc.at("sign_count").get<uint32_t>();
        c.discoverable = jc.at("discoverable").get<bool>();
        c.created_at = from_ms(jc.at("created_at").get<int64_t>());
        c.label = jc.at("label").get<std::string>();
        c.user_id = u.user_id;
        u.credentials.push_back(std::move(c));
      }
      data.users[u.username] = std::move(u);
    }
    for (const auto& js : j.at("sessions")) {
      SessionRecord s;
      s.session_id = js.at("session_id").get<std::string>();
      s.user_id = b64(js.at("user_id"));
      s.hid = js.at("hid").get<std::string>();
      s.rhid = js.at("rhid").get<std::string>();
      s.state = parse_state(js.at("state").get<std::string>());
      s.created_at = from_ms(js.at("created_at").get<int64_t>());
      s.expires_at = from_ms(js.at("expires_at").get<int64_t>());
      s.gateway_name = js.at("gateway_name").get<std::string>();
      s.authorized_at = read_opt_ms(js, "authorized_at");
      s.ended_at = read_opt_ms(js, "ended_at");
      s.seq = js.at("seq").get<uint64_t>();
      data.sessions.push_back(std::move(s));
    }
    for (const auto& jt : j.at("tokens")) {
      RegistrationToken t;
      t.token = jt.at("token").get<std::string>();
      if (!jt.at("issued_by").is_null()) t.issued_by = b64(jt.at("issued_by"));
      t.expires_at = from_ms(jt.at("expires_at").get<int64_t>());
      t.max_uses = jt.at("max_uses").get<int>();
      t.uses = jt.at("uses").get<int>();
      t.qr_payload = jt.at("qr_payload").get<std::string>();
      t.grants_admin = jt.at("grants_admin").get<bool>();
      if (!jt.at("bound_username").is_null()) {
        t.bound_username = jt.at("bound_username").get<std::string>();
      }
      data.tokens[t.token] = std::move(t);
    }
    data.next_session_seq = j.at("next_session_seq").get<uint64_t>();
    return data;
  } catch (const std::exception& e) {
    return Error(Errc::kStorage, std::string("corrupt store: ") + e.what());
  }
}

// Repository view.

std::optional<webauthn::UserEntity> Store::find_user_by_name(
    std::string_view username) const {
  std::optional<webauthn::UserEntity> out;
  read([&](const StoreData& d) {
    auto it = d.users.find(fold_username(username));
    if (it != d.users.end()) {
      out = webauthn::UserEntity{it->second.user_id, it->second.username,
                                 it->second.display_name};
    }
  });
  return out;
}

std::optional<webauthn::UserEntity> Store::find_user_by_id(
    ByteSpan user_id) const {
  std::optional<webauthn::UserEntity> out;
  read([&](const StoreData& d) {
    if (const auto* u = d.user_by_id(user_id)) {
      out = webauthn::UserEntity{u->user_id, u->username, u->display_name};
    }
  });
  return out;
}

std::vector<webauthn::CredentialRecord> Store::credentials_for(
    ByteSpan user_id) const {
  std::vector<webauthn::CredentialRecord> out;
  read([&](const StoreData& d) {
    if (const auto* u = d.user_by_id(user_id)) out = u->credentials;
  });
  return out;
}

bool Store::credential_exists(ByteSpan credential_id) const {
  bool found = false;
  read([&](const StoreData& d) {
    for (const auto& [_, u] : d.users) {
      for (const auto& c : u.credentials) {
        if (std::ranges::equal(c.credential_id, credential_id)) found = true;
      }
    }
  });
  return found;
}

bool Store::update_sign_count(ByteSpan credential_id, uint32_t expected,
                              uint32_t next) {
  Status s = transact([&](StoreData& d) -> Status {
    for (auto& [_, u] : d.users) {
      for (auto& c : u.credentials) {
        if (std::ranges::equal(c.credential_id, credential_id)) {
          if (c.sign_count != expected) {
            return Error(Errc::kCounterRegression, "counter moved");
          }
          c.sign_count = next;
          return {};
        }
      }
    }
    return Error(Errc::kUnknownCredential, "no such credential");
  });
  return s.ok();
}

StoreData Store::snapshot() const {
  StoreData out;
  read([&](const StoreData& d) { out = d; });
  return out;
}

// MemoryStore.

Result<std::unique_ptr<MemoryStore>> MemoryStore::open(std::string path) {
  auto store = std::make_unique<MemoryStore>();
  store->path_ = std::move(path);
  std::error_code ec;
  if (std::filesystem::exists(store->path_, ec)) {
    std::ifstream in(store->path_);
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      return Error(Errc::kStorage, "store file is not JSON: " + store->path_);
    }
    auto data = store_data_from_json(j);
    if (!data) return data.error();
    store->data_ = std::move(*data);
  }
  return store;
}

Status MemoryStore::transact(const std::function<Status(StoreData&)>& fn) {
  std::lock_guard lock(mu_);
  Status s = fn(data_);
  if (!s) return s;
  return persist_locked();
}

void MemoryStore::read(const std::function<void(const StoreData&)>& fn) const {
  std::lock_guard lock(mu_);
  fn(data_);
}

Status MemoryStore::persist_locked() const {
  if (path_.empty()) return {};
  std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return Error(Errc::kStorage, "cannot write " + tmp);
    out << to_json(data_).dump();
    if (!out) return Error(Errc::kStorage, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) return Error(Errc::kStorage, "rename failed: " + ec.message());
  return {};
}

}  // namespace fido2cap::wawa
