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

#include "fido2cap/wawa/service.h"

#include <algorithm>

#include "fido2cap/crypto/crypto.h"
#include "fido2cap/fas/authmon.h"
#include "fido2cap/webauthn/wire.h"

namespace fido2cap::wawa {
namespace {

using Json = nlohmann::json;
using http::Request;
using http::Response;

constexpr std::string_view kDecoyLabel = "fido2cap-decoy";
constexpr size_t kMaxUsernameLength = 64;

Result<Json> parse_body(const Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Error(Errc::kMalformedBody, "body must be a JSON object");
  }
  return j;
}

std::optional<std::string> string_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  std::string v = j[key].get<std::string>();
  if (v.empty()) return std::nullopt;
  return v;
}

std::string iso(Timestamp t) { return format_iso8601(t); }

std::string mask_ip(std::string_view ip) {
  size_t dot = ip.rfind('.');
  if (dot != std::string_view::npos && ip.find(':') == std::string_view::npos) {
    return std::string(ip.substr(0, dot)) + ".*";
  }
  size_t colon = ip.find(':');
  if (colon != std::string_view::npos) {
    return std::string(ip.substr(0, colon)) + ":*";
  }
  return "*";
}

bool valid_username(std::string_view name) {
  if (name.empty() || name.size() > kMaxUsernameLength) return false;
  if (!is_valid_utf8(name)) return false;
  return std::ranges::none_of(name, [](unsigned char c) {
    return c < 0x20 || c == 0x7f;
  });
}

// JSON for a response credential: either nested under `key` or the body
// itself.
const Json& credential_json(const Json& body, const char* key) {
  if (body.contains(key) && body[key].is_object()) return body[key];
  return body;
}

Json session_json(const SessionRecord& s, Timestamp now) {
  SessionState state = s.state;
  if (is_live(state) && now >= s.expires_at) state = SessionState::kExpired;
  auto ref = crypto::sha256(to_bytes(s.session_id));
  Json j = {{"session_ref", hex_encode(ByteSpan(ref).first(8))},
            {"state", to_string(state)},
            {"created_at", iso(s.created_at)},
            {"expires_at", iso(s.expires_at)},
            {"gateway_name", s.gateway_name},
            {"rhid", s.rhid}};
  j["authorized_at"] = s.authorized_at ? Json(iso(*s.authorized_at)) : Json();
  return j;
}

}  // namespace

std::string WawaConfig::base_url() const {
  return "https://" + fas.fas_fqdn + ":" + std::to_string(fas.fas_port);
}

Status WawaConfig::validate() const {
  if (auto s = fas.validate(); !s) return s;
  if (auto s = rp.validate(); !s) {
    return Error(Errc::kConfigError, s.error().detail);
  }
  if (retention.count() < 0) {
    return Error(Errc::kConfigError, "retention must not be negative");
  }
  if (token_ttl.count() <= 0) {
    return Error(Errc::kConfigError, "token ttl must be positive");
  }
  return {};
}

int http_status_for(Errc code) {
  switch (code) {
    case Errc::kOk:
      return 200;
    case Errc::kInvalidArgument:
    case Errc::kMalformedBody:
    case Errc::kMalformedClientData:
    case Errc::kMalformedAttestation:
    case Errc::kMalformedCbor:
    case Errc::kMalformedCoseKey:
    case Errc::kTruncated:
    case Errc::kTrailingGarbage:
    case Errc::kUnknownVerb:
    case Errc::kMissingFasContext:
    case Errc::kBase64Error:
    case Errc::kCipherError:
    case Errc::kMalformedHid:
    case Errc::kMissingHid:
    case Errc::kMalformedKeyValueText:
    case Errc::kUnsupportedAttestationFormat:
    case Errc::kUnsupportedAlgorithm:
      return 400;
    case Errc::kChallengeUnknownOrExpired:
    case Errc::kOriginMismatch:
    case Errc::kRpIdMismatch:
    case Errc::kUserPresenceMissing:
    case Errc::kUserVerificationMissing:
    case Errc::kBadSignature:
    case Errc::kUnknownCredential:
    case Errc::kUnknownUsername:
    case Errc::kCounterRegression:
    case Errc::kNoSession:
      return 401;
    case Errc::kForbidden:
      return 403;
    case Errc::kNotFound:
    case Errc::kUnknownUser:
    case Errc::kUnknownClient:
      return 404;
    case Errc::kDuplicateCredentialId:
    case Errc::kUsernameTaken:
    case Errc::kLastAdminProtection:
    case Errc::kAdminAlreadyExists:
    case Errc::kExcludedCredentialExists:
      return 409;
    case Errc::kTokenExpiredOrExhausted:
      return 410;
    case Errc::kRateLimited:
      return 429;
    default:
      return 500;
  }
}

WawaService::WawaService(WawaConfig config, Store& store, const Clock& clock,
                         RandomSource& random, EventSink* events)
    : config_(std::move(config)),
      store_(store),
      clock_(clock),
      random_(random),
      emit_("wawa", clock, events),
      challenges_(clock, random),
      rp_(config_.rp, challenges_, store_, clock_, [&] {
        auto k = crypto::hmac_sha256(config_.fas.fas_key, to_bytes(kDecoyLabel));
        return Bytes(k.begin(), k.end());
      }()) {}

Response WawaService::json_response(int status, const Json& body) const {
  return http::text_response(status, body.dump(), "application/json");
}

Response WawaService::error_response(const Error& error) const {
  return json_response(http_status_for(error.code),
                       {{"error", errc_name(error.code)},
                        {"message", error.detail}});
}

std::string WawaService::new_session_id() {
  return hex_encode(random_.bytes(16));
}

std::string WawaService::session_cookie(const std::string& id,
                                        Duration max_age) const {
  std::string c = std::string(kSessionCookie) + "=" + id +
                  "; Path=/; HttpOnly; SameSite=Strict; Max-Age=" +
                  std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                                     max_age)
                                     .count());
  if (config_.secure_cookie) c += "; Secure";
  return c;
}

Response WawaService::handle(const Request& req) {
  try {
    const std::string& p = req.path;
    bool get = req.method == "GET";
    bool post = req.method == "POST";
    if (get && p == "/portal") return portal(req);
    if (get && p == "/admin") return admin_page(req);
    if (post && p == "/fas") return authmon(req);
    if (post && p == "/api/auth/options") return auth_options(req, true);
    if (post && p == "/api/auth/verify") return auth_verify(req, true);
    if (post && p == "/api/login/options") return auth_options(req, false);
    if (post && p == "/api/login/verify") return auth_verify(req, false);
    if (get && p == "/api/session") return current_session(req);
    if (post && p == "/api/logout") return logout(req);
    if (post && p == "/api/admin/register/options") return register_options(req);
    if (post && p == "/api/admin/register/verify") return register_verify(req);
    if (get && p == "/api/admin/users") return list_users(req);
    if (post && p == "/api/admin/regtoken") return issue_token(req);
    constexpr std::string_view kUsersPrefix = "/api/admin/users/";
    constexpr std::string_view kAdminSuffix = "/admin";
    if (post && p.starts_with(kUsersPrefix) && p.ends_with(kAdminSuffix) &&
        p.size() > kUsersPrefix.size() + kAdminSuffix.size()) {
      auto name = percent_decode(std::string_view(p).substr(
          kUsersPrefix.size(),
          p.size() - kUsersPrefix.size() - kAdminSuffix.size()));
      if (!name) return error_response(name.error());
      return set_admin(req, *name);
    }
    return error_response(Error(Errc::kNotFound, "no route for " + p));
  } catch (const std::exception&) {
    return error_response(Error(Errc::kMalformedBody, "request not understood"));
  }
}

// Pages.

std::string WawaService::render_page(const std::string& title,
                                     const Json& context) const {
  std::string data = context.dump();
  std::string safe;
  for (char c : data) {
    if (c == '<') {
      safe += "\\u003c";
    } else {
      safe += c;
    }
  }
  std::string message;
  if (context.value("mode", "") == "degraded") {
    message =
        "<p>We cannot identify your network session. Reconnect to the Wi-Fi "
        "network and open any web page to try again.</p>";
  }
  return "<!doctype html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
         "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n"
         "<title>" + title + "</title>\n</head>\n<body>\n<main id=\"app\">" +
         message +
         "</main>\n<script id=\"fido2cap-context\" type=\"application/json\">" +
         safe + "</script>\n<script src=\"/static/portal.js\"></script>\n"
         "</body>\n</html>\n";
}

Response WawaService::portal(const Request& req) {
  Json ctx;
  std::string title = "Wi-Fi access";
  if (auto token = req.query_param("token")) {
    bool valid = false;
    store_.read([&](const StoreData& d) {
      auto it = d.tokens.find(*token);
      valid = it != d.tokens.end() && it->second.usable_at(clock_.now());
    });
    ctx = {{"mode", "register"},
           {"registration_token", *token},
           {"token_valid", valid}};
    title = "Register a security key";
    emit_("portal_served", {{"mode", "register"}, {"token_valid", valid ? "true" : "false"}});
  } else if (auto blob = req.query_param("fas")) {
    auto params = fas::decrypt_fas_blob(*blob, config_.fas, config_.blob_profile);
    if (params) {
      ctx = {{"mode", "login"},
             {"fas_context", *blob},
             {"gateway_name", params->gateway_name},
             {"client_ip", mask_ip(params->client_ip)},
             {"original_url", params->original_url}};
      emit_("portal_served", {{"mode", "login"},
                              {"gateway", params->gateway_name},
                              {"hid", params->hid}});
    } else {
      ctx = {{"mode", "degraded"}, {"error", "InvalidFasContext"}};
      emit_("portal_degraded", {{"reason", std::string(errc_name(params.code()))}});
    }
  } else {
    ctx = {{"mode", "degraded"}, {"error", "MissingFasContext"}};
    emit_("portal_degraded", {{"reason", "MissingFasContext"}});
  }
  return http::text_response(200, render_page(title, ctx),
                             "text/html; charset=utf-8");
}

Response WawaService::admin_page(const Request&) {
  return http::text_response(200,
                             render_page("Registrar", {{"mode", "admin"}}),
                             "text/html; charset=utf-8");
}

// Sessions and cookies.

std::optional<SessionRecord> WawaService::session_of(const Request& req) {
  auto id = req.cookie(kSessionCookie);
  if (!id) return std::nullopt;
  std::optional<SessionRecord> out;
  Timestamp now = clock_.now();
  store_.read([&](const StoreData& d) {
    for (const auto& s : d.sessions) {
      if (s.session_id == *id && is_live(s.state) && now < s.expires_at) {
        out = s;
      }
    }
  });
  return out;
}

std::optional<UserAccount> WawaService::admin_of(const Request& req) {
  auto session = session_of(req);
  if (!session) return std::nullopt;
  std::optional<UserAccount> out;
  store_.read([&](const StoreData& d) {
    const auto* u = d.user_by_id(session->user_id);
    if (u != nullptr && u->is_admin) out = *u;
  });
  return out;
}

// Authentication.

Response WawaService::auth_options(const Request& req, bool with_fas) {
  auto body = parse_body(req);
  if (!body) return error_response(body.error());
  webauthn::ChallengeBinding binding;
  if (with_fas) {
    auto blob = string_field(*body, "fas_context");
    if (!blob) {
      return error_response(Error(Errc::kMissingFasContext, "no fas_context"));
    }
    auto params = fas::decrypt_fas_blob(*blob, config_.fas, config_.blob_profile);
    if (!params) {
      return error_response(
          Error(Errc::kMissingFasContext, "fas_context is not valid"));
    }
    binding.hid = params->hid;
    binding.gateway_name = params->gateway_name;
  }
  auto username = string_field(*body, "username");
  std::optional<std::string_view> name;
  if (username) name = *username;
  bool decoy = false;
  auto options = rp_.generate_authentication_options(name, binding, &decoy);
  emit_("challenge_issued",
        {{"ceremony", "authentication"},
         {"flow", username ? "username" : "discoverable"},
         {"allow", std::to_string(options.allow_credentials.size())}});
  return json_response(200, webauthn::to_json(options));
}

Response WawaService::auth_verify(const Request& req, bool with_fas) {
  auto body = parse_body(req);
  if (!body) return error_response(body.error());
  auto assertion =
      webauthn::assertion_response_from_json(credential_json(*body, "assertion"));
  if (!assertion) {
    return error_response(Error(Errc::kMalformedBody, assertion.error().detail));
  }
  auto verified = rp_.verify_authentication_response(*assertion);
  if (!verified) {
    emit_("auth_failed", {{"error", std::string(errc_name(verified.code()))}});
    return error_response(verified.error());
  }
  const auto& binding = verified->challenge.binding;
  if (with_fas && !binding.hid) {
    return error_response(
        Error(Errc::kMissingFasContext, "challenge carries no gateway context"));
  }

  Timestamp now = clock_.now();
  SessionRecord session;
  session.session_id = new_session_id();
  session.user_id = verified->user_id;
  if (binding.hid) {
    session.hid = *binding.hid;
    session.rhid = *fas::compute_rhid(*binding.hid, config_.fas.fas_key);
  }
  session.gateway_name = binding.gateway_name.value_or("");
  session.state = SessionState::kAuthenticated;
  session.created_at = now;
  session.expires_at = now + config_.session_timeout();

  std::string username;
  Status s = store_.transact([&](StoreData& d) -> Status {
    const auto* user = d.user_by_id(session.user_id);
    if (user == nullptr) {
      return Error(Errc::kUnknownCredential, "account no longer exists");
    }
    username = user->username;
    session.seq = d.next_session_seq++;
    d.sessions.push_back(session);
    return {};
  });
  if (!s) return error_response(s.error());
  emit_("session_created", {{"user", username},
                            {"gateway", session.gateway_name},
                            {"rhid", session.rhid},
                            {"counter", std::to_string(verified->new_sign_count)}});

  Response r = json_response(
      200, {{"session_id", session.session_id},
            {"username", username},
            {"state", to_string(session.state)},
            {"expires_at", iso(session.expires_at)},
            {"expires_in", config_.fas.session_timeout_seconds}});
  r.headers["Set-Cookie"] = session_cookie(session.session_id,
                                           config_.session_timeout());
  return r;
}

Response WawaService::current_session(const Request& req) {
  auto session = session_of(req);
  if (!session) return error_response(Error(Errc::kNoSession, "no live session"));
  Json j = session_json(*session, clock_.now());
  store_.read([&](const StoreData& d) {
    if (const auto* u = d.user_by_id(session->user_id)) {
      j["username"] = u->username;
      j["is_admin"] = u->is_admin;
    }
  });
  return json_response(200, j);
}

Response WawaService::logout(const Request& req) {
  auto session = session_of(req);
  if (!session) return error_response(Error(Errc::kNoSession, "no live session"));
  Timestamp now = clock_.now();
  Status s = store_.transact([&](StoreData& d) -> Status {
    auto* rec = d.session(session->session_id);
    if (rec == nullptr || !is_live(rec->state)) {
      return Error(Errc::kNoSession, "session already ended");
    }
    rec->state = SessionState::kRevoked;
    rec->ended_at = now;
    return {};
  });
  if (!s) return error_response(s.error());
  emit_("session_revoked", {{"rhid", session->rhid}, {"reason", "logout"}});
  Response r = json_response(200, {{"ok", true}});
  r.headers["Set-Cookie"] = session_cookie("", Duration(0));
  return r;
}

// Registration.

Response WawaService::register_options(const Request& req) {
  auto body = parse_body(req);
  auto admin = admin_of(req);
  if (!admin && (!body || !string_field(*body, "token"))) {
    return error_response(Error(Errc::kForbidden, "admin session or token required"));
  }
  if (!body) return error_response(body.error());
  auto token = string_field(*body, "token");
  Timestamp now = clock_.now();

  auto username_raw = string_field(*body, "username");
  if (!admin) {
    if (!token) {
      return error_response(Error(Errc::kForbidden, "admin session or token required"));
    }
    std::optional<RegistrationToken> t;
    store_.read([&](const StoreData& d) {
      auto it = d.tokens.find(*token);
      if (it != d.tokens.end()) t = it->second;
    });
    if (!t) return error_response(Error(Errc::kForbidden, "unknown token"));
    if (!t->usable_at(now)) {
      return error_response(
          Error(Errc::kTokenExpiredOrExhausted, "token expired or used up"));
    }
    if (t->bound_username && username_raw &&
        fold_username(*username_raw) != *t->bound_username) {
      return error_response(
          Error(Errc::kForbidden, "token is bound to another username"));
    }
    if (t->bound_username && !username_raw) username_raw = t->bound_username;
  }
  if (!username_raw || !valid_username(*username_raw)) {
    return error_response(Error(Errc::kMalformedBody, "username required"));
  }
  std::string username = fold_username(*username_raw);
  std::string display = string_field(*body, "display_name").value_or(*username_raw);
  if (!is_valid_utf8(display)) display = username;

  auto rk = webauthn::ResidentKeyRequirement::kPreferred;
  if (auto r = string_field(*body, "resident_key")) {
    auto parsed = webauthn::parse_resident_key(*r);
    if (!parsed) return error_response(Error(Errc::kMalformedBody, parsed.error().detail));
    rk = *parsed;
  }

  std::optional<UserAccount> existing;
  store_.read([&](const StoreData& d) {
    auto it = d.users.find(username);
    if (it != d.users.end()) existing = it->second;
  });
  if (existing && !admin) {
    return error_response(Error(Errc::kUsernameTaken,
                                "token registration needs a new username"));
  }

  PendingRegistration pending;
  pending.username = username;
  pending.new_user = !existing;
  pending.user_id = existing ? existing->user_id : random_.bytes(webauthn::kUserIdSize);
  pending.display_name = existing ? existing->display_name : display;
  size_t key_number = existing ? existing->credentials.size() + 1 : 1;
  pending.label = string_field(*body, "label").value_or("key " + std::to_string(key_number));
  pending.via_admin = admin.has_value();
  if (!admin) pending.token = token;

  webauthn::UserEntity entity{pending.user_id, pending.username, pending.display_name};
  auto options = rp_.generate_registration_options(
      entity, existing ? existing->credentials : std::vector<webauthn::CredentialRecord>{},
      {}, rk);
  pending.expires_at = now + config_.rp.challenge_ttl;
  {
    std::lock_guard lock(pending_mu_);
    pending_[options.challenge] = pending;
  }
  emit_("challenge_issued", {{"ceremony", "registration"},
                             {"user", username},
                             {"via", admin ? "admin" : "token"}});
  return json_response(200, webauthn::to_json(options));
}

Response WawaService::register_verify(const Request& req) {
  auto body = parse_body(req);
  bool caller_is_admin = admin_of(req).has_value();
  if (!caller_is_admin && (!body || !string_field(*body, "token"))) {
    return error_response(Error(Errc::kForbidden, "admin session or token required"));
  }
  if (!body) return error_response(body.error());
  auto attestation = webauthn::attestation_response_from_json(
      credential_json(*body, "attestation"));
  if (!attestation) {
    return error_response(Error(Errc::kMalformedBody, attestation.error().detail));
  }
  auto client_data = webauthn::parse_client_data(attestation->client_data_json);
  if (!client_data) return error_response(client_data.error());

  std::optional<PendingRegistration> pending;
  {
    std::lock_guard lock(pending_mu_);
    auto it = pending_.find(client_data->challenge);
    if (it != pending_.end()) pending = it->second;
  }
  if (!pending) {
    return error_response(Error(Errc::kChallengeUnknownOrExpired,
                                "no registration in progress for this challenge"));
  }
  if (pending->via_admin) {
    if (!caller_is_admin) {
      return error_response(Error(Errc::kForbidden, "admin session required"));
    }
  } else {
    auto token = string_field(*body, "token");
    if (!token || *token != *pending->token) {
      return error_response(Error(Errc::kForbidden, "registration token required"));
    }
  }

  auto verified = rp_.verify_registration_response(*attestation);
  {
    std::lock_guard lock(pending_mu_);
    pending_.erase(client_data->challenge);
  }
  if (!verified) {
    emit_("registration_failed", {{"user", pending->username},
                                  {"error", std::string(errc_name(verified.code()))}});
    return error_response(verified.error());
  }

  Timestamp now = clock_.now();
  webauthn::CredentialRecord cred = verified->credential;
  cred.user_id = pending->user_id;
  cred.label = pending->label;
  bool is_admin = false;
  size_t count = 0;
  Status s = store_.transact([&](StoreData& d) -> Status {
    RegistrationToken* token = nullptr;
    if (pending->token) {
      auto it = d.tokens.find(*pending->token);
      if (it == d.tokens.end() || !it->second.usable_at(now)) {
        return Error(Errc::kTokenExpiredOrExhausted, "token expired or used up");
      }
      token = &it->second;
    }
    for (const auto& [_, u] : d.users) {
      for (const auto& c : u.credentials) {
        if (c.credential_id == cred.credential_id) {
          return Error(Errc::kDuplicateCredentialId, "credential already registered");
        }
      }
    }
    UserAccount* user = nullptr;
    if (pending->new_user) {
      if (d.users.contains(pending->username)) {
        return Error(Errc::kUsernameTaken, "username registered meanwhile");
      }
      UserAccount account;
      account.user_id = pending->user_id;
      account.username = pending->username;
      account.display_name = pending->display_name;
      account.is_admin = token != nullptr && token->grants_admin;
      account.created_at = now;
      user = &(d.users[pending->username] = std::move(account));
    } else {
      user = d.user_by_id(pending->user_id);
      if (user == nullptr) return Error(Errc::kUnknownUser, "account removed");
    }
    user->credentials.push_back(cred);
    if (token != nullptr) ++token->uses;
    is_admin = user->is_admin;
    count = user->credentials.size();
    return {};
  });
  if (!s) return error_response(s.error());
  emit_("registration_completed",
        {{"user", pending->username},
         {"credential", base64url_encode(cred.credential_id).substr(0, 16)},
         {"discoverable", cred.discoverable ? "true" : "false"}});
  return json_response(200, {{"username", pending->username},
                             {"credential_id", base64url_encode(cred.credential_id)},
                             {"label", cred.label},
                             {"discoverable", cred.discoverable},
                             {"is_admin", is_admin},
                             {"credential_count", count}});
}

// Administration.

Response WawaService::list_users(const Request& req) {
  if (!admin_of(req)) {
    return error_response(Error(Errc::kForbidden, "admin session required"));
  }
  Timestamp now = clock_.now();
  Json users = Json::array();
  store_.read([&](const StoreData& d) {
    for (const auto& [name, u] : d.users) {
      Json creds = Json::array();
      for (const auto& c : u.credentials) {
        creds.push_back({{"credential_id", base64url_encode(c.credential_id)},
                         {"label", c.label},
                         {"discoverable", c.discoverable},
                         {"sign_count", c.sign_count},
                         {"algorithm", c.public_key.alg},
                         {"created_at", iso(c.created_at)}});
      }
      Json active = Json::array();
      Json recent = Json::array();
      for (const auto& s : d.sessions) {
        if (s.user_id != u.user_id) continue;
        Json sj = session_json(s, now);
        if (is_live(s.state) && now < s.expires_at) {
          active.push_back(std::move(sj));
        } else {
          recent.push_back(std::move(sj));
        }
      }
      users.push_back({{"username", u.username},
                       {"display_name", u.display_name},
                       {"is_admin", u.is_admin},
                       {"created_at", iso(u.created_at)},
                       {"credentials", creds},
                       {"active_sessions", active},
                       {"recent_sessions", recent}});
    }
  });
  return json_response(200, {{"users", users}});
}

Response WawaService::set_admin(const Request& req, std::string_view username) {
  auto caller = admin_of(req);
  if (!caller) return error_response(Error(Errc::kForbidden, "admin session required"));
  auto body = parse_body(req);
  if (!body) return error_response(body.error());
  if (!body->contains("is_admin") || !(*body)["is_admin"].is_boolean()) {
    return error_response(Error(Errc::kMalformedBody, "is_admin must be a boolean"));
  }
  bool want = (*body)["is_admin"].get<bool>();
  std::string target = fold_username(username);
  auto old_session = session_of(req);
  std::optional<std::string> rotated;

  Status s = store_.transact([&](StoreData& d) -> Status {
    auto it = d.users.find(target);
    if (it == d.users.end()) return Error(Errc::kUnknownUser, "no user " + target);
    UserAccount& user = it->second;
    if (user.is_admin && !want && d.admin_count() <= 1) {
      return Error(Errc::kLastAdminProtection, "cannot demote the last admin");
    }
    if (user.is_admin != want && user.user_id == caller->user_id && old_session) {
      if (auto* rec = d.session(old_session->session_id)) {
        rotated = new_session_id();
        rec->session_id = *rotated;
      }
    }
    user.is_admin = want;
    return {};
  });
  if (!s) return error_response(s.error());
  emit_("admin_changed", {{"user", target},
                          {"is_admin", want ? "true" : "false"},
                          {"by", caller->username}});
  Response r = json_response(200, {{"username", target}, {"is_admin", want}});
  if (rotated) {
    r.headers["Set-Cookie"] =
        session_cookie(*rotated, old_session->expires_at - clock_.now());
  }
  return r;
}

Response WawaService::issue_token(const Request& req) {
  auto caller = admin_of(req);
  if (!caller) return error_response(Error(Errc::kForbidden, "admin session required"));
  auto body = parse_body(req);
  if (!body) return error_response(body.error());
  int64_t ttl = std::chrono::duration_cast<std::chrono::seconds>(config_.token_ttl).count();
  int max_uses = 1;
  if (body->contains("ttl")) {
    if (!(*body)["ttl"].is_number_integer()) {
      return error_response(Error(Errc::kInvalidArgument, "ttl must be an integer"));
    }
    ttl = (*body)["ttl"].get<int64_t>();
  }
  if (body->contains("max_uses")) {
    if (!(*body)["max_uses"].is_number_integer()) {
      return error_response(Error(Errc::kInvalidArgument, "max_uses must be an integer"));
    }
    max_uses = (*body)["max_uses"].get<int>();
  }
  if (ttl <= 0) return error_response(Error(Errc::kInvalidArgument, "ttl must be positive"));
  if (max_uses < 1) {
    return error_response(Error(Errc::kInvalidArgument, "max_uses must be at least 1"));
  }
  RegistrationToken t;
  t.token = hex_encode(random_.bytes(16));
  t.issued_by = caller->user_id;
  t.expires_at = clock_.now() + std::chrono::seconds(ttl);
  t.max_uses = max_uses;
  t.qr_payload = config_.base_url() + "/portal?token=" + t.token;
  Status s = store_.transact([&](StoreData& d) -> Status {
    d.tokens[t.token] = t;
    return {};
  });
  if (!s) return error_response(s.error());
  emit_("token_issued", {{"by", caller->username},
                         {"ttl", std::to_string(ttl)},
                         {"max_uses", std::to_string(max_uses)}});
  return json_response(200, {{"token", t.token},
                             {"expires_at", iso(t.expires_at)},
                             {"ttl", ttl},
                             {"max_uses", t.max_uses},
                             {"uses", t.uses},
                             {"qr_payload", t.qr_payload}});
}

Result<RegistrationToken> WawaService::bootstrap_admin(std::string_view username) {
  if (!valid_username(username)) {
    return Error(Errc::kInvalidArgument, "invalid username");
  }
  Timestamp now = clock_.now();
  RegistrationToken t;
  t.token = hex_encode(random_.bytes(16));
  t.expires_at = now + config_.bootstrap_token_ttl;
  t.max_uses = 1;
  t.grants_admin = true;
  t.bound_username = fold_username(username);
  t.qr_payload = config_.base_url() + "/portal?token=" + t.token;
  Status s = store_.transact([&](StoreData& d) -> Status {
    if (d.admin_count() > 0) {
      return Error(Errc::kAdminAlreadyExists, "an admin account exists");
    }
    for (const auto& [_, other] : d.tokens) {
      if (other.grants_admin && other.usable_at(now)) {
        return Error(Errc::kAdminAlreadyExists, "a bootstrap token is outstanding");
      }
    }
    d.tokens[t.token] = t;
    return {};
  });
  if (!s) return s.error();
  emit_("bootstrap_token_issued", {{"user", *t.bound_username}});
  return t;
}

// Session lifecycle.

void WawaService::expire_locked(StoreData& data, Timestamp now) {
  for (auto& s : data.sessions) {
    if (is_live(s.state) && now >= s.expires_at) {
      s.state = SessionState::kExpired;
      s.ended_at = now;
      emit_("session_expired", {{"rhid", s.rhid}, {"gateway", s.gateway_name}});
    }
  }
}

size_t WawaService::session_expiry_sweep() {
  Timestamp now = clock_.now();
  size_t expired = 0;
  (void)store_.transact([&](StoreData& d) -> Status {
    for (const auto& s : d.sessions) {
      if (is_live(s.state) && now >= s.expires_at) ++expired;
    }
    expire_locked(d, now);
    std::erase_if(d.sessions, [&](const SessionRecord& s) {
      return !is_live(s.state) && s.ended_at &&
             *s.ended_at + config_.retention <= now;
    });
    std::erase_if(d.tokens, [&](const auto& kv) {
      return kv.second.expires_at + config_.retention <= now;
    });
    return {};
  });
  challenges_.purge_expired();
  {
    std::lock_guard lock(pending_mu_);
    std::erase_if(pending_,
                  [&](const auto& kv) { return now >= kv.second.expires_at; });
  }
  return expired;
}

// Gateway polling endpoint.

bool WawaService::allow_authmon(const std::string& source) {
  Timestamp now = clock_.now();
  std::lock_guard lock(rate_mu_);
  auto [it, inserted] = buckets_.try_emplace(source);
  Bucket& b = it->second;
  if (inserted) {
    b.tokens = config_.authmon_burst;
  } else {
    double elapsed = std::chrono::duration<double>(now - b.refreshed).count();
    b.tokens = std::min(config_.authmon_burst,
                        b.tokens + std::max(0.0, elapsed) * config_.authmon_rate_per_second);
  }
  b.refreshed = now;
  if (b.tokens < 1.0) return false;
  b.tokens -= 1.0;
  return true;
}

Response WawaService::authmon(const Request& req) {
  if (!allow_authmon(req.remote_addr)) {
    return http::text_response(429, "RateLimited");
  }
  if (config_.authmon_secret) {
    auto presented = req.header(kAuthmonSecretHeader);
    if (!presented ||
        !crypto::constant_time_equal(to_bytes(*presented),
                                     to_bytes(*config_.authmon_secret))) {
      return http::text_response(403, "Forbidden");
    }
  }
  auto msg = fas::parse_authmon_request(req.body);
  if (!msg) return http::text_response(400, std::string(errc_name(msg.code())));

  Timestamp now = clock_.now();
  auto in_scope = [&](const SessionRecord& s) {
    return !s.rhid.empty() && (!msg->gateway || s.gateway_name == *msg->gateway);
  };
  std::string reply;
  std::string gateway = msg->gateway.value_or("*");

  (void)store_.transact([&](StoreData& d) -> Status {
    expire_locked(d, now);
    switch (msg->verb) {
      case fas::AuthmonVerb::kView: {
        if (auto rhid = msg->confirmed_rhid()) {
          bool authorized = false;
          for (auto& s : d.sessions) {
            if (!in_scope(s) ||
                !crypto::constant_time_equal(to_bytes(s.rhid), to_bytes(*rhid))) {
              continue;
            }
            if (s.state == SessionState::kAuthenticated) {
              s.state = SessionState::kAuthorized;
              s.authorized_at = now;
              emit_("session_authorized", {{"rhid", s.rhid}, {"gateway", s.gateway_name}});
            }
            if (s.state == SessionState::kAuthorized) authorized = true;
          }
          reply = std::string(authorized ? fas::kAuthmonAck : fas::kAuthmonNak);
          emit_("authmon_confirm", {{"gateway", gateway}, {"rhid", *rhid}, {"reply", reply}});
          break;
        }
        std::vector<std::string> rhids;
        for (const auto& s : d.sessions) {
          if (in_scope(s) && s.state == SessionState::kAuthenticated &&
              std::ranges::find(rhids, s.rhid) == rhids.end()) {
            rhids.push_back(s.rhid);
          }
        }
        reply = fas::render_auth_list(rhids);
        emit_("authmon_view", {{"gateway", gateway}, {"listed", std::to_string(rhids.size())}});
        break;
      }
      case fas::AuthmonVerb::kList: {
        std::vector<std::string> rhids;
        for (auto& s : d.sessions) {
          if (in_scope(s) && s.state == SessionState::kAuthenticated) {
            if (std::ranges::find(rhids, s.rhid) == rhids.end()) rhids.push_back(s.rhid);
            s.state = SessionState::kAuthorized;
            s.authorized_at = now;
          }
        }
        reply = fas::render_auth_list(rhids);
        emit_("authmon_list", {{"gateway", gateway}, {"listed", std::to_string(rhids.size())}});
        break;
      }
      case fas::AuthmonVerb::kClear: {
        size_t cleared = 0;
        for (auto& s : d.sessions) {
          if (in_scope(s) && is_live(s.state)) {
            s.state = SessionState::kRevoked;
            s.ended_at = now;
            ++cleared;
          }
        }
        reply = std::string(fas::kAuthmonAck);
        emit_("authmon_clear", {{"gateway", gateway}, {"cleared", std::to_string(cleared)}});
        break;
      }
    }
    return {};
  });
  return http::text_response(200, reply);
}

}  // namespace fido2cap::wawa
