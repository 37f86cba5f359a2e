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

#ifndef FIDO2CAP_WAWA_SERVICE_H_
#define FIDO2CAP_WAWA_SERVICE_H_

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fido2cap/common/clock.h"
#include "fido2cap/common/event_log.h"
#include "fido2cap/common/random.h"
#include "fido2cap/fas/fas.h"
#include "fido2cap/http/http.h"
#include "fido2cap/wawa/store.h"
#include "fido2cap/webauthn/challenge_store.h"
#include "fido2cap/webauthn/relying_party.h"

namespace fido2cap::wawa {

inline constexpr char kSessionCookie[] = "fido2cap_session";
inline constexpr char kAuthmonSecretHeader[] = "X-Authmon-Secret";

struct WawaConfig {
  fas::FasSharedConfig fas;
  webauthn::RelyingPartyConfig rp;
  std::string public_ip;
  std::string bind_address = "0.0.0.0";
  int listen_port = 8443;
  std::string store_path;
  Duration retention = std::chrono::hours(24);
  Duration token_ttl = std::chrono::seconds(600);
  Duration bootstrap_token_ttl = std::chrono::hours(24);
  std::optional<std::string> authmon_secret;
  fas::BlobProfile blob_profile = fas::BlobProfile::kAuthenticated;
  // Token bucket for /fas, per source address.
  double authmon_rate_per_second = 50;
  double authmon_burst = 100;
  bool secure_cookie = true;

  Duration session_timeout() const {
    return std::chrono::seconds(fas.session_timeout_seconds);
  }
  // "https://<fqdn>:<port>"
  std::string base_url() const;
  Status validate() const;
};

// HTTP status for a service error code.
int http_status_for(Errc code);

// The FIDO2 captive-portal server: user portal, registrar API and the
// gateway's polling endpoint, routed by handle().
class WawaService {
 public:
  WawaService(WawaConfig config, Store& store, const Clock& clock,
              RandomSource& random, EventSink* events = nullptr);

  http::Response handle(const http::Request& request);
  http::Handler handler() {
    return [this](const http::Request& r) { return handle(r); };
  }

  // Expires live sessions past their deadline and purges ended sessions
  // older than the retention window. Returns how many sessions expired.
  size_t session_expiry_sweep();

  // One-time token that makes `username` an admin on first registration.
  // Errors: kAdminAlreadyExists when an admin or a live bootstrap token
  // already exists.
  Result<RegistrationToken> bootstrap_admin(std::string_view username);

  const WawaConfig& config() const { return config_; }
  Store& store() { return store_; }
  webauthn::RelyingParty& relying_party() { return rp_; }

 private:
  struct PendingRegistration {
    Bytes user_id;
    std::string username;
    std::string display_name;
    std::string label;
    bool new_user = false;
    std::optional<std::string> token;
    bool via_admin = false;
    Timestamp expires_at;
  };

  struct Bucket {
    double tokens = 0;
    Timestamp refreshed;
  };

  using Json = nlohmann::json;

  http::Response portal(const http::Request& req);
  http::Response admin_page(const http::Request& req);
  http::Response auth_options(const http::Request& req, bool with_fas);
  http::Response auth_verify(const http::Request& req, bool with_fas);
  http::Response current_session(const http::Request& req);
  http::Response logout(const http::Request& req);
  http::Response register_options(const http::Request& req);
  http::Response register_verify(const http::Request& req);
  http::Response list_users(const http::Request& req);
  http::Response set_admin(const http::Request& req, std::string_view username);
  http::Response issue_token(const http::Request& req);
  http::Response authmon(const http::Request& req);

  // The live session named by the request cookie, if any.
  std::optional<SessionRecord> session_of(const http::Request& req);
  // The caller's account when the cookie names a live admin session.
  std::optional<UserAccount> admin_of(const http::Request& req);
  bool allow_authmon(const std::string& source);
  void expire_locked(StoreData& data, Timestamp now);
  std::string new_session_id();
  std::string session_cookie(const std::string& id, Duration max_age) const;
  std::string render_page(const std::string& title, const Json& context) const;

  http::Response json_response(int status, const Json& body) const;
  http::Response error_response(const Error& error) const;

  WawaConfig config_;
  Store& store_;
  const Clock& clock_;
  RandomSource& random_;
  EventEmitter emit_;
  webauthn::ChallengeStore challenges_;
  webauthn::RelyingParty rp_;

  std::mutex pending_mu_;
  std::map<Bytes, PendingRegistration> pending_;

  std::mutex rate_mu_;
  std::map<std::string, Bucket> buckets_;
};

}  // namespace fido2cap::wawa

#endif  // FIDO2CAP_WAWA_SERVICE_H_
