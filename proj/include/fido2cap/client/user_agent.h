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

#ifndef FIDO2CAP_CLIENT_USER_AGENT_H_
#define FIDO2CAP_CLIENT_USER_AGENT_H_

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fido2cap/authenticator/platform_client.h"
#include "fido2cap/common/result.h"
#include "fido2cap/http/http.h"

namespace fido2cap::client {

// A scripted browser: keeps cookies for one server and drives WebAuthn
// ceremonies against the portal API with a platform client.
class UserAgent {
 public:
  UserAgent(http::Handler server, authenticator::PlatformClient& platform,
            std::string remote_addr = "127.0.0.1")
      : server_(std::move(server)),
        platform_(platform),
        remote_addr_(std::move(remote_addr)) {}

  // Raw request with the cookie jar applied; records Set-Cookie.
  http::Response send(const std::string& method, const std::string& target,
                      const std::string& body = {});

  // JSON call. Non-2xx replies become errors decoded from {"error": ...}.
  Result<nlohmann::json> call(const std::string& method,
                              const std::string& target,
                              const nlohmann::json& body = nlohmann::json::object());

  // GET /portal?fas=... ; returns the page's embedded context object.
  Result<nlohmann::json> open_portal(const std::string& portal_url);

  // Authentication through the portal (fas_context set) or the web-only
  // login (fas_context empty). An empty username selects the discoverable
  // flow.
  Result<nlohmann::json> login(const std::string& username,
                               const std::string& fas_context);

  // Registration; `token` empty means the caller relies on an admin cookie.
  Result<nlohmann::json> enroll(const std::string& username,
                                const std::string& token,
                                const std::string& resident_key = "preferred",
                                const std::string& label = {});

  Result<nlohmann::json> logout();

  std::optional<std::string> cookie(const std::string& name) const;
  void set_cookie(const std::string& name, const std::string& value) {
    cookies_[name] = value;
  }
  void clear_cookies() { cookies_.clear(); }
  authenticator::PlatformClient& platform() { return platform_; }

 private:
  http::Handler server_;
  authenticator::PlatformClient& platform_;
  std::string remote_addr_;
  std::map<std::string, std::string> cookies_;
};

// Extracts the JSON context a portal page embeds for its script.
Result<nlohmann::json> page_context(const std::string& html);

}  // namespace fido2cap::client

#endif  // FIDO2CAP_CLIENT_USER_AGENT_H_
