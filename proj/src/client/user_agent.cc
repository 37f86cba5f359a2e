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

#include "fido2cap/client/user_agent.h"

#include "fido2cap/webauthn/wire.h"

namespace fido2cap::client {

using Json = nlohmann::json;

namespace {

constexpr std::string_view kContextOpen =
    "<script id=\"fido2cap-context\" type=\"application/json\">";

void absorb_cookie(const http::Response& r,
                   std::map<std::string, std::string>& jar) {
  auto it = r.headers.find("Set-Cookie");
  if (it == r.headers.end()) return;
  std::string_view v = it->second;
  auto eq = v.find('=');
  if (eq == std::string_view::npos) return;
  std::string name(v.substr(0, eq));
  std::string value(v.substr(eq + 1, v.find(';') - eq - 1));
  bool expired = v.find("Max-Age=0") != std::string_view::npos;
  if (expired || value.empty()) {
    jar.erase(name);
  } else {
    jar[name] = value;
  }
}

}  // namespace

Result<Json> page_context(const std::string& html) {
  auto start = html.find(kContextOpen);
  if (start == std::string::npos) {
    return Error(Errc::kMalformedBody, "page has no context block");
  }
  start += kContextOpen.size();
  auto end = html.find("</script>", start);
  if (end == std::string::npos) {
    return Error(Errc::kMalformedBody, "unterminated context block");
  }
  Json j = Json::parse(html.substr(start, end - start), nullptr, false);
  if (j.is_discarded()) return Error(Errc::kMalformedBody, "context is not JSON");
  return j;
}

http::Response UserAgent::send(const std::string& method,
                               const std::string& target,
                               const std::string& body) {
  http::Request req;
  req.method = method;
  if (auto s = http::parse_target(target, req); !s) {
    return http::text_response(400, s.error().to_string());
  }
  req.body = body;
  req.remote_addr = remote_addr_;
  if (!body.empty()) req.headers["Content-Type"] = "application/json";
  std::string cookie_header;
  for (const auto& [k, v] : cookies_) {
    if (!cookie_header.empty()) cookie_header += "; ";
    cookie_header += k + "=" + v;
  }
  if (!cookie_header.empty()) req.headers["Cookie"] = cookie_header;
  http::Response r = server_(req);
  absorb_cookie(r, cookies_);
  return r;
}

Result<Json> UserAgent::call(const std::string& method,
                             const std::string& target, const Json& body) {
  http::Response r = send(method, target, method == "GET" ? "" : body.dump());
  Json j = Json::parse(r.body, nullptr, false);
  if (r.status >= 200 && r.status < 300) {
    if (j.is_discarded()) return Error(Errc::kMalformedBody, "reply is not JSON");
    return j;
  }
  if (r.status == 0) return Error(Errc::kTransportError, r.body);
  if (!j.is_discarded() && j.is_object() && j.contains("error")) {
    auto code = errc_from_name(j["error"].get<std::string>());
    return Error(code.value_or(Errc::kInvalidArgument),
                 j.value("message", std::string()));
  }
  return Error(Errc::kInvalidArgument,
               "HTTP " + std::to_string(r.status) + ": " + r.body);
}

Result<Json> UserAgent::open_portal(const std::string& portal_url) {
  // Accept absolute URLs by dropping scheme and authority.
  std::string target = portal_url;
  if (auto scheme = target.find("://"); scheme != std::string::npos) {
    auto slash = target.find('/', scheme + 3);
    target = slash == std::string::npos ? "/" : target.substr(slash);
  }
  http::Response r = send("GET", target);
  if (r.status != 200) {
    return Error(Errc::kNotFound, "portal returned " + std::to_string(r.status));
  }
  return page_context(r.body);
}

Result<Json> UserAgent::login(const std::string& username,
                              const std::string& fas_context) {
  bool portal = !fas_context.empty();
  std::string base = portal ? "/api/auth/" : "/api/login/";
  Json req = Json::object();
  if (!username.empty()) req["username"] = username;
  if (portal) req["fas_context"] = fas_context;
  auto options_json = call("POST", base + "options", req);
  if (!options_json) return options_json.error();
  auto options = webauthn::request_options_from_json(*options_json);
  if (!options) return options.error();
  auto assertion = platform_.get(*options);
  if (!assertion) return assertion.error();
  return call("POST", base + "verify",
              {{"assertion", webauthn::to_json(*assertion)}});
}

Result<Json> UserAgent::enroll(const std::string& username,
                               const std::string& token,
                               const std::string& resident_key,
                               const std::string& label) {
  Json req = {{"username", username}, {"resident_key", resident_key}};
  if (!token.empty()) req["token"] = token;
  if (!label.empty()) req["label"] = label;
  auto options_json = call("POST", "/api/admin/register/options", req);
  if (!options_json) return options_json.error();
  auto options = webauthn::creation_options_from_json(*options_json);
  if (!options) return options.error();
  auto attestation = platform_.create(*options);
  if (!attestation) return attestation.error();
  Json verify = {{"attestation", webauthn::to_json(*attestation)}};
  if (!token.empty()) verify["token"] = token;
  return call("POST", "/api/admin/register/verify", verify);
}

Result<Json> UserAgent::logout() { return call("POST", "/api/logout"); }

std::optional<std::string> UserAgent::cookie(const std::string& name) const {
  auto it = cookies_.find(name);
  if (it == cookies_.end()) return std::nullopt;
  return it->second;
}

}  // namespace fido2cap::client
