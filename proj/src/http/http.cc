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

#include "fido2cap/http/http.h"

#include <strings.h>

#include "fido2cap/common/bytes.h"

namespace fido2cap::http {

bool CaseInsensitiveLess::operator()(const std::string& a,
                                     const std::string& b) const {
  return strcasecmp(a.c_str(), b.c_str()) < 0;
}

std::optional<std::string> Request::header(const std::string& name) const {
  auto it = headers.find(name);
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Request::cookie(std::string_view name) const {
  auto raw = header("Cookie");
  if (!raw) return std::nullopt;
  std::string_view s = *raw;
  while (!s.empty()) {
    size_t end = s.find(';');
    std::string_view item = s.substr(0, end);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    size_t eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == name) {
      return std::string(item.substr(eq + 1));
    }
    if (end == std::string_view::npos) break;
    s.remove_prefix(end + 1);
  }
  return std::nullopt;
}

std::optional<std::string> Request::query_param(const std::string& name) const {
  auto it = query.find(name);
  if (it == query.end()) return std::nullopt;
  return it->second;
}

std::string Response::content_type() const {
  auto it = headers.find("Content-Type");
  return it == headers.end() ? std::string() : it->second;
}

Response text_response(int status, std::string body, std::string content_type) {
  Response r;
  r.status = status;
  r.body = std::move(body);
  r.headers["Content-Type"] = std::move(content_type);
  return r;
}

Status parse_target(std::string_view target, Request& out) {
  size_t q = target.find('?');
  out.path = std::string(target.substr(0, q));
  out.query.clear();
  if (q == std::string_view::npos) return {};
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    size_t amp = rest.find('&');
    std::string_view item = rest.substr(0, amp);
    size_t eq = item.find('=');
    auto key = percent_decode(item.substr(0, eq), true);
    auto value = eq == std::string_view::npos
                     ? Result<std::string>(std::string())
                     : percent_decode(item.substr(eq + 1), true);
    if (!key || !value) {
      return Error(Errc::kMalformedBody, "bad query string");
    }
    if (!key->empty()) out.query.emplace(std::move(*key), std::move(*value));
    if (amp == std::string_view::npos) break;
    rest.remove_prefix(amp + 1);
  }
  return {};
}

std::optional<std::string> set_cookie_value(const Response& response,
                                            std::string_view name) {
  auto it = response.headers.find("Set-Cookie");
  if (it == response.headers.end()) return std::nullopt;
  std::string_view v = it->second;
  std::string prefix = std::string(name) + "=";
  if (v.substr(0, prefix.size()) != prefix) return std::nullopt;
  v.remove_prefix(prefix.size());
  return std::string(v.substr(0, v.find(';')));
}

}  // namespace fido2cap::http
