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

#include "fido2cap/fas/authmon.h"

#include <cctype>
#include <set>

#include "fido2cap/common/bytes.h"
#include "fido2cap/fas/fas.h"

namespace fido2cap::fas {
namespace {

Error bad_body(std::string detail) {
  return Error(Errc::kMalformedBody, std::move(detail));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Canonical view payload, or nullopt when it is neither "*" nor "* <rhid>".
std::optional<std::string> normalize_view_payload(std::string_view payload) {
  if (payload.empty() || payload == "*") return std::string("*");
  if (payload.size() == 2 + kHidHexLength && payload.substr(0, 2) == "* " &&
      is_hex(payload.substr(2), kHidHexLength)) {
    return "* " + lower(payload.substr(2));
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(AuthmonVerb verb) {
  switch (verb) {
    case AuthmonVerb::kClear: return "clear";
    case AuthmonVerb::kList: return "list";
    case AuthmonVerb::kView: return "view";
  }
  return "view";
}

std::optional<std::string> AuthmonMessage::confirmed_rhid() const {
  if (verb == AuthmonVerb::kView && payload.size() > 2) {
    return payload.substr(2);
  }
  return std::nullopt;
}

std::string form_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '*') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    }
  }
  return out;
}

Result<std::vector<std::pair<std::string, std::string>>> parse_form(
    std::string_view body) {
  std::vector<std::pair<std::string, std::string>> out;
  size_t start = 0;
  while (start < body.size()) {
    size_t end = body.find('&', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view item = body.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    size_t eq = item.find('=');
    auto key = percent_decode(item.substr(0, eq), true);
    auto value = eq == std::string_view::npos
                     ? Result<std::string>(std::string())
                     : percent_decode(item.substr(eq + 1), true);
    if (!key || !value || key->empty()) return bad_body("bad form field");
    out.emplace_back(std::move(*key), std::move(*value));
  }
  return out;
}

Result<AuthmonMessage> parse_authmon_request(std::string_view body) {
  auto fields = parse_form(body);
  if (!fields) return fields.error();
  std::optional<std::string> verb;
  std::optional<std::string> payload;
  AuthmonMessage msg;
  std::set<std::string> seen;
  for (auto& [k, v] : *fields) {
    if (k == "auth_get" || k == "payload" || k == "gatewayname") {
      if (!seen.insert(k).second) return bad_body("duplicate field " + k);
    }
    if (k == "auth_get") {
      verb = std::move(v);
    } else if (k == "payload") {
      payload = std::move(v);
    } else if (k == "gatewayname") {
      msg.gateway = std::move(v);
    }
  }
  if (!verb) return bad_body("auth_get missing");
  if (*verb == "clear") {
    msg.verb = AuthmonVerb::kClear;
  } else if (*verb == "list") {
    msg.verb = AuthmonVerb::kList;
  } else if (*verb == "view") {
    msg.verb = AuthmonVerb::kView;
    auto normalized = normalize_view_payload(payload.value_or(""));
    if (!normalized) return bad_body("view payload must be '*' or '* <rhid>'");
    msg.payload = std::move(*normalized);
  } else {
    return Error(Errc::kUnknownVerb, "auth_get=" + *verb);
  }
  return msg;
}

std::string serialize_authmon_request(const AuthmonMessage& message) {
  std::string out = "auth_get=" + std::string(to_string(message.verb));
  if (message.verb == AuthmonVerb::kView) {
    out += "&payload=" + form_encode(message.payload.empty() ? "*" : message.payload);
  }
  if (message.gateway) out += "&gatewayname=" + form_encode(*message.gateway);
  return out;
}

AuthmonMessage view_all(std::optional<std::string> gateway) {
  return {AuthmonVerb::kView, "*", std::move(gateway)};
}

AuthmonMessage confirm(std::string_view rhid,
                       std::optional<std::string> gateway) {
  return {AuthmonVerb::kView, "* " + lower(rhid), std::move(gateway)};
}

AuthmonMessage clear(std::optional<std::string> gateway) {
  return {AuthmonVerb::kClear, "", std::move(gateway)};
}

AuthmonMessage list(std::optional<std::string> gateway) {
  return {AuthmonVerb::kList, "", std::move(gateway)};
}

std::string render_auth_list(const std::vector<std::string>& rhids) {
  if (rhids.empty()) return std::string(kEmptyAuthList);
  std::string out;
  for (const auto& r : rhids) {
    if (!out.empty()) out += '\n';
    out += "* " + r;
  }
  return out;
}

Result<std::vector<std::string>> parse_auth_list(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line == kEmptyAuthList) continue;
    if (line.size() != 2 + kHidHexLength || line.substr(0, 2) != "* " ||
        !is_hex(line.substr(2), kHidHexLength)) {
      return bad_body("unexpected list line");
    }
    out.push_back(lower(line.substr(2)));
  }
  return out;
}

}  // namespace fido2cap::fas
