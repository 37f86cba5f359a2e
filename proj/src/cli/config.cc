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

#include "fido2cap/cli/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fido2cap::cli {

using Json = nlohmann::json;

namespace {

Result<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error(Errc::kConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Result<int64_t> parse_int(const std::string& key, std::string_view text) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    return Error(Errc::kConfigError, key + " must be an integer, got '" +
                                         std::string(text) + "'");
  }
}

Result<Bytes> parse_key(const std::string& key, std::string_view hex) {
  auto bytes = hex_decode(hex);
  if (!bytes) {
    return Error(Errc::kConfigError, key + " must be hex: " + bytes.error().detail);
  }
  return bytes;
}

// Config values that may come from the file or the environment, as text.
const std::vector<std::string> kOverridable = {
    "fas_key",   "fas_fqdn",     "fas_port",    "session_timeout_seconds",
    "rp_id",     "expected_origin", "public_ip", "bind_address",
    "listen_port", "store_path", "authmon_secret"};

const std::vector<std::string> kIntegerKeys = {"fas_port", "session_timeout_seconds",
                                               "listen_port"};

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

Result<wawa::WawaConfig> wawa_config_from_json(const Json& input,
                                               const EnvLookup& env) {
  if (!input.is_object()) {
    return Error(Errc::kConfigError, "configuration must be a JSON object");
  }
  Json j = input;
  if (env) {
    for (const auto& key : kOverridable) {
      auto v = env("FIDO2CAP_" + upper(key));
      if (!v) continue;
      if (std::ranges::find(kIntegerKeys, key) != kIntegerKeys.end()) {
        auto n = parse_int("FIDO2CAP_" + upper(key), *v);
        if (!n) return n.error();
        j[key] = *n;
      } else {
        j[key] = *v;
      }
    }
  }

  wawa::WawaConfig c;
  try {
    if (!j.contains("fas_key")) return Error(Errc::kConfigError, "fas_key is required");
    if (!j.contains("fas_fqdn")) return Error(Errc::kConfigError, "fas_fqdn is required");
    auto key = parse_key("fas_key", j.at("fas_key").get<std::string>());
    if (!key) return key.error();
    c.fas.fas_key = *key;
    c.fas.fas_fqdn = j.at("fas_fqdn").get<std::string>();
    c.fas.fas_port = j.value("fas_port", 443);
    c.fas.session_timeout_seconds = j.value("session_timeout_seconds", int64_t{3600});
    c.rp.rp_id = j.value("rp_id", c.fas.fas_fqdn);
    std::string origin = "https://" + c.fas.fas_fqdn;
    if (c.fas.fas_port != 443) origin += ":" + std::to_string(c.fas.fas_port);
    c.rp.expected_origin = j.value("expected_origin", origin);
    c.rp.rp_name = j.value("rp_name", c.rp.rp_name);
    c.rp.require_user_verification = j.value("require_user_verification", false);
    c.rp.challenge_ttl = std::chrono::seconds(j.value("challenge_ttl_seconds", 120));
    c.public_ip = j.value("public_ip", std::string());
    c.bind_address = j.value("bind_address", c.bind_address);
    c.listen_port = j.value("listen_port", c.listen_port);
    c.store_path = j.value("store_path", std::string());
    c.retention = std::chrono::hours(j.value("retention_hours", 24));
    c.token_ttl = std::chrono::seconds(j.value("registration_token_ttl_seconds", 600));
    c.bootstrap_token_ttl =
        std::chrono::hours(j.value("bootstrap_token_ttl_hours", 24));
    if (j.contains("authmon_secret") && j["authmon_secret"].is_string() &&
        !j["authmon_secret"].get<std::string>().empty()) {
      c.authmon_secret = j["authmon_secret"].get<std::string>();
    }
    std::string profile = j.value("blob_profile", std::string("authenticated"));
    if (profile == "authenticated") {
      c.blob_profile = fas::BlobProfile::kAuthenticated;
    } else if (profile == "plain") {
      c.blob_profile = fas::BlobProfile::kPlain;
    } else {
      return Error(Errc::kConfigError, "blob_profile must be authenticated or plain");
    }
    c.authmon_rate_per_second = j.value("authmon_rate_per_second", c.authmon_rate_per_second);
    c.authmon_burst = j.value("authmon_burst", c.authmon_burst);
    c.secure_cookie = j.value("secure_cookie", true);
  } catch (const Json::exception& e) {
    return Error(Errc::kConfigError, std::string("bad configuration value: ") + e.what());
  }
  return c;
}

Result<wawa::WawaConfig> load_wawa_config(const std::string& path,
                                          const EnvLookup& env) {
  auto text = read_file(path);
  if (!text) return text.error();
  Json j = Json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return Error(Errc::kConfigError, path + " is not valid JSON");
  return wawa_config_from_json(j, env);
}

Result<gateway::GatewayConfig> gateway_config_from_uci(std::string_view text) {
  std::map<std::string, std::string> options;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("config")) continue;
    if (!line.starts_with("option")) {
      return Error(Errc::kConfigError,
                   "line " + std::to_string(line_no) + ": expected 'option'");
    }
    line = trim(line.substr(6));
    auto space = line.find_first_of(" \t");
    if (space == std::string_view::npos) {
      return Error(Errc::kConfigError,
                   "line " + std::to_string(line_no) + ": option without value");
    }
    std::string name(line.substr(0, space));
    std::string_view value = trim(line.substr(space));
    if (value.size() >= 2 && (value.front() == '\'' || value.front() == '"') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    options[name] = std::string(value);
  }

  auto required = [&](const char* key) -> Result<std::string> {
    auto it = options.find(key);
    if (it == options.end()) {
      return Error(Errc::kConfigError, std::string("option ") + key + " is required");
    }
    return it->second;
  };

  gateway::GatewayConfig c;
  auto fqdn = required("fasremotefqdn");
  if (!fqdn) return fqdn.error();
  c.fas.fas_fqdn = *fqdn;
  auto port = required("fasport");
  if (!port) return port.error();
  auto port_n = parse_int("fasport", *port);
  if (!port_n) return port_n.error();
  c.fas.fas_port = static_cast<int>(*port_n);
  auto key = required("faskey");
  if (!key) return key.error();
  auto key_bytes = parse_key("faskey", *key);
  if (!key_bytes) return key_bytes.error();
  c.fas.fas_key = *key_bytes;
  auto timeout = required("sessiontimeout");
  if (!timeout) return timeout.error();
  auto minutes = parse_int("sessiontimeout", *timeout);
  if (!minutes) return minutes.error();
  c.fas.session_timeout_seconds = *minutes * 60;

  if (options.contains("gatewayname")) c.gateway_name = options["gatewayname"];
  if (options.contains("fasremoteip")) c.fas_address = options["fasremoteip"];
  if (options.contains("checkinterval")) {
    auto seconds = parse_int("checkinterval", options["checkinterval"]);
    if (!seconds) return seconds.error();
    c.poll_interval = std::chrono::seconds(*seconds);
  }
  if (options.contains("authmon_secret")) c.authmon_secret = options["authmon_secret"];
  if (options.contains("fas_secure_enabled") && options["fas_secure_enabled"] != "3") {
    return Error(Errc::kConfigError,
                 "fas_secure_enabled must be 3 (encrypted query string)");
  }
  return c;
}

Result<gateway::GatewayConfig> load_gateway_config(const std::string& path) {
  auto text = read_file(path);
  if (!text) return text.error();
  auto c = gateway_config_from_uci(*text);
  if (!c) return Error(Errc::kConfigError, path + ": " + c.error().detail);
  return c;
}

bool CompatibilityReport::ok() const {
  return std::ranges::all_of(clauses, [](const ClauseResult& c) { return c.pass; });
}

std::vector<char> CompatibilityReport::failed() const {
  std::vector<char> out;
  for (const auto& c : clauses) {
    if (!c.pass) out.push_back(c.clause);
  }
  return out;
}

CompatibilityReport check_compatibility(const wawa::WawaConfig& server,
                                        const gateway::GatewayConfig& gw) {
  CompatibilityReport report;
  report.gateway_name = gw.gateway_name;

  std::string server_addr = server.public_ip + ":" + std::to_string(server.fas.fas_port);
  std::string gw_addr = gw.fas_address + ":" + std::to_string(gw.fas.fas_port);
  bool addr_ok = !server.public_ip.empty() && server_addr == gw_addr;
  report.clauses.push_back(
      {'a', "FAS address and port", addr_ok,
       addr_ok ? server_addr : "server " + server_addr + ", gateway " + gw_addr});

  bool fqdn_ok = !server.fas.fas_fqdn.empty() &&
                 lower(server.fas.fas_fqdn) == lower(gw.fas.fas_fqdn);
  report.clauses.push_back(
      {'b', "FQDN", fqdn_ok,
       fqdn_ok ? server.fas.fas_fqdn
               : "server " + server.fas.fas_fqdn + ", gateway " + gw.fas.fas_fqdn});

  std::string key_detail;
  for (const auto& [who, key] : {std::pair{"server", &server.fas.fas_key},
                                 std::pair{"gateway", &gw.fas.fas_key}}) {
    if (key->size() != fas::kFasKeySize) {
      if (!key_detail.empty()) key_detail += "; ";
      key_detail += std::string(who) + " key is " + std::to_string(key->size()) +
                    " bytes, expected 32";
    }
  }
  if (key_detail.empty() && server.fas.fas_key != gw.fas.fas_key) {
    key_detail = "keys differ";
  }
  report.clauses.push_back({'c', "shared 32-byte key", key_detail.empty(),
                            key_detail.empty() ? "identical" : key_detail});

  int64_t a = server.fas.session_timeout_seconds;
  int64_t b = gw.fas.session_timeout_seconds;
  report.clauses.push_back(
      {'d', "session timeout", a == b,
       a == b ? std::to_string(a) + " s"
              : "server " + std::to_string(a) + " s, gateway " + std::to_string(b) + " s"});
  return report;
}

std::string render(const CompatibilityReport& report) {
  std::string out;
  for (const auto& c : report.clauses) {
    out += report.gateway_name + " (" + c.clause + ") " + c.name + ": " +
           (c.pass ? "PASS" : "FAIL") + " - " + c.detail + "\n";
  }
  return out;
}

}  // namespace fido2cap::cli
