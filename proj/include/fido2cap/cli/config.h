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

#ifndef FIDO2CAP_CLI_CONFIG_H_
#define FIDO2CAP_CLI_CONFIG_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fido2cap/gateway/gateway.h"
#include "fido2cap/wawa/service.h"

namespace fido2cap::cli {

using EnvLookup =
    std::function<std::optional<std::string>(const std::string& name)>;

// Reads the process environment.
EnvLookup process_env();

// Server configuration. Keys: fas_key (64 hex chars), fas_fqdn, fas_port,
// session_timeout_seconds, rp_id, expected_origin, public_ip,
// bind_address, listen_port, store_path, authmon_secret, ...
// Each of the first group can be overridden by FIDO2CAP_<KEY upper-cased>.
// Values are parsed but not validated; call WawaConfig::validate().
// Errors: kConfigError.
Result<wawa::WawaConfig> wawa_config_from_json(const nlohmann::json& j,
                                               const EnvLookup& env = {});
Result<wawa::WawaConfig> load_wawa_config(const std::string& path,
                                          const EnvLookup& env = process_env());

// Gateway configuration in OpenNDS's UCI syntax:
//   config opennds 'setup'
//     option gatewayname 'lobby'
//     option fasremoteip '203.0.113.10'
//     option fasremotefqdn 'wifi.hotel.example'
//     option fasport '443'
//     option faskey '<64 hex chars>'
//     option sessiontimeout '60'     # minutes
//     option checkinterval '2'       # Authmon poll interval, seconds
// Errors: kConfigError.
Result<gateway::GatewayConfig> gateway_config_from_uci(std::string_view text);
Result<gateway::GatewayConfig> load_gateway_config(const std::string& path);

struct ClauseResult {
  char clause;  // 'a'..'d'
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CompatibilityReport {
  std::string gateway_name;
  std::vector<ClauseResult> clauses;

  bool ok() const;
  std::vector<char> failed() const;
};

// The four deployment clauses: (a) FAS address and port, (b) FQDN,
// (c) identical 32-byte key, (d) identical session timeout.
CompatibilityReport check_compatibility(const wawa::WawaConfig& server,
                                        const gateway::GatewayConfig& gw);
std::string render(const CompatibilityReport& report);

}  // namespace fido2cap::cli

#endif  // FIDO2CAP_CLI_CONFIG_H_
