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

#ifndef FIDO2CAP_CLI_COMMANDS_H_
#define FIDO2CAP_CLI_COMMANDS_H_

#include <atomic>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fido2cap/cli/config.h"
#include "fido2cap/cli/scenario.h"

namespace fido2cap::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitConfig = 2;

// Checks every gateway against the server; prints one line per clause.
int check_config_command(const std::string& wawa_path,
                         const std::vector<std::string>& gateway_paths,
                         std::ostream& out, std::ostream& err,
                         const EnvLookup& env = process_env());

struct DemoOptions {
  WorldOptions world;
  std::optional<std::string> scenario_path;  // JSON script; default is the hotel walk-through
  std::optional<std::string> transcript_path;
};

int demo_hotel_command(const DemoOptions& options, std::ostream& out,
                       std::ostream& err);

// Issues the one-time admin registration token against the configured
// store and prints the enrolment URL.
int bootstrap_admin_command(const std::string& wawa_path, const std::string& username,
                            std::ostream& out, std::ostream& err,
                            const EnvLookup& env = process_env());

struct ServeOptions {
  std::string wawa_path;
  // Optional embedded gateway (OpenNDS UCI file) exposing the captive
  // portal API and polling Authmon over the same process.
  std::optional<std::string> gateway_path;
};

// Runs until `stop` becomes true.
int serve_command(const ServeOptions& options, const std::atomic<bool>& stop,
                  std::ostream& out, std::ostream& err,
                  const EnvLookup& env = process_env());

}  // namespace fido2cap::cli

#endif  // FIDO2CAP_CLI_COMMANDS_H_
