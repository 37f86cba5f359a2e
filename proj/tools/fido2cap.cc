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

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "fido2cap/cli/commands.h"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  using namespace fido2cap::cli;

  CLI::App app{"fido2cap: FIDO2 authentication for captive portals"};
  app.require_subcommand(1);

  std::string wawa_path;
  std::vector<std::string> gateway_paths;
  auto* check = app.add_subcommand("check-config",
                                   "Check gateway configurations against the server's");
  check->add_option("--wawa", wawa_path, "Server configuration (JSON)")->required();
  check->add_option("--gateway", gateway_paths, "Gateway configuration (OpenNDS UCI)")
      ->required();

  DemoOptions demo;
  int64_t poll_seconds = 2;
  std::string scenario, transcript;
  auto* hotel = app.add_subcommand("demo-hotel", "Run the simulated hotel deployment");
  hotel->add_option("--seed", demo.world.seed, "Random seed");
  hotel->add_option("--poll-interval", poll_seconds, "Authmon poll interval, seconds")
      ->check(CLI::PositiveNumber);
  hotel->add_option("--session-timeout", demo.world.session_timeout_seconds,
                    "Session timeout, seconds")
      ->check(CLI::PositiveNumber);
  hotel->add_option("--scenario", scenario, "Scenario script (JSON)");
  hotel->add_option("--transcript", transcript, "Also write the transcript here");
  hotel->add_flag("--wrong-key", demo.world.wrong_key,
                  "Give the gateway a key the server does not share");
  hotel->add_flag("--verbose", demo.world.verbose, "Show every protocol event");

  std::string username;
  auto* bootstrap = app.add_subcommand("bootstrap-admin",
                                       "Issue the one-time admin enrolment token");
  bootstrap->add_option("--config", wawa_path, "Server configuration (JSON)")->required();
  bootstrap->add_option("username", username, "Admin username")->required();

  ServeOptions serve;
  std::string serve_gateway;
  auto* srv = app.add_subcommand("serve", "Run the server");
  srv->add_option("--config", serve.wawa_path, "Server configuration (JSON)")->required();
  srv->add_option("--gateway", serve_gateway,
                  "Run an embedded gateway with this OpenNDS configuration");

  CLI11_PARSE(app, argc, argv);

  if (*check) return check_config_command(wawa_path, gateway_paths, std::cout, std::cerr);
  if (*hotel) {
    demo.world.poll_interval = std::chrono::seconds(poll_seconds);
    if (!scenario.empty()) demo.scenario_path = scenario;
    if (!transcript.empty()) demo.transcript_path = transcript;
    return demo_hotel_command(demo, std::cout, std::cerr);
  }
  if (*bootstrap) return bootstrap_admin_command(wawa_path, username, std::cout, std::cerr);
  if (*srv) {
    if (!serve_gateway.empty()) serve.gateway_path = serve_gateway;
    std::signal(SIGTERM, on_signal);
    std::signal(SIGINT, on_signal);
    return serve_command(serve, g_stop, std::cout, std::cerr);
  }
  return kExitFailed;
}
