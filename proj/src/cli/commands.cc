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

#include "fido2cap/cli/commands.h"

#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fido2cap/http/server.h"

namespace fido2cap::cli {

using Json = nlohmann::json;

namespace {

// Writes event lines straight to a stream without keeping them.
class StreamSink final : public EventSink {
 public:
  explicit StreamSink(std::ostream& out) : out_(out) {}
  void emit(Event event) override {
    std::lock_guard lock(mu_);
    out_ << event.to_line() << std::endl;
  }

 private:
  std::mutex mu_;
  std::ostream& out_;
};

Result<wawa::WawaConfig> load_valid_wawa(const std::string& path, const EnvLookup& env) {
  auto config = load_wawa_config(path, env);
  if (!config) return config.error();
  if (auto s = config->validate(); !s) {
    return Error(Errc::kConfigError, path + ": " + s.error().detail);
  }
  return config;
}

// Sleeps for `d` or until stop is set, checking every 100 ms.
void nap(Duration d, const std::atomic<bool>& stop) {
  auto until = std::chrono::steady_clock::now() + d;
  while (!stop && std::chrono::steady_clock::now() < until) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace

int check_config_command(const std::string& wawa_path,
                         const std::vector<std::string>& gateway_paths,
                         std::ostream& out, std::ostream& err, const EnvLookup& env) {
  auto server = load_wawa_config(wawa_path, env);
  if (!server) {
    err << "error: " << server.error().detail << "\n";
    return kExitConfig;
  }
  if (gateway_paths.empty()) {
    err << "error: at least one gateway configuration is required\n";
    return kExitConfig;
  }
  bool ok = true;
  for (const auto& path : gateway_paths) {
    auto gw = load_gateway_config(path);
    if (!gw) {
      err << "error: " << gw.error().detail << "\n";
      ok = false;
      continue;
    }
    if (gw->gateway_name.empty()) gw->gateway_name = path;
    auto report = check_compatibility(*server, *gw);
    out << render(report);
    if (!report.ok()) {
      ok = false;
      std::string failed;
      for (char c : report.failed()) {
        if (!failed.empty()) failed += ",";
        failed += c;
      }
      err << gw->gateway_name << ": incompatible, failing clause(s) " << failed << "\n";
    }
  }
  if (ok) out << "all gateways compatible\n";
  return ok ? kExitOk : kExitConfig;
}

int demo_hotel_command(const DemoOptions& options, std::ostream& out,
                       std::ostream& err) {
  ScenarioScript script = demo_hotel_script();
  if (options.scenario_path) {
    std::ifstream in(*options.scenario_path);
    if (!in) {
      err << "error: cannot read " << *options.scenario_path << "\n";
      return kExitConfig;
    }
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      err << "error: " << *options.scenario_path << " is not valid JSON\n";
      return kExitConfig;
    }
    auto parsed = script_from_json(j);
    if (!parsed) {
      err << "error: " << parsed.error().detail << "\n";
      return kExitConfig;
    }
    script = std::move(*parsed);
  }

  HotelWorld world(options.world);
  ScenarioReport report = world.run(script, &out);

  if (options.transcript_path) {
    std::ofstream file(*options.transcript_path, std::ios::trunc);
    if (!file) {
      err << "error: cannot write " << *options.transcript_path << "\n";
      return kExitConfig;
    }
    for (const auto& line : report.transcript) file << line << "\n";
  }
  for (const auto& s : report.steps) {
    if (!s.pass) {
      err << "step " << s.index << " (" << to_string(s.step.actor) << " " << s.step.name
          << " " << s.step.action << "): expected " << s.step.expect << ", got "
          << s.outcome << (s.detail.empty() ? "" : ": " + s.detail) << "\n";
    }
  }
  return report.ok() ? kExitOk : kExitFailed;
}

int bootstrap_admin_command(const std::string& wawa_path, const std::string& username,
                            std::ostream& out, std::ostream& err, const EnvLookup& env) {
  auto config = load_valid_wawa(wawa_path, env);
  if (!config) {
    err << "error: " << config.error().detail << "\n";
    return kExitConfig;
  }
  if (config->store_path.empty()) {
    err << "error: store_path must be set to bootstrap an admin\n";
    return kExitConfig;
  }
  auto store = wawa::MemoryStore::open(config->store_path);
  if (!store) {
    err << "error: " << store.error().detail << "\n";
    return kExitConfig;
  }
  SystemClock clock;
  SystemRandom random;
  wawa::WawaService service(*config, **store, clock, random);
  auto token = service.bootstrap_admin(username);
  if (!token) {
    err << "error: " << token.error().to_string() << "\n";
    return kExitFailed;
  }
  out << "admin enrolment for " << username << " (valid until "
      << format_iso8601(token->expires_at) << "):\n"
      << token->qr_payload << "\n";
  return kExitOk;
}

int serve_command(const ServeOptions& options, const std::atomic<bool>& stop,
                  std::ostream& out, std::ostream& err, const EnvLookup& env) {
  auto config = load_valid_wawa(options.wawa_path, env);
  if (!config) {
    err << "error: " << config.error().detail << "\n";
    return kExitConfig;
  }
  std::optional<gateway::GatewayConfig> gw_config;
  if (options.gateway_path) {
    auto gc = load_gateway_config(*options.gateway_path);
    if (!gc) {
      err << "error: " << gc.error().detail << "\n";
      return kExitConfig;
    }
    auto report = check_compatibility(*config, *gc);
    if (!report.ok()) {
      err << render(report);
      return kExitConfig;
    }
    gw_config = *gc;
  }

  std::unique_ptr<wawa::MemoryStore> store;
  if (config->store_path.empty()) {
    store = std::make_unique<wawa::MemoryStore>();
  } else {
    auto opened = wawa::MemoryStore::open(config->store_path);
    if (!opened) {
      err << "error: " << opened.error().detail << "\n";
      return kExitConfig;
    }
    store = std::move(*opened);
  }

  SystemClock clock;
  SystemRandom random;
  StreamSink events(out);
  wawa::WawaService service(*config, *store, clock, random, &events);

  std::unique_ptr<gateway::GatewaySim> gw;
  http::Handler captive;
  if (gw_config) {
    gw = std::make_unique<gateway::GatewaySim>(*gw_config, service.handler(), clock,
                                               random, &events);
    captive = gw->captive_api();
  }

  http::Handler handler = [&](const http::Request& req) -> http::Response {
    if (!gw) return service.handle(req);
    // Embedded gateway: unknown addresses are attached on first contact.
    if (!gw->client_by_ip(req.remote_addr)) {
      gw->client_attach("ip-" + req.remote_addr, req.remote_addr);
    }
    if (req.path == gateway::kCaptiveApiPath) return captive(req);
    if (req.method == "GET" && req.path == "/") {
      auto c = gw->client_by_ip(req.remote_addr);
      auto decision = gw->enforcement_check(c->mac, "example.com");
      if (!decision) return http::text_response(500, decision.error().detail);
      if (decision->allow) return http::text_response(200, "You are online.\n");
      http::Response r = http::text_response(302, "");
      r.headers["Location"] = *decision->redirect;
      return r;
    }
    return service.handle(req);
  };

  http::Server server(handler);
  if (auto s = server.start(config->bind_address, config->listen_port); !s) {
    err << "error: " << s.error().to_string() << "\n";
    return kExitFailed;
  }
  out << "listening on " << config->bind_address << ":" << server.port() << std::endl;

  std::thread sweeper([&] {
    while (!stop) {
      service.session_expiry_sweep();
      nap(std::chrono::seconds(30), stop);
    }
  });
  std::thread poller;
  if (gw) {
    if (auto s = gw->boot(); !s) err << "warning: gateway boot: " << s.error().detail << "\n";
    poller = std::thread([&] {
      while (!stop) {
        gw->expiry_tick();
        gw->authmon_poll_cycle();
        nap(gw_config->poll_interval, stop);
      }
    });
  }

  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  out << "shutting down" << std::endl;
  server.stop();
  sweeper.join();
  if (poller.joinable()) poller.join();
  return kExitOk;
}

}  // namespace fido2cap::cli
