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

#ifndef FIDO2CAP_CLI_SCENARIO_H_
#define FIDO2CAP_CLI_SCENARIO_H_

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fido2cap/authenticator/platform_client.h"
#include "fido2cap/authenticator/soft_authenticator.h"
#include "fido2cap/client/user_agent.h"
#include "fido2cap/common/event_log.h"
#include "fido2cap/gateway/gateway.h"
#include "fido2cap/wawa/service.h"

namespace fido2cap::cli {

enum class Actor { kAdmin, kUser, kGateway, kAuthenticator };
std::string_view to_string(Actor actor);

struct ActorDecl {
  Actor kind;
  std::string name;
  // Users and admins: the authenticator they carry.
  std::string key;
};

struct ScenarioStep {
  Actor actor;
  std::string name;
  std::string action;
  std::map<std::string, std::string> params;
  // "ok" or the name of the error the step must fail with.
  std::string expect = "ok";
};

struct ScenarioScript {
  std::vector<ActorDecl> actors;
  std::vector<ScenarioStep> steps;

  // Every step names a declared actor; every person carries a declared key.
  Status validate() const;
};

Result<ScenarioScript> script_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioScript& script);

// The hotel walk-through: admin bootstrap, two guests enrolled (one
// resident and one non-resident credential), attach, redirect, both login
// flows, a stranger turned away, logout and expiry.
ScenarioScript demo_hotel_script();

struct WorldOptions {
  uint64_t seed = 1;
  Duration poll_interval = std::chrono::seconds(2);
  int64_t session_timeout_seconds = 3600;
  // Give the gateways a key that differs from the server's.
  bool wrong_key = false;
  // Include every protocol event in the transcript, not only state changes.
  bool verbose = false;
};

struct StepReport {
  size_t index = 0;
  ScenarioStep step;
  Timestamp at;
  std::string outcome;  // "ok" or an error name
  std::string detail;
  bool pass = false;
};

struct ScenarioReport {
  std::vector<StepReport> steps;
  std::vector<std::string> transcript;
  bool ok() const;
};

// One WAWA server, its gateways, and the people and keys of a script, all
// on a virtual clock with seeded randomness.
class HotelWorld {
 public:
  explicit HotelWorld(WorldOptions options = {});
  ~HotelWorld();

  // Runs every step in order; later steps still run after a failure so the
  // transcript shows the whole story. Lines are streamed to `live` too.
  ScenarioReport run(const ScenarioScript& script, std::ostream* live = nullptr);

  VirtualClock& clock() { return clock_; }
  wawa::WawaService& service() { return *service_; }
  wawa::Store& store() { return store_; }
  EventLog& events() { return events_; }
  gateway::GatewaySim* gateway(const std::string& name);

 private:
  struct Person;
  class TranscriptSink;

  Status declare(const ActorDecl& actor);
  Result<std::string> run_step(const ScenarioStep& step);
  Result<std::string> admin_step(Person& p, const ScenarioStep& step);
  Result<std::string> user_step(Person& p, const ScenarioStep& step);
  Result<std::string> gateway_step(gateway::GatewaySim& gw, const ScenarioStep& step);
  Result<std::string> key_step(authenticator::SoftAuthenticator& key,
                               const ScenarioStep& step);
  // Advances one poll interval and runs the gateway's timers.
  void tick(gateway::GatewaySim& gw);
  Person* person(const std::string& name);

  WorldOptions options_;
  VirtualClock clock_;
  SeededRandom random_;
  EventLog events_;
  std::unique_ptr<TranscriptSink> sink_;
  wawa::MemoryStore store_;
  std::unique_ptr<wawa::WawaService> service_;
  std::map<std::string, std::unique_ptr<authenticator::SoftAuthenticator>> keys_;
  std::map<std::string, std::unique_ptr<Person>> people_;
  std::map<std::string, std::unique_ptr<gateway::GatewaySim>> gateways_;
  std::map<std::string, std::string> tokens_;
};

// The server configuration a HotelWorld runs with.
wawa::WawaConfig hotel_config(const WorldOptions& options);

}  // namespace fido2cap::cli

#endif  // FIDO2CAP_CLI_SCENARIO_H_
