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

#include "fido2cap/cli/scenario.h"

#include <cstdio>
#include <set>

#include "fido2cap/crypto/crypto.h"

namespace fido2cap::cli {

using Json = nlohmann::json;
using gateway::ClientState;

namespace {

constexpr char kHotelFqdn[] = "wifi.hotel.example";
constexpr char kHotelIp[] = "203.0.113.10";
constexpr char kDefaultDestination[] = "93.184.216.34";

Result<Actor> parse_actor(std::string_view s) {
  if (s == "admin") return Actor::kAdmin;
  if (s == "user") return Actor::kUser;
  if (s == "gateway") return Actor::kGateway;
  if (s == "authenticator") return Actor::kAuthenticator;
  return Error(Errc::kInvalidArgument, "unknown actor kind '" + std::string(s) + "'");
}

Bytes derived_key(std::string_view label) {
  auto d = crypto::sha256(to_bytes(label));
  return Bytes(d.begin(), d.end());
}

std::string param(const ScenarioStep& step, const std::string& key,
                  const std::string& fallback = {}) {
  auto it = step.params.find(key);
  return it == step.params.end() ? fallback : it->second;
}

Result<int64_t> int_param(const ScenarioStep& step, const std::string& key,
                          int64_t fallback) {
  auto it = step.params.find(key);
  if (it == step.params.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    return Error(Errc::kInvalidArgument, key + " must be an integer");
  }
}

std::string short_hex(const std::string& hex) { return hex.substr(0, 12); }

// Routine polling noise left out of the default transcript.
bool is_quiet(const Event& e) {
  auto field = [&](std::string_view k) {
    const std::string* v = e.field(k);
    return v == nullptr ? std::string() : *v;
  };
  if (e.name == "authmon_view") return field("listed") == "0";
  if (e.name == "authmon_confirm") return field("reply") == "ack";
  if (e.name == "authmon_poll") {
    return field("listed") == "0" && field("confirmed") == "0" &&
           field("deauthorized") == "0";
  }
  return false;
}

}  // namespace

std::string_view to_string(Actor actor) {
  switch (actor) {
    case Actor::kAdmin: return "admin";
    case Actor::kUser: return "user";
    case Actor::kGateway: return "gateway";
    case Actor::kAuthenticator: return "authenticator";
  }
  return "user";
}

Status ScenarioScript::validate() const {
  std::set<std::pair<Actor, std::string>> declared;
  std::set<std::string> keys;
  for (const auto& a : actors) {
    if (a.name.empty()) return Error(Errc::kInvalidArgument, "actor without a name");
    if (!declared.insert({a.kind, a.name}).second) {
      return Error(Errc::kInvalidArgument, "actor declared twice: " + a.name);
    }
    if (a.kind == Actor::kAuthenticator) keys.insert(a.name);
  }
  for (const auto& a : actors) {
    if ((a.kind == Actor::kAdmin || a.kind == Actor::kUser) && !keys.contains(a.key)) {
      return Error(Errc::kInvalidArgument,
                   a.name + " carries undeclared authenticator '" + a.key + "'");
    }
  }
  for (size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!declared.contains({s.actor, s.name})) {
      return Error(Errc::kInvalidArgument,
                   "step " + std::to_string(i + 1) + " names undeclared " +
                       std::string(to_string(s.actor)) + " '" + s.name + "'");
    }
    if (s.expect != "ok" && !errc_from_name(s.expect)) {
      return Error(Errc::kInvalidArgument,
                   "step " + std::to_string(i + 1) + " expects unknown outcome '" +
                       s.expect + "'");
    }
  }
  return {};
}

Result<ScenarioScript> script_from_json(const Json& j) {
  try {
    ScenarioScript script;
    for (const auto& ja : j.at("actors")) {
      auto kind = parse_actor(ja.at("kind").get<std::string>());
      if (!kind) return kind.error();
      script.actors.push_back({*kind, ja.at("name").get<std::string>(),
                               ja.value("key", std::string())});
    }
    for (const auto& js : j.at("steps")) {
      ScenarioStep step;
      auto actor = parse_actor(js.at("actor").get<std::string>());
      if (!actor) return actor.error();
      step.actor = *actor;
      step.name = js.at("name").get<std::string>();
      step.action = js.at("action").get<std::string>();
      step.expect = js.value("expect", std::string("ok"));
      if (js.contains("params")) {
        for (const auto& [k, v] : js["params"].items()) {
          step.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      script.steps.push_back(std::move(step));
    }
    if (auto s = script.validate(); !s) return s.error();
    return script;
  } catch (const Json::exception& e) {
    return Error(Errc::kInvalidArgument, std::string("bad scenario: ") + e.what());
  }
}

Json to_json(const ScenarioScript& script) {
  Json actors = Json::array();
  for (const auto& a : script.actors) {
    Json ja = {{"kind", to_string(a.kind)}, {"name", a.name}};
    if (!a.key.empty()) ja["key"] = a.key;
    actors.push_back(ja);
  }
  Json steps = Json::array();
  for (const auto& s : script.steps) {
    steps.push_back({{"actor", to_string(s.actor)},
                     {"name", s.name},
                     {"action", s.action},
                     {"params", s.params},
                     {"expect", s.expect}});
  }
  return {{"actors", actors}, {"steps", steps}};
}

ScenarioScript demo_hotel_script() {
  ScenarioScript s;
  s.actors = {
      {Actor::kAuthenticator, "alice-key", ""},
      {Actor::kAuthenticator, "bob-key", ""},
      {Actor::kAuthenticator, "carol-key", ""},
      {Actor::kAuthenticator, "dave-key", ""},
      {Actor::kAuthenticator, "eve-key", ""},
      {Actor::kAdmin, "alice", "alice-key"},
      {Actor::kUser, "bob", "bob-key"},
      {Actor::kUser, "carol", "carol-key"},
      {Actor::kUser, "dave", "dave-key"},
      {Actor::kUser, "eve", "eve-key"},
      {Actor::kGateway, "lobby", ""},
  };
  auto step = [&](Actor a, std::string name, std::string action,
                  std::map<std::string, std::string> params = {},
                  std::string expect = "ok") {
    s.steps.push_back({a, std::move(name), std::move(action), std::move(params),
                       std::move(expect)});
  };
  const auto admin = Actor::kAdmin;
  const auto user = Actor::kUser;
  const auto gw = Actor::kGateway;

  step(admin, "alice", "bootstrap");
  step(admin, "alice", "issue_token", {{"as", "guests"}, {"max_uses", "2"}});
  step(user, "bob", "enroll", {{"token", "guests"}, {"resident_key", "discouraged"}});
  step(user, "carol", "enroll", {{"token", "guests"}, {"resident_key", "required"}});
  step(user, "dave", "enroll", {{"token", "guests"}}, "TokenExpiredOrExhausted");
  step(gw, "lobby", "boot");

  step(user, "bob", "attach", {{"gateway", "lobby"}, {"mac", "02:00:00:00:0b:0b"},
                               {"ip", "192.168.4.21"}});
  step(user, "bob", "browse");
  step(user, "bob", "login", {{"username", "bob"}});
  step(gw, "lobby", "await", {{"user", "bob"}, {"state", "authorized"}, {"within", "2"}});

  step(user, "carol", "attach", {{"gateway", "lobby"}, {"mac", "02:00:00:00:0c:0c"},
                                 {"ip", "192.168.4.22"}});
  step(user, "carol", "browse");
  step(user, "carol", "login");
  step(gw, "lobby", "await", {{"user", "carol"}, {"state", "authorized"}, {"within", "2"}});
  step(admin, "alice", "list_users", {{"user", "carol"}, {"active_sessions", "1"}});

  step(user, "eve", "attach", {{"gateway", "lobby"}, {"mac", "02:00:00:00:0e:0e"},
                               {"ip", "192.168.4.23"}});
  step(user, "eve", "browse");
  step(user, "eve", "login", {{"username", "bob"}}, "NoMatchingCredential");
  step(user, "eve", "login", {}, "NoMatchingCredential");
  step(gw, "lobby", "poll");
  step(user, "eve", "expect_state", {{"state", "portal_served"}});

  step(user, "bob", "logout");
  step(gw, "lobby", "await", {{"user", "bob"}, {"state", "captive"}, {"within", "1"}});
  step(user, "bob", "browse");

  step(gw, "lobby", "wait_for_session_end", {{"user", "carol"}});
  step(gw, "lobby", "await", {{"user", "carol"}, {"state", "captive"}, {"within", "1"}});
  step(user, "carol", "browse");
  return s;
}

bool ScenarioReport::ok() const {
  return std::ranges::all_of(steps, [](const StepReport& r) { return r.pass; });
}

wawa::WawaConfig hotel_config(const WorldOptions& options) {
  wawa::WawaConfig c;
  c.fas.fas_key = derived_key("fido2cap demo hotel shared key");
  c.fas.fas_fqdn = kHotelFqdn;
  c.fas.fas_port = 443;
  c.fas.session_timeout_seconds = options.session_timeout_seconds;
  c.rp.rp_id = kHotelFqdn;
  c.rp.rp_name = "Hotel Wi-Fi";
  c.rp.expected_origin = std::string("https://") + kHotelFqdn;
  c.public_ip = kHotelIp;
  return c;
}

// People carry one authenticator and one browser.
struct HotelWorld::Person {
  Person(std::string n, authenticator::SoftAuthenticator& key, http::Handler server)
      : name(std::move(n)),
        platform(key, std::string("https://") + kHotelFqdn),
        agent(std::move(server), platform) {}

  std::string name;
  authenticator::PlatformClient platform;
  client::UserAgent agent;
  std::string gateway;
  std::string mac;
  std::string fas_context;
};

class HotelWorld::TranscriptSink final : public EventSink {
 public:
  TranscriptSink(EventLog& log, bool verbose) : log_(log), verbose_(verbose) {}

  void emit(Event event) override {
    if (lines_ != nullptr && (verbose_ || !is_quiet(event))) write(event.to_line());
    log_.emit(std::move(event));
  }

  void write(const std::string& line) {
    if (lines_ != nullptr) lines_->push_back(line);
    if (live_ != nullptr) *live_ << line << "\n";
  }

  void attach(std::vector<std::string>* lines, std::ostream* live) {
    lines_ = lines;
    live_ = live;
  }

 private:
  EventLog& log_;
  bool verbose_;
  std::vector<std::string>* lines_ = nullptr;
  std::ostream* live_ = nullptr;
};

HotelWorld::HotelWorld(WorldOptions options)
    : options_(options),
      random_(options.seed),
      sink_(std::make_unique<TranscriptSink>(events_, options.verbose)) {
  service_ = std::make_unique<wawa::WawaService>(hotel_config(options_), store_,
                                                 clock_, random_, sink_.get());
}

HotelWorld::~HotelWorld() = default;

gateway::GatewaySim* HotelWorld::gateway(const std::string& name) {
  auto it = gateways_.find(name);
  return it == gateways_.end() ? nullptr : it->second.get();
}

HotelWorld::Person* HotelWorld::person(const std::string& name) {
  auto it = people_.find(name);
  return it == people_.end() ? nullptr : it->second.get();
}

Status HotelWorld::declare(const ActorDecl& a) {
  switch (a.kind) {
    case Actor::kAuthenticator:
      keys_[a.name] = std::make_unique<authenticator::SoftAuthenticator>(random_);
      return {};
    case Actor::kAdmin:
    case Actor::kUser: {
      auto key = keys_.find(a.key);
      if (key == keys_.end()) {
        return Error(Errc::kInvalidArgument, "no authenticator " + a.key);
      }
      people_[a.name] =
          std::make_unique<Person>(a.name, *key->second, service_->handler());
      return {};
    }
    case Actor::kGateway: {
      gateway::GatewayConfig c;
      c.gateway_name = a.name;
      c.fas = service_->config().fas;
      if (options_.wrong_key) c.fas.fas_key = derived_key("not the hotel key");
      c.fas_address = service_->config().public_ip;
      c.poll_interval = options_.poll_interval;
      gateways_[a.name] = std::make_unique<gateway::GatewaySim>(
          c, service_->handler(), clock_, random_, sink_.get());
      return {};
    }
  }
  return {};
}

void HotelWorld::tick(gateway::GatewaySim&) {
  clock_.advance(options_.poll_interval);
  service_->session_expiry_sweep();
  for (auto& [_, gw] : gateways_) {
    gw->expiry_tick();
    gw->authmon_poll_cycle();
  }
}

ScenarioReport HotelWorld::run(const ScenarioScript& script, std::ostream* live) {
  ScenarioReport report;
  sink_->attach(&report.transcript, live);
  auto finish = [&] { sink_->attach(nullptr, nullptr); };

  if (auto s = script.validate(); !s) {
    sink_->write(format_iso8601(clock_.now()) + " scenario invalid " + s.error().to_string());
    StepReport bad;
    bad.outcome = std::string(errc_name(s.code()));
    bad.detail = s.error().detail;
    report.steps.push_back(bad);
    finish();
    return report;
  }
  for (const auto& a : script.actors) (void)declare(a);

  for (size_t i = 0; i < script.steps.size(); ++i) {
    const ScenarioStep& step = script.steps[i];
    StepReport r;
    r.index = i + 1;
    r.step = step;
    auto result = run_step(step);
    r.at = clock_.now();
    if (result) {
      r.outcome = "ok";
      r.detail = *result;
    } else {
      r.outcome = std::string(errc_name(result.code()));
      r.detail = result.error().detail;
    }
    r.pass = r.outcome == step.expect;

    char index[8];
    std::snprintf(index, sizeof index, "%02zu", r.index);
    std::string line = format_iso8601(r.at) + " scenario step n=" + index +
                       " actor=" + std::string(to_string(step.actor)) +
                       " name=" + step.name + " action=" + step.action;
    for (const auto& [k, v] : step.params) line += " " + k + "=" + v;
    line += " expect=" + step.expect + " got=" + r.outcome +
            " result=" + (r.pass ? "PASS" : "FAIL");
    if (!r.detail.empty()) line += " detail=\"" + r.detail + "\"";
    sink_->write(line);
    report.steps.push_back(std::move(r));
  }
  sink_->write(format_iso8601(clock_.now()) + " scenario done steps=" +
               std::to_string(report.steps.size()) +
               " result=" + (report.ok() ? "PASS" : "FAIL"));
  finish();
  return report;
}

Result<std::string> HotelWorld::run_step(const ScenarioStep& step) {
  switch (step.actor) {
    case Actor::kAdmin:
    case Actor::kUser: {
      Person* p = person(step.name);
      if (p == nullptr) return Error(Errc::kInvalidArgument, "unknown person " + step.name);
      if (step.actor == Actor::kAdmin) return admin_step(*p, step);
      return user_step(*p, step);
    }
    case Actor::kGateway: {
      auto* gw = gateway(step.name);
      if (gw == nullptr) return Error(Errc::kInvalidArgument, "unknown gateway " + step.name);
      return gateway_step(*gw, step);
    }
    case Actor::kAuthenticator: {
      auto it = keys_.find(step.name);
      if (it == keys_.end()) return Error(Errc::kInvalidArgument, "unknown key " + step.name);
      return key_step(*it->second, step);
    }
  }
  return Error(Errc::kInvalidArgument, "unknown actor");
}

Result<std::string> HotelWorld::admin_step(Person& p, const ScenarioStep& step) {
  const std::string& a = step.action;
  if (a == "bootstrap") {
    auto token = service_->bootstrap_admin(p.name);
    if (!token) return token.error();
    auto enrolled = p.agent.enroll(p.name, token->token, "required");
    if (!enrolled) return enrolled.error();
    auto login = p.agent.login(p.name, "");
    if (!login) return login.error();
    return "admin " + p.name + " enrolled and signed in";
  }
  if (a == "issue_token") {
    auto max_uses = int_param(step, "max_uses", 1);
    if (!max_uses) return max_uses.error();
    Json body = {{"max_uses", *max_uses}};
    if (step.params.contains("ttl")) {
      auto ttl = int_param(step, "ttl", 600);
      if (!ttl) return ttl.error();
      body["ttl"] = *ttl;
    }
    auto r = p.agent.call("POST", "/api/admin/regtoken", body);
    if (!r) return r.error();
    tokens_[param(step, "as", "token")] = (*r)["token"].get<std::string>();
    return "qr " + (*r)["qr_payload"].get<std::string>();
  }
  if (a == "list_users") {
    auto r = p.agent.call("GET", "/api/admin/users");
    if (!r) return r.error();
    std::string who = param(step, "user");
    if (who.empty()) return std::to_string((*r)["users"].size()) + " users";
    for (const auto& u : (*r)["users"]) {
      if (u["username"] != who) continue;
      size_t active = u["active_sessions"].size();
      std::string want = param(step, "active_sessions");
      if (!want.empty() && std::to_string(active) != want) {
        return Error(Errc::kExpectationFailed,
                     who + " has " + std::to_string(active) + " active sessions");
      }
      return who + " active_sessions=" + std::to_string(active);
    }
    return Error(Errc::kUnknownUser, who);
  }
  if (a == "set_admin") {
    auto r = p.agent.call("POST", "/api/admin/users/" + param(step, "user") + "/admin",
                          {{"is_admin", param(step, "is_admin") == "true"}});
    if (!r) return r.error();
    return r->dump();
  }
  return user_step(p, step);
}

Result<std::string> HotelWorld::user_step(Person& p, const ScenarioStep& step) {
  const std::string& a = step.action;
  if (a == "enroll") {
    std::string token = param(step, "token");
    if (auto it = tokens_.find(token); it != tokens_.end()) token = it->second;
    auto r = p.agent.enroll(param(step, "username", p.name), token,
                            param(step, "resident_key", "preferred"),
                            param(step, "label"));
    if (!r) return r.error();
    return std::string((*r)["discoverable"].get<bool>() ? "discoverable"
                                                        : "non-discoverable") +
           " credential for " + (*r)["username"].get<std::string>();
  }
  if (a == "login") {
    if (p.fas_context.empty()) {
      return Error(Errc::kMissingFasContext, "no portal context; browse first");
    }
    std::string username = param(step, "username");
    auto r = p.agent.login(username, p.fas_context);
    if (!r) return r.error();
    return "session for " + (*r)["username"].get<std::string>() +
           (username.empty() ? " (discoverable)" : " (allow-list)");
  }
  if (a == "logout") {
    auto r = p.agent.logout();
    if (!r) return r.error();
    return std::string("signed out");
  }

  // Everything below happens on the gateway the person is attached to.
  if (a == "attach") {
    auto* gw = gateway(param(step, "gateway"));
    if (gw == nullptr) return Error(Errc::kInvalidArgument, "unknown gateway");
    p.gateway = param(step, "gateway");
    p.mac = param(step, "mac");
    auto rec = gw->client_attach(p.mac, param(step, "ip", "192.168.4.100"));
    p.fas_context.clear();
    return "hid " + short_hex(rec.hid) + "...";
  }
  auto* gw = gateway(p.gateway);
  if (gw == nullptr) return Error(Errc::kUnknownClient, p.name + " is not attached");
  if (a == "browse") {
    auto decision = gw->enforcement_check(
        p.mac, param(step, "destination", kDefaultDestination));
    if (!decision) return decision.error();
    if (decision->allow) return std::string("allowed");
    auto ctx = p.agent.open_portal(*decision->redirect);
    if (!ctx) return ctx.error();
    if ((*ctx)["mode"] != "login") {
      p.fas_context.clear();
      return Error(Errc::kMissingFasContext,
                   "portal could not identify the network session");
    }
    p.fas_context = (*ctx)["fas_context"].get<std::string>();
    return "redirected to portal, gateway " + (*ctx)["gateway_name"].get<std::string>();
  }
  if (a == "expect_state") {
    auto c = gw->client(p.mac);
    if (!c) return Error(Errc::kUnknownClient, p.mac);
    std::string got(gateway::to_string(c->state));
    if (got != param(step, "state")) {
      return Error(Errc::kExpectationFailed, "client is " + got);
    }
    return got;
  }
  return Error(Errc::kInvalidArgument, "unknown action " + a);
}

Result<std::string> HotelWorld::gateway_step(gateway::GatewaySim& gw,
                                             const ScenarioStep& step) {
  const std::string& a = step.action;
  if (a == "boot") {
    if (auto s = gw.boot(); !s) return s.error();
    return std::string("cleared");
  }
  if (a == "poll") {
    auto cycles = int_param(step, "cycles", 1);
    if (!cycles) return cycles.error();
    for (int64_t i = 0; i < *cycles; ++i) tick(gw);
    return std::to_string(*cycles) + " cycle(s)";
  }
  if (a == "wait") {
    auto seconds = int_param(step, "seconds", 0);
    if (!seconds) return seconds.error();
    Timestamp until = clock_.now() + std::chrono::seconds(*seconds);
    while (clock_.now() < until) tick(gw);
    return "now " + format_iso8601(clock_.now());
  }

  Person* p = person(param(step, "user"));
  if (p == nullptr || p->mac.empty()) {
    return Error(Errc::kInvalidArgument, "user is not attached");
  }
  if (a == "await") {
    std::string want = param(step, "state");
    auto within = int_param(step, "within", 2);
    if (!within) return within.error();
    Timestamp start = clock_.now();
    for (int64_t i = 1; i <= *within; ++i) {
      tick(gw);
      auto c = gw.client(p->mac);
      if (!c) return Error(Errc::kUnknownClient, p->mac);
      bool reached = want == "authorized" ? c->state == ClientState::kAuthorized
                                          : c->state != ClientState::kAuthorized;
      if (reached) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
            clock_.now() - start);
        return std::string(gateway::to_string(c->state)) + " after " +
               std::to_string(i) + " interval(s), " + std::to_string(ms.count()) + " ms";
      }
    }
    return Error(Errc::kTimeout, p->name + " not " + want + " within " +
                                     std::to_string(*within) + " interval(s)");
  }
  if (a == "wait_for_session_end") {
    auto c = gw.client(p->mac);
    if (!c) return Error(Errc::kUnknownClient, p->mac);
    std::optional<Timestamp> end;
    store_.read([&](const wawa::StoreData& d) {
      for (const auto& s : d.sessions) {
        if (s.rhid == c->rhid && wawa::is_live(s.state)) end = s.expires_at;
      }
    });
    if (!end) return Error(Errc::kNoSession, p->name + " has no live session");
    while (clock_.now() + options_.poll_interval < *end) tick(gw);
    clock_.set(*end);
    return "server session ends " + format_iso8601(*end);
  }
  return Error(Errc::kInvalidArgument, "unknown action " + a);
}

Result<std::string> HotelWorld::key_step(authenticator::SoftAuthenticator& key,
                                         const ScenarioStep& step) {
  if (step.action == "deny_next") {
    key.script_presence({authenticator::PresenceStep::kDeny});
    return std::string("next touch denied");
  }
  return Error(Errc::kInvalidArgument, "unknown action " + step.action);
}

}  // namespace fido2cap::cli
