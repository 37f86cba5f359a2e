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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fido2cap/cli/commands.h"

namespace fido2cap::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const std::string kKeyHex(64, 'a');

Json server_json() {
  return {{"fas_key", kKeyHex},
          {"fas_fqdn", "wifi.hotel.example"},
          {"fas_port", 443},
          {"public_ip", "203.0.113.10"},
          {"session_timeout_seconds", 3600}};
}

std::string gateway_uci(const std::string& name = "lobby",
                        const std::string& key = kKeyHex) {
  return "config opennds 'setup'\n"
         "\toption gatewayname '" + name + "'\n"
         "\toption fas_secure_enabled '3'\n"
         "\toption fasremoteip '203.0.113.10'\n"
         "\toption fasremotefqdn 'wifi.hotel.example'\n"
         "\toption fasport '443'\n"
         "\toption faskey '" + key + "'\n"
         "\toption sessiontimeout '60'\n"
         "\toption checkinterval '2'\n";
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("fido2cap-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return (path_ / name).string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST(WawaConfigTest, DefaultsDeriveFromFqdnAndPort) {
  auto c = wawa_config_from_json(server_json());
  ASSERT_TRUE(c) << c.error().to_string();
  EXPECT_EQ(c->rp.rp_id, "wifi.hotel.example");
  EXPECT_EQ(c->rp.expected_origin, "https://wifi.hotel.example");
  EXPECT_EQ(c->fas.fas_key, Bytes(32, 0xaa));
  EXPECT_TRUE(c->validate());

  Json j = server_json();
  j["fas_port"] = 8443;
  auto other = wawa_config_from_json(j);
  ASSERT_TRUE(other);
  EXPECT_EQ(other->rp.expected_origin, "https://wifi.hotel.example:8443");
}

TEST(WawaConfigTest, EnvironmentOverridesFile) {
  auto c = wawa_config_from_json(
      server_json(), env_of({{"FIDO2CAP_FAS_FQDN", "portal.example.net"},
                             {"FIDO2CAP_SESSION_TIMEOUT_SECONDS", "900"},
                             {"FIDO2CAP_FAS_KEY", std::string(64, '0')}}));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->fas.fas_fqdn, "portal.example.net");
  EXPECT_EQ(c->rp.rp_id, "portal.example.net");
  EXPECT_EQ(c->fas.session_timeout_seconds, 900);
  EXPECT_EQ(c->fas.fas_key, Bytes(32, 0));
}

TEST(WawaConfigTest, RejectsBadInput) {
  Json j = server_json();
  j.erase("fas_key");
  EXPECT_EQ(wawa_config_from_json(j).code(), Errc::kConfigError);
  j = server_json();
  j["fas_key"] = "zz";
  EXPECT_EQ(wawa_config_from_json(j).code(), Errc::kConfigError);
  j = server_json();
  j["fas_port"] = "not a number";
  EXPECT_EQ(wawa_config_from_json(j).code(), Errc::kConfigError);
  EXPECT_EQ(wawa_config_from_json(server_json(),
                                   env_of({{"FIDO2CAP_FAS_PORT", "eighty"}}))
                .code(),
            Errc::kConfigError);
  EXPECT_EQ(wawa_config_from_json(Json::array()).code(), Errc::kConfigError);

  j = server_json();
  j["fas_key"] = std::string(62, 'a');
  auto short_key = wawa_config_from_json(j);
  ASSERT_TRUE(short_key);
  EXPECT_FALSE(short_key->validate());
}

TEST(GatewayConfigTest, ParsesOpenNdsOptions) {
  auto c = gateway_config_from_uci(gateway_uci());
  ASSERT_TRUE(c) << c.error().to_string();
  EXPECT_EQ(c->gateway_name, "lobby");
  EXPECT_EQ(c->fas_address, "203.0.113.10");
  EXPECT_EQ(c->fas.fas_fqdn, "wifi.hotel.example");
  EXPECT_EQ(c->fas.fas_port, 443);
  EXPECT_EQ(c->fas.session_timeout_seconds, 3600);
  EXPECT_EQ(c->poll_interval, std::chrono::seconds(2));
  EXPECT_TRUE(c->validate());
}

TEST(GatewayConfigTest, RejectsMissingOrUnsupportedOptions) {
  std::string text = gateway_uci();
  auto without = [&](const std::string& option) {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
      if (line.find("option " + option + " ") == std::string::npos) out += line + "\n";
    }
    return out;
  };
  for (const char* option : {"fasremotefqdn", "fasport", "faskey", "sessiontimeout"}) {
    auto c = gateway_config_from_uci(without(option));
    ASSERT_FALSE(c) << option;
    EXPECT_NE(c.error().detail.find(option), std::string::npos);
  }
  std::string level1 = text;
  level1.replace(level1.find("'3'"), 3, "'1'");
  EXPECT_EQ(gateway_config_from_uci(level1).code(), Errc::kConfigError);
  EXPECT_EQ(gateway_config_from_uci("nonsense here\n").code(), Errc::kConfigError);
}

// Each mismatch trips exactly its own clause and no other.
TEST(CompatibilityTest, EachClauseTripsAlone) {
  auto server = *wawa_config_from_json(server_json());
  auto base = *gateway_config_from_uci(gateway_uci());
  ASSERT_TRUE(check_compatibility(server, base).ok());

  struct Case {
    char clause;
    std::function<void(gateway::GatewayConfig&)> mutate;
    std::string detail;
  };
  std::vector<Case> cases = {
      {'a', [](auto& g) { g.fas_address = "198.51.100.7"; }, "198.51.100.7:443"},
      {'a', [](auto& g) { g.fas.fas_port = 8443; }, "gateway 203.0.113.10:8443"},
      {'b', [](auto& g) { g.fas.fas_fqdn = "wifi.other.example"; }, "wifi.other.example"},
      {'c', [](auto& g) { g.fas.fas_key[0] ^= 1; }, "keys differ"},
      {'c', [](auto& g) { g.fas.fas_key.pop_back(); }, "gateway key is 31 bytes, expected 32"},
      {'d', [](auto& g) { g.fas.session_timeout_seconds = 7200; }, "gateway 7200 s"},
  };
  for (const auto& c : cases) {
    auto gw = base;
    c.mutate(gw);
    auto report = check_compatibility(server, gw);
    EXPECT_EQ(report.failed(), std::vector<char>{c.clause}) << c.detail;
    for (const auto& r : report.clauses) {
      if (r.clause == c.clause) EXPECT_NE(r.detail.find(c.detail), std::string::npos) << r.detail;
    }
  }

  auto upper = base;
  upper.fas.fas_fqdn = "WIFI.Hotel.Example";
  EXPECT_TRUE(check_compatibility(server, upper).ok());
}

TEST(CompatibilityTest, RenderShowsOneLinePerClause) {
  auto server = *wawa_config_from_json(server_json());
  auto gw = *gateway_config_from_uci(gateway_uci());
  gw.fas.session_timeout_seconds = 60;
  std::string text = render(check_compatibility(server, gw));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_NE(text.find("lobby (d) session timeout: FAIL"), std::string::npos);
  EXPECT_NE(text.find("lobby (a) FAS address and port: PASS"), std::string::npos);
}

TEST(CheckConfigCommandTest, ExitCodes) {
  TempDir dir;
  std::string wawa = dir.write("wawa.json", server_json().dump());
  std::string good = dir.write("lobby", gateway_uci());
  std::string bad = dir.write("pool", gateway_uci("pool", std::string(64, 'b')));
  std::ostringstream out, err;
  EXPECT_EQ(check_config_command(wawa, {good}, out, err, env_of({})), kExitOk);
  EXPECT_NE(out.str().find("all gateways compatible"), std::string::npos);

  out.str("");
  err.str("");
  EXPECT_EQ(check_config_command(wawa, {good, bad}, out, err, env_of({})), kExitConfig);
  EXPECT_NE(err.str().find("pool: incompatible, failing clause(s) c"), std::string::npos);
  EXPECT_EQ(err.str().find("lobby"), std::string::npos);

  EXPECT_EQ(check_config_command(dir.path("missing.json"), {good}, out, err, env_of({})),
            kExitConfig);
}

TEST(CheckConfigCommandTest, ShippedSamplesAreCompatible) {
  std::string root = FIDO2CAP_SOURCE_DIR;
  std::ostringstream out, err;
  EXPECT_EQ(check_config_command(root + "/config/wawa.json",
                                 {root + "/config/opennds-lobby", root + "/config/opennds-pool"},
                                 out, err, env_of({})),
            kExitOk)
      << err.str();
}

TEST(BootstrapCommandTest, SecondBootstrapIsRefused) {
  TempDir dir;
  Json j = server_json();
  j["store_path"] = dir.path("store.json");
  std::string wawa = dir.write("wawa.json", j.dump());
  std::ostringstream out, err;
  ASSERT_EQ(bootstrap_admin_command(wawa, "alice", out, err, env_of({})), kExitOk) << err.str();
  EXPECT_NE(out.str().find("https://wifi.hotel.example:443/portal?token="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path("store.json")));

  err.str("");
  EXPECT_EQ(bootstrap_admin_command(wawa, "mallory", out, err, env_of({})), kExitFailed);
  EXPECT_NE(err.str().find("AdminAlreadyExists"), std::string::npos);
}

TEST(BootstrapCommandTest, RefusesInvalidKey) {
  TempDir dir;
  Json j = server_json();
  j["fas_key"] = std::string(30, 'a');
  j["store_path"] = dir.path("store.json");
  std::string wawa = dir.write("wawa.json", j.dump());
  std::ostringstream out, err;
  EXPECT_EQ(bootstrap_admin_command(wawa, "alice", out, err, env_of({})), kExitConfig);
  EXPECT_FALSE(fs::exists(dir.path("store.json")));
}

TEST(ScenarioTest, DemoHotelPassesEveryStep) {
  HotelWorld world;
  auto report = world.run(demo_hotel_script());
  for (const auto& s : report.steps) {
    EXPECT_TRUE(s.pass) << s.index << " " << s.step.action << ": " << s.outcome << " "
                        << s.detail;
  }
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.transcript.back().substr(24), " scenario done steps=27 result=PASS");
}

TEST(ScenarioTest, SameSeedSameTranscript) {
  WorldOptions options;
  options.seed = 42;
  auto a = HotelWorld(options).run(demo_hotel_script()).transcript;
  auto b = HotelWorld(options).run(demo_hotel_script()).transcript;
  EXPECT_EQ(a, b);
  options.seed = 43;
  auto c = HotelWorld(options).run(demo_hotel_script()).transcript;
  EXPECT_NE(a, c);
}

TEST(ScenarioTest, WrongKeyFailsAtThePortal) {
  WorldOptions options;
  options.wrong_key = true;
  auto report = HotelWorld(options).run(demo_hotel_script());
  EXPECT_FALSE(report.ok());
  auto first = std::ranges::find_if(report.steps, [](const StepReport& s) { return !s.pass; });
  ASSERT_NE(first, report.steps.end());
  EXPECT_EQ(first->step.action, "browse");
  EXPECT_EQ(first->outcome, "MissingFasContext");
  bool degraded = std::ranges::any_of(report.transcript, [](const std::string& l) {
    return l.find("wawa portal_degraded reason=CipherError") != std::string::npos;
  });
  EXPECT_TRUE(degraded);
}

TEST(ScenarioTest, VerboseAddsPollingNoise) {
  WorldOptions quiet;
  WorldOptions verbose;
  verbose.verbose = true;
  auto q = HotelWorld(quiet).run(demo_hotel_script()).transcript;
  auto v = HotelWorld(verbose).run(demo_hotel_script()).transcript;
  EXPECT_GT(v.size(), q.size());
}

TEST(ScenarioTest, JsonRoundTripAndValidation) {
  auto script = demo_hotel_script();
  auto back = script_from_json(to_json(script));
  ASSERT_TRUE(back);
  EXPECT_EQ(to_json(*back), to_json(script));

  Json j = to_json(script);
  j["steps"][0]["name"] = "nobody";
  EXPECT_EQ(script_from_json(j).code(), Errc::kInvalidArgument);
  j = to_json(script);
  j["steps"][0]["expect"] = "SomethingElse";
  EXPECT_EQ(script_from_json(j).code(), Errc::kInvalidArgument);
  j = to_json(script);
  j["actors"][5]["key"] = "missing-key";
  EXPECT_EQ(script_from_json(j).code(), Errc::kInvalidArgument);
  EXPECT_EQ(script_from_json(Json::object()).code(), Errc::kInvalidArgument);
}

TEST(ScenarioTest, CustomScriptWithDeniedTouch) {
  Json j = {
      {"actors",
       {{{"kind", "authenticator"}, {"name", "k"}},
        {{"kind", "admin"}, {"name", "root"}, {"key", "k"}},
        {{"kind", "gateway"}, {"name", "pool"}}}},
      {"steps",
       {{{"actor", "admin"}, {"name", "root"}, {"action", "bootstrap"}},
        {{"actor", "admin"}, {"name", "root"}, {"action", "attach"},
         {"params", {{"gateway", "pool"}, {"mac", "02:aa"}, {"ip", "10.0.0.9"}}}},
        {{"actor", "admin"}, {"name", "root"}, {"action", "browse"}},
        {{"actor", "authenticator"}, {"name", "k"}, {"action", "deny_next"}},
        {{"actor", "admin"}, {"name", "root"}, {"action", "login"},
         {"params", {{"username", "root"}}}, {"expect", "UserPresenceDenied"}},
        {{"actor", "admin"}, {"name", "root"}, {"action", "login"},
         {"params", {{"username", "root"}}}},
        {{"actor", "gateway"}, {"name", "pool"}, {"action", "await"},
         {"params", {{"user", "root"}, {"state", "authorized"}, {"within", 2}}}}}}};
  auto script = script_from_json(j);
  ASSERT_TRUE(script) << script.error().to_string();
  auto report = HotelWorld().run(*script);
  for (const auto& s : report.steps) {
    EXPECT_TRUE(s.pass) << s.index << ": " << s.outcome << " " << s.detail;
  }
}

TEST(DemoCommandTest, WritesTranscriptAndExitCode) {
  TempDir dir;
  DemoOptions options;
  options.transcript_path = dir.path("t.txt");
  std::ostringstream out, err;
  EXPECT_EQ(demo_hotel_command(options, out, err), kExitOk);
  std::ifstream in(dir.path("t.txt"));
  std::stringstream file;
  file << in.rdbuf();
  EXPECT_EQ(file.str(), out.str());

  options.world.wrong_key = true;
  options.transcript_path.reset();
  EXPECT_EQ(demo_hotel_command(options, out, err), kExitFailed);
  EXPECT_NE(err.str().find("expected ok, got MissingFasContext"), std::string::npos);

  options.scenario_path = dir.write("bad.json", "{");
  EXPECT_EQ(demo_hotel_command(options, out, err), kExitConfig);
}

}  // namespace
}  // namespace fido2cap::cli
