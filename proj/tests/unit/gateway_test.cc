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

#include "fido2cap/gateway/gateway.h"

#include <set>

#include <gtest/gtest.h>

#include "fido2cap/fas/authmon.h"
#include "sha256_oracle.h"
#include "wawa_fixture.h"

namespace fido2cap::testing {
namespace {

using gateway::ClientState;
using gateway::GatewayConfig;
using gateway::GatewaySim;
using nlohmann::json;

GatewayConfig gateway_config(WawaHarness& h, const std::string& name) {
  GatewayConfig c;
  c.gateway_name = name;
  c.fas = h.service().config().fas;
  c.fas_address = "203.0.113.10";
  return c;
}

std::string fas_param(const std::string& portal_url) {
  http::Request r;
  auto path = portal_url.substr(portal_url.find("/portal"));
  EXPECT_TRUE(http::parse_target(path, r));
  return r.query["fas"];
}

class GatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    admin_ = h_.admin();
    ASSERT_TRUE(admin_);
    auto token = admin_->agent.call("POST", "/api/admin/regtoken", {{"max_uses", 1}});
    bob_ = h_.guest("192.168.4.20");
    ASSERT_TRUE(bob_->agent.enroll("bob", (*token)["token"], "required"));
    gw_ = std::make_unique<GatewaySim>(gateway_config(h_, "lobby"),
                                       h_.service().handler(), h_.clock(),
                                       h_.random(), &h_.events());
  }

  // Attach, follow the redirect and authenticate through the portal.
  std::string attach_and_login(GatewaySim& gw, Guest& guest,
                               const std::string& mac,
                               const std::string& username = "bob") {
    auto rec = gw.client_attach(mac, "192.168.4.20");
    auto decision = gw.enforcement_check(mac, "93.184.216.34");
    EXPECT_TRUE(decision);
    EXPECT_FALSE(decision->allow);
    auto ctx = guest.agent.open_portal(*decision->redirect);
    EXPECT_TRUE(ctx);
    auto login = guest.agent.login(username, (*ctx)["fas_context"]);
    EXPECT_TRUE(login) << login.error().to_string();
    return rec.rhid;
  }

  WawaHarness h_;
  std::unique_ptr<Guest> admin_;
  std::unique_ptr<Guest> bob_;
  std::unique_ptr<GatewaySim> gw_;
};

TEST_F(GatewayTest, AttachmentsMintDistinctHids) {
  auto first = gw_->client_attach("02:00:00:00:00:01", "192.168.4.20");
  auto second = gw_->client_attach("02:00:00:00:00:01", "192.168.4.20");
  EXPECT_NE(first.hid, second.hid);
  EXPECT_NE(first.portal_url, second.portal_url);
  EXPECT_EQ(first.hid.size(), 64u);
  EXPECT_EQ(second.rhid, oracle_rhid(second.hid, h_.service().config().fas.fas_key));
  EXPECT_EQ(second.state, ClientState::kCaptive);
  EXPECT_TRUE(second.portal_url.starts_with(
      "https://wifi.hotel.example:443/portal?fas="));
  auto params = fas::decrypt_fas_blob(fas_param(second.portal_url),
                                      h_.service().config().fas);
  ASSERT_TRUE(params);
  EXPECT_EQ(params->hid, second.hid);
  EXPECT_EQ(params->gateway_name, "lobby");
  EXPECT_EQ(params->client_mac, "02:00:00:00:00:01");
}

TEST_F(GatewayTest, EnforcementAndCaptivity) {
  const std::string mac = "02:00:00:00:00:02";
  EXPECT_EQ(gw_->enforcement_check(mac, "1.1.1.1").code(), Errc::kUnknownClient);
  EXPECT_EQ(gw_->captivity_status(mac).code(), Errc::kUnknownClient);

  auto rec = gw_->client_attach(mac, "192.168.4.30");
  auto deny = gw_->enforcement_check(mac, "1.1.1.1");
  ASSERT_TRUE(deny);
  EXPECT_FALSE(deny->allow);
  EXPECT_EQ(deny->redirect, rec.portal_url);
  EXPECT_EQ(gw_->client(mac)->state, ClientState::kPortalServed);
  EXPECT_TRUE(gw_->enforcement_check(mac, "203.0.113.10")->allow);

  auto status = gw_->captivity_status(mac);
  ASSERT_TRUE(status);
  EXPECT_TRUE(status->captive);
  EXPECT_EQ(status->to_json(),
            json({{"captive", true}, {"user-portal-url", rec.portal_url}}));
}

TEST_F(GatewayTest, AuthorizedWithinOneCycle) {
  const std::string mac = "02:00:00:00:00:03";
  EXPECT_TRUE(gw_->authmon_poll_cycle().confirmed.empty());
  std::string rhid = attach_and_login(*gw_, *bob_, mac);
  auto result = gw_->authmon_poll_cycle();
  EXPECT_FALSE(result.error);
  EXPECT_EQ(result.listed, std::vector<std::string>{rhid});
  EXPECT_EQ(result.confirmed, std::vector<std::string>{rhid});

  auto c = gw_->client(mac);
  EXPECT_EQ(c->state, ClientState::kAuthorized);
  EXPECT_EQ(*c->expires_at - *c->authorized_at, std::chrono::hours(1));
  EXPECT_TRUE(gw_->enforcement_check(mac, "1.1.1.1")->allow);
  auto status = gw_->captivity_status(mac);
  EXPECT_FALSE(status->captive);
  EXPECT_EQ(status->seconds_remaining, 3600);

  // The server saw the confirmation.
  auto sessions = h_.data().sessions;
  auto it = std::ranges::find_if(sessions, [&](const auto& s) { return s.rhid == rhid; });
  ASSERT_NE(it, sessions.end());
  EXPECT_EQ(it->state, wawa::SessionState::kAuthorized);
  // Steady state: nothing new, keepalive acknowledged.
  auto again = gw_->authmon_poll_cycle();
  EXPECT_TRUE(again.listed.empty());
  EXPECT_TRUE(again.deauthorized.empty());
}

TEST_F(GatewayTest, LogoutReachesGatewayOnNextCycle) {
  const std::string mac = "02:00:00:00:00:04";
  attach_and_login(*gw_, *bob_, mac);
  gw_->authmon_poll_cycle();
  ASSERT_EQ(gw_->client(mac)->state, ClientState::kAuthorized);
  ASSERT_TRUE(bob_->agent.logout());
  auto result = gw_->authmon_poll_cycle();
  EXPECT_EQ(result.deauthorized, std::vector<std::string>{mac});
  EXPECT_TRUE(gw_->captivity_status(mac)->captive);
  EXPECT_FALSE(gw_->enforcement_check(mac, "1.1.1.1")->allow);
}

TEST_F(GatewayTest, ExpiredClientGetsFreshHid) {
  const std::string mac = "02:00:00:00:00:05";
  std::string old_rhid = attach_and_login(*gw_, *bob_, mac);
  gw_->authmon_poll_cycle();
  h_.clock().advance(std::chrono::seconds(3599));
  EXPECT_TRUE(gw_->expiry_tick().empty());
  // The server expires the session; the keepalive carries that over.
  h_.clock().advance(std::chrono::seconds(2));
  EXPECT_EQ(gw_->authmon_poll_cycle().deauthorized, std::vector<std::string>{mac});
  EXPECT_TRUE(gw_->expiry_tick().empty());
  auto status = gw_->captivity_status(mac);
  EXPECT_TRUE(status->captive);
  EXPECT_NE(gw_->client(mac)->rhid, old_rhid);
}

TEST_F(GatewayTest, GatewayTimerExpiresWithoutServer) {
  const std::string mac = "02:00:00:00:00:06";
  attach_and_login(*gw_, *bob_, mac);
  gw_->authmon_poll_cycle();
  h_.clock().advance(std::chrono::seconds(3600));
  EXPECT_EQ(gw_->expiry_tick(), std::vector<std::string>{mac});
  EXPECT_TRUE(gw_->expiry_tick().empty());
  EXPECT_EQ(gw_->client(mac)->state, ClientState::kExpired);
}

TEST_F(GatewayTest, OutageDelaysButDoesNotLoseAuthorization) {
  gateway::FlakyTransport flaky(h_.service().handler(), h_.random(), 0.0);
  GatewaySim gw(gateway_config(h_, "lobby"), std::ref(flaky), h_.clock(), h_.random());
  const std::string mac = "02:00:00:00:00:07";
  std::string rhid = attach_and_login(gw, *bob_, mac);
  flaky.set_down(true);
  EXPECT_TRUE(gw.authmon_poll_cycle().error);
  EXPECT_TRUE(gw.authmon_poll_cycle().error);
  EXPECT_EQ(gw.client(mac)->state, ClientState::kPortalServed);
  flaky.set_down(false);
  EXPECT_EQ(gw.authmon_poll_cycle().confirmed, std::vector<std::string>{rhid});
}

TEST_F(GatewayTest, LostConfirmationReplyIsRetried) {
  int confirms = 0;
  http::Handler server = h_.service().handler();
  http::Handler lossy = [&](const http::Request& r) {
    http::Response resp = server(r);
    if (r.body.find("payload=*+") != std::string::npos && confirms++ == 0) {
      return http::Response{0, {}, "reply lost"};
    }
    return resp;
  };
  GatewaySim gw(gateway_config(h_, "lobby"), lossy, h_.clock(), h_.random());
  const std::string mac = "02:00:00:00:00:08";
  std::string rhid = attach_and_login(gw, *bob_, mac);
  auto first = gw.authmon_poll_cycle();
  EXPECT_TRUE(first.confirmed.empty());
  EXPECT_TRUE(gw.client(mac)->confirm_pending);
  // The server already moved the session on, so view no longer lists it.
  auto second = gw.authmon_poll_cycle();
  EXPECT_TRUE(second.listed.empty());
  EXPECT_EQ(second.confirmed, std::vector<std::string>{rhid});
  EXPECT_EQ(gw.client(mac)->state, ClientState::kAuthorized);
}

TEST_F(GatewayTest, RandomLossConvergesAndStaysSafe) {
  gateway::FlakyTransport flaky(h_.service().handler(), h_.random(), 0.3, true);
  GatewaySim gw(gateway_config(h_, "lobby"), std::ref(flaky), h_.clock(), h_.random());
  std::vector<std::string> macs;
  for (int i = 0; i < 5; ++i) {
    std::string mac = "02:00:00:00:01:0" + std::to_string(i);
    macs.push_back(mac);
    attach_and_login(gw, *bob_, mac);
  }
  gw.client_attach("02:00:00:00:02:00", "192.168.4.99");  // never logs in
  for (int cycle = 0; cycle < 30; ++cycle) {
    gw.authmon_poll_cycle();
    h_.clock().advance(std::chrono::seconds(2));
  }
  EXPECT_GT(flaky.failures(), 0);
  for (const auto& mac : macs) {
    EXPECT_EQ(gw.client(mac)->state, ClientState::kAuthorized) << mac;
  }
  EXPECT_NE(gw.client("02:00:00:00:02:00")->state, ClientState::kAuthorized);
  // Every authorized client has an authorized server session.
  auto data = h_.data();
  for (const auto& c : gw.clients()) {
    if (c.state != ClientState::kAuthorized) continue;
    EXPECT_TRUE(std::ranges::any_of(data.sessions, [&](const auto& s) {
      return s.rhid == c.rhid && s.state == wawa::SessionState::kAuthorized;
    }));
  }
}

TEST_F(GatewayTest, BootClearsAndResetsClients) {
  const std::string mac = "02:00:00:00:00:09";
  std::string rhid = attach_and_login(*gw_, *bob_, mac);
  gw_->authmon_poll_cycle();
  ASSERT_TRUE(gw_->boot());
  auto c = gw_->client(mac);
  EXPECT_EQ(c->state, ClientState::kCaptive);
  EXPECT_NE(c->rhid, rhid);
  for (const auto& s : h_.data().sessions) {
    if (s.rhid == rhid) {
      EXPECT_EQ(s.state, wawa::SessionState::kRevoked);
    }
  }
  EXPECT_TRUE(gw_->boot());
  EXPECT_TRUE(gw_->authmon_poll_cycle().listed.empty());
}

TEST_F(GatewayTest, BootRetriesThenGivesUp) {
  int calls = 0;
  http::Handler server = h_.service().handler();
  http::Handler recovering = [&](const http::Request& r) {
    if (++calls <= 2) return http::Response{0, {}, "down"};
    return server(r);
  };
  GatewaySim gw(gateway_config(h_, "lobby"), recovering, h_.clock(), h_.random(),
                &h_.events());
  EXPECT_TRUE(gw.boot());
  EXPECT_EQ(calls, 3);

  auto config = gateway_config(h_, "lobby");
  config.boot_attempts = 3;
  int dead_calls = 0;
  GatewaySim dead(config, [&](const http::Request&) {
    ++dead_calls;
    return http::Response{0, {}, "down"};
  }, h_.clock(), h_.random());
  EXPECT_EQ(dead.boot().code(), Errc::kTransportError);
  EXPECT_EQ(dead_calls, 3);
}

TEST_F(GatewayTest, TwoGatewaysShareOneServer) {
  GatewaySim pool(gateway_config(h_, "pool"), h_.service().handler(), h_.clock(),
                  h_.random());
  std::string at_lobby = attach_and_login(*gw_, *bob_, "02:00:00:00:00:0a");
  std::string at_pool = attach_and_login(pool, *bob_, "02:00:00:00:00:0a");
  EXPECT_NE(at_lobby, at_pool);
  EXPECT_EQ(gw_->authmon_poll_cycle().listed, std::vector<std::string>{at_lobby});
  EXPECT_EQ(pool.authmon_poll_cycle().listed, std::vector<std::string>{at_pool});
  EXPECT_EQ(gw_->client("02:00:00:00:00:0a")->state, ClientState::kAuthorized);
  EXPECT_EQ(pool.client("02:00:00:00:00:0a")->state, ClientState::kAuthorized);

  auto sessions = h_.data().sessions;
  std::set<std::string> hids;
  for (const auto& s : sessions) {
    if (!s.hid.empty()) {
      EXPECT_EQ(s.state, wawa::SessionState::kAuthorized);
      hids.insert(s.hid);
    }
  }
  EXPECT_EQ(hids.size(), 2u);

  // Rebooting one gateway leaves the other's clients alone.
  ASSERT_TRUE(pool.boot());
  EXPECT_TRUE(gw_->authmon_poll_cycle().deauthorized.empty());
  EXPECT_EQ(gw_->client("02:00:00:00:00:0a")->state, ClientState::kAuthorized);
}

TEST_F(GatewayTest, CaptiveApiFacade) {
  auto api = gw_->captive_api();
  http::Request req;
  req.path = gateway::kCaptiveApiPath;
  req.remote_addr = "192.168.4.20";
  EXPECT_EQ(api(req).status, 404);
  attach_and_login(*gw_, *bob_, "02:00:00:00:00:0b");
  auto before = api(req);
  EXPECT_EQ(before.status, 200);
  EXPECT_EQ(before.content_type(), gateway::kCaptiveJson);
  EXPECT_EQ(json::parse(before.body)["captive"], true);
  gw_->authmon_poll_cycle();
  auto after = json::parse(api(req).body);
  EXPECT_EQ(after["captive"], false);
  EXPECT_EQ(after["seconds-remaining"], 3600);
}

TEST(GatewayConfigTest, Validation) {
  GatewayConfig c;
  c.fas.fas_key = Bytes(32, 1);
  c.fas.fas_fqdn = "x.example";
  EXPECT_TRUE(c.validate());
  c.poll_interval = Duration(0);
  EXPECT_EQ(c.validate().code(), Errc::kConfigError);
  c.poll_interval = std::chrono::seconds(2);
  c.fas.fas_key.pop_back();
  auto s = c.validate();
  ASSERT_FALSE(s);
  EXPECT_NE(s.error().detail.find("31"), std::string::npos);
}

}  // namespace
}  // namespace fido2cap::testing
