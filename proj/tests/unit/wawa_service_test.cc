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

#include "fido2cap/wawa/service.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fido2cap/fas/authmon.h"
#include "fido2cap/webauthn/wire.h"
#include "sha256_oracle.h"
#include "wawa_fixture.h"

namespace fido2cap::testing {
namespace {

using nlohmann::json;
using wawa::SessionState;

std::vector<wawa::SessionRecord> sessions_with_rhid(const wawa::StoreData& d) {
  std::vector<wawa::SessionRecord> out;
  for (const auto& s : d.sessions) {
    if (!s.rhid.empty()) out.push_back(s);
  }
  return out;
}

// Registers `name` through an admin-issued token and returns the guest.
std::unique_ptr<Guest> enrolled(WawaHarness& h, Guest& admin,
                                const std::string& name,
                                const std::string& addr = "192.168.4.20") {
  auto token = admin.agent.call("POST", "/api/admin/regtoken", {{"max_uses", 1}});
  if (!token) return nullptr;
  auto g = h.guest(addr);
  if (!g->agent.enroll(name, (*token)["token"].get<std::string>(), "required")) {
    return nullptr;
  }
  return g;
}

TEST(WawaPortal, ServesContextForValidBlob) {
  WawaHarness h;
  auto g = h.guest();
  auto ctx = g->agent.open_portal("https://wifi.hotel.example/portal?fas=" +
                                  fas::form_encode(h.blob(hid_of(1))));
  ASSERT_TRUE(ctx) << ctx.error().to_string();
  EXPECT_EQ((*ctx)["mode"], "login");
  EXPECT_EQ((*ctx)["gateway_name"], "lobby");
  EXPECT_EQ((*ctx)["client_ip"], "192.168.4.*");
  EXPECT_FALSE((*ctx)["fas_context"].get<std::string>().empty());
}

TEST(WawaPortal, DegradesOnBadOrMissingBlob) {
  WawaHarness h;
  auto g = h.guest();
  for (std::string target : {"/portal", "/portal?fas=AAAA", "/portal?fas=%21%21"}) {
    auto r = g->agent.send("GET", target);
    EXPECT_EQ(r.status, 200) << target;
    auto ctx = client::page_context(r.body);
    ASSERT_TRUE(ctx);
    EXPECT_EQ((*ctx)["mode"], "degraded") << target;
    EXPECT_NE(r.body.find("cannot identify your network session"), std::string::npos);
  }
  EXPECT_EQ(h.events().events_named("wawa", "portal_degraded").size(), 3u);
}

TEST(WawaPortal, ContextCannotBreakOutOfScriptTag) {
  WawaHarness h;
  auto g = h.guest();
  auto r = g->agent.send("GET", "/portal?token=%3C%2Fscript%3E%3Cb%3E");
  EXPECT_EQ(r.body.find("</script><b>"), std::string::npos);
  auto ctx = client::page_context(r.body);
  ASSERT_TRUE(ctx);
  EXPECT_EQ((*ctx)["registration_token"], "</script><b>");
  EXPECT_EQ((*ctx)["token_valid"], false);
}

TEST(WawaAuth, PortalLoginCreatesAuthenticatedSession) {
  WawaHarness h;
  auto admin = h.admin();
  ASSERT_TRUE(admin);
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob);

  auto reply = bob->agent.login("bob", h.blob(hid_of(42), "lobby"));
  ASSERT_TRUE(reply) << reply.error().to_string();
  EXPECT_EQ((*reply)["username"], "bob");
  EXPECT_EQ((*reply)["state"], "authenticated");
  EXPECT_EQ((*reply)["expires_in"], 3600);

  auto sessions = sessions_with_rhid(h.data());
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].hid, hid_of(42));
  EXPECT_EQ(sessions[0].rhid, oracle_rhid(hid_of(42), h.service().config().fas.fas_key));
  EXPECT_EQ(sessions[0].gateway_name, "lobby");
  EXPECT_EQ(sessions[0].expires_at - sessions[0].created_at, std::chrono::hours(1));
  EXPECT_EQ(bob->agent.cookie(wawa::kSessionCookie), sessions[0].session_id);
}

TEST(WawaAuth, CookieCarriesSecurityAttributes) {
  WawaHarness h;
  auto admin = h.admin();
  ASSERT_TRUE(admin);
  auto bob = enrolled(h, *admin, "bob");
  auto options = bob->agent.call("POST", "/api/auth/options",
                                 {{"username", "bob"}, {"fas_context", h.blob(hid_of(1))}});
  ASSERT_TRUE(options);
  auto assertion = bob->platform.get(*webauthn::request_options_from_json(*options));
  ASSERT_TRUE(assertion);
  auto r = bob->agent.send("POST", "/api/auth/verify",
                           json{{"assertion", webauthn::to_json(*assertion)}}.dump());
  ASSERT_EQ(r.status, 200);
  const std::string& c = r.headers["Set-Cookie"];
  EXPECT_NE(c.find("HttpOnly"), std::string::npos);
  EXPECT_NE(c.find("Secure"), std::string::npos);
  EXPECT_NE(c.find("SameSite=Strict"), std::string::npos);
  EXPECT_NE(c.find("Max-Age=3600"), std::string::npos);
}

TEST(WawaAuth, OptionsRequireValidFasContext) {
  WawaHarness h;
  auto g = h.guest();
  auto none = g->agent.call("POST", "/api/auth/options", {{"username", "bob"}});
  ASSERT_FALSE(none);
  EXPECT_EQ(none.code(), Errc::kMissingFasContext);
  auto bad = g->agent.call("POST", "/api/auth/options",
                           {{"username", "bob"}, {"fas_context", "garbage"}});
  ASSERT_FALSE(bad);
  EXPECT_EQ(bad.code(), Errc::kMissingFasContext);
}

TEST(WawaAuth, UnknownUserGetsDecoyAndNoSession) {
  WawaHarness h;
  auto admin = h.admin();
  ASSERT_TRUE(admin);
  auto g = h.guest();
  auto options = g->agent.call("POST", "/api/auth/options",
                               {{"username", "mallory"}, {"fas_context", h.blob(hid_of(3))}});
  ASSERT_TRUE(options);
  auto allow = (*options)["allowCredentials"];
  EXPECT_GE(allow.size(), 1u);
  EXPECT_LE(allow.size(), 2u);
  auto attempt = g->agent.login("mallory", h.blob(hid_of(3)));
  EXPECT_FALSE(attempt);
  EXPECT_TRUE(sessions_with_rhid(h.data()).empty());
}

TEST(WawaAuth, FailedCeremoniesCreateNoSession) {
  WawaHarness h;
  auto admin = h.admin();
  ASSERT_TRUE(admin);
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob);

  // Wrong origin.
  bob->platform.set_origin("https://evil.example");
  auto phished = bob->agent.login("bob", h.blob(hid_of(5)));
  ASSERT_FALSE(phished);
  EXPECT_EQ(phished.code(), Errc::kOriginMismatch);
  bob->platform.set_origin(kOrigin);

  // Replay of a consumed assertion.
  auto options = bob->agent.call("POST", "/api/auth/options",
                                 {{"username", "bob"}, {"fas_context", h.blob(hid_of(6))}});
  auto assertion = bob->platform.get(*webauthn::request_options_from_json(*options));
  json body = {{"assertion", webauthn::to_json(*assertion)}};
  ASSERT_TRUE(bob->agent.call("POST", "/api/auth/verify", body));
  auto replay = bob->agent.call("POST", "/api/auth/verify", body);
  ASSERT_FALSE(replay);
  EXPECT_EQ(replay.code(), Errc::kChallengeUnknownOrExpired);

  // Expired challenge.
  options = bob->agent.call("POST", "/api/auth/options",
                            {{"username", "bob"}, {"fas_context", h.blob(hid_of(7))}});
  assertion = bob->platform.get(*webauthn::request_options_from_json(*options));
  h.clock().advance(std::chrono::seconds(121));
  auto late = bob->agent.call("POST", "/api/auth/verify",
                              {{"assertion", webauthn::to_json(*assertion)}});
  ASSERT_FALSE(late);
  EXPECT_EQ(late.code(), Errc::kChallengeUnknownOrExpired);

  auto sessions = sessions_with_rhid(h.data());
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].hid, hid_of(6));
  EXPECT_EQ(h.events().events_named("wawa", "auth_failed").size(), 3u);
}

TEST(WawaAuth, MalformedBodiesAreRejected) {
  WawaHarness h;
  auto g = h.guest();
  auto r = g->agent.send("POST", "/api/auth/verify", "{not json");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json::parse(r.body)["error"], "MalformedBody");
  r = g->agent.send("POST", "/api/auth/verify", R"({"assertion": {"id": 5}})");
  EXPECT_EQ(r.status, 400);
  r = g->agent.send("GET", "/nowhere");
  EXPECT_EQ(r.status, 404);
}

TEST(WawaSession, LogoutRevokesAndClearsCookie) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob->agent.login("bob", h.blob(hid_of(9))));
  auto me = bob->agent.call("GET", "/api/session");
  ASSERT_TRUE(me);
  EXPECT_EQ((*me)["username"], "bob");

  ASSERT_TRUE(bob->agent.logout());
  EXPECT_FALSE(bob->agent.cookie(wawa::kSessionCookie));
  auto sessions = sessions_with_rhid(h.data());
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].state, SessionState::kRevoked);
  auto after = bob->agent.call("GET", "/api/session");
  ASSERT_FALSE(after);
  EXPECT_EQ(after.code(), Errc::kNoSession);
  EXPECT_EQ(bob->agent.logout().code(), Errc::kNoSession);
}

// Registration and administration.

TEST(WawaAdmin, BootstrapOnlyOnce) {
  WawaHarness h;
  auto first = h.service().bootstrap_admin("Alice");
  ASSERT_TRUE(first);
  EXPECT_EQ(first->bound_username, "alice");
  EXPECT_TRUE(first->grants_admin);
  EXPECT_EQ(first->qr_payload,
            "https://wifi.hotel.example:443/portal?token=" + first->token);
  EXPECT_EQ(h.service().bootstrap_admin("carol").code(), Errc::kAdminAlreadyExists);

  auto g = h.guest();
  auto wrong = g->agent.enroll("carol", first->token);
  ASSERT_FALSE(wrong);
  EXPECT_EQ(wrong.code(), Errc::kForbidden);
  auto ok = g->agent.enroll("alice", first->token);
  ASSERT_TRUE(ok) << ok.error().to_string();
  EXPECT_EQ((*ok)["is_admin"], true);
  EXPECT_EQ(h.service().bootstrap_admin("carol").code(), Errc::kAdminAlreadyExists);
}

TEST(WawaAdmin, BootstrapTokenExpires) {
  WawaHarness h;
  auto first = h.service().bootstrap_admin("alice");
  ASSERT_TRUE(first);
  h.clock().advance(std::chrono::hours(24));
  auto g = h.guest();
  EXPECT_EQ(g->agent.enroll("alice", first->token).code(),
            Errc::kTokenExpiredOrExhausted);
  EXPECT_TRUE(h.service().bootstrap_admin("alice"));
}

TEST(WawaAdmin, RbacSweep) {
  WawaHarness h;
  auto admin = h.admin();
  ASSERT_TRUE(admin);
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob);
  ASSERT_TRUE(bob->agent.login("bob", ""));
  auto anon = h.guest();

  struct Route {
    std::string method;
    std::string path;
    json body;
  };
  std::vector<Route> routes = {
      {"GET", "/api/admin/users", json::object()},
      {"POST", "/api/admin/regtoken", {{"max_uses", 1}}},
      {"POST", "/api/admin/register/options", {{"username", "zed"}}},
      // Last: it promotes bob.
      {"POST", "/api/admin/users/bob/admin", {{"is_admin", true}}},
  };
  for (Guest* caller : {bob.get(), anon.get()}) {
    auto r = caller->agent.send("POST", "/api/admin/register/verify",
                                R"({"attestation": {}})");
    EXPECT_EQ(r.status, 403);
    r = caller->agent.send("POST", "/api/admin/register/options", "{broken");
    EXPECT_EQ(r.status, 403);
  }
  for (const auto& route : routes) {
    for (Guest* caller : {bob.get(), anon.get()}) {
      auto r = caller->agent.send(route.method, route.path,
                                  route.method == "GET" ? "" : route.body.dump());
      EXPECT_EQ(r.status, 403) << route.method << " " << route.path;
      EXPECT_EQ(json::parse(r.body)["error"], "Forbidden");
    }
    auto ok = admin->agent.call(route.method, route.path, route.body);
    EXPECT_TRUE(ok) << route.path << ": " << ok.error().to_string();
  }
  EXPECT_TRUE(h.data().users.at("bob").is_admin);
}

TEST(WawaAdmin, TokenMaxUsesAndExpiry) {
  WawaHarness h;
  auto admin = h.admin();
  auto token = admin->agent.call("POST", "/api/admin/regtoken",
                                 {{"max_uses", 2}, {"ttl", 600}});
  ASSERT_TRUE(token);
  std::string t = (*token)["token"];
  EXPECT_EQ((*token)["qr_payload"],
            "https://wifi.hotel.example:443/portal?token=" + t);

  auto a = h.guest();
  auto b = h.guest();
  auto c = h.guest();
  EXPECT_TRUE(a->agent.enroll("guest1", t));
  EXPECT_TRUE(b->agent.enroll("guest2", t));
  auto third = c->agent.enroll("guest3", t);
  ASSERT_FALSE(third);
  EXPECT_EQ(third.code(), Errc::kTokenExpiredOrExhausted);
  EXPECT_EQ(h.data().tokens.at(t).uses, 2);
  EXPECT_FALSE(h.data().users.at("guest1").is_admin);

  auto short_lived = admin->agent.call("POST", "/api/admin/regtoken", {{"ttl", 10}});
  h.clock().advance(std::chrono::seconds(10));
  EXPECT_EQ(c->agent.enroll("guest3", (*short_lived)["token"]).code(),
            Errc::kTokenExpiredOrExhausted);
  EXPECT_EQ(c->agent.enroll("guest3", "0123456789abcdef").code(), Errc::kForbidden);
}

TEST(WawaAdmin, TokenUseIsCountedAtVerify) {
  WawaHarness h;
  auto admin = h.admin();
  auto token = admin->agent.call("POST", "/api/admin/regtoken", {{"max_uses", 1}});
  std::string t = (*token)["token"];
  // Two ceremonies started on a single-use token: only one may finish.
  auto a = h.guest();
  auto b = h.guest();
  auto oa = a->agent.call("POST", "/api/admin/register/options", {{"username", "x1"}, {"token", t}});
  auto ob = b->agent.call("POST", "/api/admin/register/options", {{"username", "x2"}, {"token", t}});
  ASSERT_TRUE(oa);
  ASSERT_TRUE(ob);
  auto ra = a->platform.create(*webauthn::creation_options_from_json(*oa));
  auto rb = b->platform.create(*webauthn::creation_options_from_json(*ob));
  auto va = a->agent.call("POST", "/api/admin/register/verify",
                          {{"attestation", webauthn::to_json(*ra)}, {"token", t}});
  auto vb = b->agent.call("POST", "/api/admin/register/verify",
                          {{"attestation", webauthn::to_json(*rb)}, {"token", t}});
  EXPECT_TRUE(va);
  ASSERT_FALSE(vb);
  EXPECT_EQ(vb.code(), Errc::kTokenExpiredOrExhausted);
  EXPECT_FALSE(h.data().users.contains("x2"));
}

TEST(WawaAdmin, TokenCannotClaimExistingUsername) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  auto token = admin->agent.call("POST", "/api/admin/regtoken", json::object());
  auto thief = h.guest();
  auto r = thief->agent.enroll("BOB", (*token)["token"]);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.code(), Errc::kUsernameTaken);
  EXPECT_EQ(h.data().users.at("bob").credentials.size(), 1u);
}

TEST(WawaAdmin, AdminAddsSecondKeyToExistingUser) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  // The admin enrolls a backup key for bob at the desk.
  authenticator::SoftAuthenticator backup(h.random());
  admin->platform.set_origin(kOrigin);
  authenticator::PlatformClient desk(backup, kOrigin);
  client::UserAgent at_desk(h.service().handler(), desk);
  at_desk.set_cookie(wawa::kSessionCookie, *admin->agent.cookie(wawa::kSessionCookie));
  auto r = at_desk.enroll("bob", "", "required", "backup");
  ASSERT_TRUE(r) << r.error().to_string();
  EXPECT_EQ((*r)["credential_count"], 2);
  EXPECT_EQ(h.data().users.at("bob").credentials[1].label, "backup");

  // Enrolling the same key again is blocked by the exclude list.
  auto again = at_desk.enroll("bob", "");
  ASSERT_FALSE(again);
  EXPECT_EQ(again.code(), Errc::kExcludedCredentialExists);
}

TEST(WawaAdmin, IssueTokenValidatesArguments) {
  WawaHarness h;
  auto admin = h.admin();
  for (json bad : {json{{"ttl", 0}}, json{{"ttl", -5}}, json{{"max_uses", 0}},
                   json{{"ttl", "soon"}}}) {
    auto r = admin->agent.call("POST", "/api/admin/regtoken", bad);
    ASSERT_FALSE(r) << bad.dump();
    EXPECT_EQ(r.code(), Errc::kInvalidArgument);
  }
}

TEST(WawaAdmin, LastAdminCannotBeDemoted) {
  WawaHarness h;
  auto admin = h.admin();
  auto r = admin->agent.call("POST", "/api/admin/users/alice/admin", {{"is_admin", false}});
  ASSERT_FALSE(r);
  EXPECT_EQ(r.code(), Errc::kLastAdminProtection);
  EXPECT_EQ(admin->agent.call("POST", "/api/admin/users/ghost/admin",
                              {{"is_admin", true}}).code(),
            Errc::kUnknownUser);
  EXPECT_EQ(admin->agent.call("POST", "/api/admin/users/alice/admin",
                              {{"is_admin", "no"}}).code(),
            Errc::kMalformedBody);
}

TEST(WawaAdmin, SelfDemotionRotatesSession) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(admin->agent.call("POST", "/api/admin/users/bob/admin", {{"is_admin", true}}));
  std::string before = *admin->agent.cookie(wawa::kSessionCookie);
  auto r = admin->agent.call("POST", "/api/admin/users/alice/admin", {{"is_admin", false}});
  ASSERT_TRUE(r) << r.error().to_string();
  std::string after = *admin->agent.cookie(wawa::kSessionCookie);
  EXPECT_NE(before, after);
  auto me = admin->agent.call("GET", "/api/session");
  ASSERT_TRUE(me);
  EXPECT_EQ((*me)["is_admin"], false);
  EXPECT_EQ(admin->agent.call("GET", "/api/admin/users").code(), Errc::kForbidden);
  // The old identifier is dead.
  admin->agent.set_cookie(wawa::kSessionCookie, before);
  EXPECT_EQ(admin->agent.call("GET", "/api/session").code(), Errc::kNoSession);
}

TEST(WawaAdmin, UserListingShowsSessionsWithoutIds) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob->agent.login("bob", h.blob(hid_of(11))));
  auto users = admin->agent.call("GET", "/api/admin/users");
  ASSERT_TRUE(users);
  json bob_entry;
  for (const auto& u : (*users)["users"]) {
    if (u["username"] == "bob") bob_entry = u;
  }
  ASSERT_FALSE(bob_entry.is_null());
  EXPECT_EQ(bob_entry["credentials"].size(), 1u);
  EXPECT_EQ(bob_entry["credentials"][0]["sign_count"], 1);
  ASSERT_EQ(bob_entry["active_sessions"].size(), 1u);
  EXPECT_FALSE(bob_entry["active_sessions"][0].contains("session_id"));
  std::string sid = *bob->agent.cookie(wawa::kSessionCookie);
  EXPECT_EQ(users->dump().find(sid), std::string::npos);
}

// The gateway's polling endpoint.

class WawaAuthmon : public ::testing::Test {
 protected:
  void SetUp() override {
    admin_ = h_.admin();
    ASSERT_TRUE(admin_);
    bob_ = enrolled(h_, *admin_, "bob");
    ASSERT_TRUE(bob_);
  }

  std::string login_bob(int hid, const std::string& gateway = "lobby") {
    EXPECT_TRUE(bob_->agent.login("bob", h_.blob(hid_of(hid), gateway)));
    return oracle_rhid(hid_of(hid), h_.service().config().fas.fas_key);
  }

  std::string post(const fas::AuthmonMessage& m) {
    auto r = h_.authmon(fas::serialize_authmon_request(m));
    EXPECT_EQ(r.status, 200) << r.body;
    return r.body;
  }

  WawaHarness h_;
  std::unique_ptr<Guest> admin_;
  std::unique_ptr<Guest> bob_;
};

TEST_F(WawaAuthmon, ViewConfirmDialogue) {
  EXPECT_EQ(post(fas::view_all()), "*");
  std::string rhid = login_bob(1);
  EXPECT_EQ(post(fas::view_all()), "* " + rhid);
  EXPECT_EQ(post(fas::confirm(rhid)), "ack");
  EXPECT_EQ(sessions_with_rhid(h_.data())[0].state, SessionState::kAuthorized);
  EXPECT_EQ(post(fas::view_all()), "*");
  // Keepalive confirmations keep acknowledging.
  EXPECT_EQ(post(fas::confirm(rhid)), "ack");
  EXPECT_EQ(post(fas::confirm(std::string(64, 'f'))), "nak");
}

TEST_F(WawaAuthmon, ListAuthorizesAtomically) {
  std::string r1 = login_bob(1);
  std::string r2 = login_bob(2);
  EXPECT_EQ(post(fas::list()), "* " + r1 + "\n* " + r2);
  for (const auto& s : sessions_with_rhid(h_.data())) {
    EXPECT_EQ(s.state, SessionState::kAuthorized);
  }
  EXPECT_EQ(post(fas::list()), "*");
}

TEST_F(WawaAuthmon, ClearRevokesLiveSessions) {
  std::string r1 = login_bob(1);
  post(fas::confirm(r1));
  login_bob(2);
  EXPECT_EQ(post(fas::clear()), "ack");
  for (const auto& s : sessions_with_rhid(h_.data())) {
    EXPECT_EQ(s.state, SessionState::kRevoked);
  }
  EXPECT_EQ(post(fas::confirm(r1)), "nak");
  EXPECT_EQ(post(fas::view_all()), "*");
}

TEST_F(WawaAuthmon, GatewayScoping) {
  std::string lobby = login_bob(1, "lobby");
  std::string pool = login_bob(2, "pool");
  EXPECT_EQ(post(fas::view_all("lobby")), "* " + lobby);
  EXPECT_EQ(post(fas::view_all("pool")), "* " + pool);
  EXPECT_EQ(post(fas::confirm(pool, "lobby")), "nak");
  EXPECT_EQ(post(fas::clear("lobby")), "ack");
  EXPECT_EQ(post(fas::confirm(pool, "pool")), "ack");
  auto sessions = sessions_with_rhid(h_.data());
  EXPECT_EQ(sessions[0].state, SessionState::kRevoked);
  EXPECT_EQ(sessions[1].state, SessionState::kAuthorized);
}

TEST_F(WawaAuthmon, LogoutAndExpiryTurnConfirmationsIntoNak) {
  std::string r1 = login_bob(1);
  EXPECT_EQ(post(fas::confirm(r1)), "ack");
  ASSERT_TRUE(bob_->agent.logout());
  EXPECT_EQ(post(fas::confirm(r1)), "nak");

  std::string r2 = login_bob(2);
  EXPECT_EQ(post(fas::confirm(r2)), "ack");
  h_.clock().advance(std::chrono::seconds(3599));
  EXPECT_EQ(post(fas::confirm(r2)), "ack");
  h_.clock().advance(std::chrono::seconds(1));
  EXPECT_EQ(post(fas::confirm(r2)), "nak");
  EXPECT_EQ(sessions_with_rhid(h_.data())[1].state, SessionState::kExpired);
  size_t expired_r2 = 0;
  for (const auto& e : h_.events().events_named("wawa", "session_expired")) {
    if (*e.field("rhid") == r2) ++expired_r2;
  }
  EXPECT_EQ(expired_r2, 1u);
}

TEST_F(WawaAuthmon, MalformedRequestsGet400) {
  for (std::string body : {"", "auth_get=dance", "payload=*",
                           "auth_get=view&payload=*+zz",
                           "auth_get=view&auth_get=list"}) {
    auto r = h_.authmon(body);
    EXPECT_EQ(r.status, 400) << body;
  }
}

TEST_F(WawaAuthmon, RateLimitedPerSource) {
  int limited = 0;
  for (int i = 0; i < 150; ++i) {
    if (h_.authmon("auth_get=view&payload=*", "10.9.9.9").status == 429) ++limited;
  }
  EXPECT_EQ(limited, 50);
  EXPECT_EQ(h_.authmon("auth_get=view&payload=*", "10.9.9.8").status, 200);
  h_.clock().advance(std::chrono::seconds(1));
  EXPECT_EQ(h_.authmon("auth_get=view&payload=*", "10.9.9.9").status, 200);
}

TEST(WawaAuthmonSecret, HeaderIsEnforcedWhenConfigured) {
  auto config = test_config();
  config.authmon_secret = "s3cret";
  WawaHarness h(config);
  EXPECT_EQ(h.authmon("auth_get=view&payload=*").status, 403);
  http::Request r;
  r.method = "POST";
  r.path = "/fas";
  r.body = "auth_get=view&payload=*";
  r.headers[wawa::kAuthmonSecretHeader] = "s3cret";
  EXPECT_EQ(h.service().handle(r).status, 200);
  r.headers[wawa::kAuthmonSecretHeader] = "s3creT";
  EXPECT_EQ(h.service().handle(r).status, 403);
}

// Lifecycle and persistence.

TEST(WawaLifecycle, SweepExpiresThenPurgesAfterRetention) {
  WawaHarness h;
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob->agent.login("bob", h.blob(hid_of(1))));
  EXPECT_EQ(h.service().session_expiry_sweep(), 0u);
  h.clock().advance(std::chrono::hours(1));
  EXPECT_EQ(h.service().session_expiry_sweep(), 2u);  // bob's and alice's
  EXPECT_EQ(h.data().sessions.size(), 2u);
  h.clock().advance(std::chrono::hours(24));
  h.service().session_expiry_sweep();
  EXPECT_TRUE(h.data().sessions.empty());
  EXPECT_EQ(h.data().users.size(), 2u);
}

TEST(WawaLifecycle, StorePersistsAcrossRestart) {
  auto path = std::filesystem::temp_directory_path() /
              ("fido2cap-store-" + std::to_string(::getpid()) + ".json");
  std::filesystem::remove(path);
  auto first = wawa::MemoryStore::open(path.string());
  ASSERT_TRUE(first);
  WawaHarness h(test_config(), first->get());
  auto admin = h.admin();
  auto bob = enrolled(h, *admin, "bob");
  ASSERT_TRUE(bob->agent.login("bob", h.blob(hid_of(1))));
  auto before = h.data();

  auto reopened = wawa::MemoryStore::open(path.string());
  ASSERT_TRUE(reopened) << reopened.error().to_string();
  auto after = (*reopened)->snapshot();
  EXPECT_EQ(wawa::to_json(after), wawa::to_json(before));
  EXPECT_EQ(after.users.at("bob").credentials[0].sign_count, 1u);

  // A new service over the reloaded store still knows bob and his counter.
  WawaHarness restarted(test_config(), reopened->get());
  client::UserAgent agent(restarted.service().handler(), bob->platform);
  auto again = agent.login("bob", restarted.blob(hid_of(2)));
  ASSERT_TRUE(again) << again.error().to_string();
  EXPECT_EQ((*reopened)->snapshot().users.at("bob").credentials[0].sign_count, 2u);
  std::filesystem::remove(path);
}

TEST(WawaLifecycle, CorruptStoreFileIsReported) {
  auto path = std::filesystem::temp_directory_path() /
              ("fido2cap-bad-" + std::to_string(::getpid()) + ".json");
  {
    std::ofstream(path) << "{\"users\": 3}";
  }
  auto s = wawa::MemoryStore::open(path.string());
  ASSERT_FALSE(s);
  EXPECT_EQ(s.code(), Errc::kStorage);
  std::filesystem::remove(path);
}

TEST(WawaStatus, ErrorCodesMapToHttp) {
  EXPECT_EQ(wawa::http_status_for(Errc::kMalformedBody), 400);
  EXPECT_EQ(wawa::http_status_for(Errc::kBadSignature), 401);
  EXPECT_EQ(wawa::http_status_for(Errc::kNoSession), 401);
  EXPECT_EQ(wawa::http_status_for(Errc::kForbidden), 403);
  EXPECT_EQ(wawa::http_status_for(Errc::kUnknownUser), 404);
  EXPECT_EQ(wawa::http_status_for(Errc::kLastAdminProtection), 409);
  EXPECT_EQ(wawa::http_status_for(Errc::kTokenExpiredOrExhausted), 410);
  EXPECT_EQ(wawa::http_status_for(Errc::kRateLimited), 429);
  EXPECT_EQ(wawa::http_status_for(Errc::kStorage), 500);
}

}  // namespace
}  // namespace fido2cap::testing
