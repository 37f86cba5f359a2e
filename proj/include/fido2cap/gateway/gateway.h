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

#ifndef FIDO2CAP_GATEWAY_GATEWAY_H_
#define FIDO2CAP_GATEWAY_GATEWAY_H_

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fido2cap/common/clock.h"
#include "fido2cap/common/event_log.h"
#include "fido2cap/common/random.h"
#include "fido2cap/fas/authmon.h"
#include "fido2cap/fas/fas.h"
#include "fido2cap/http/http.h"

namespace fido2cap::gateway {

inline constexpr char kCaptiveApiPath[] = "/captive-portal/api";
inline constexpr char kCaptiveJson[] = "application/captive+json";

struct GatewayConfig {
  std::string gateway_name = "gateway";
  fas::FasSharedConfig fas;
  // The WAWA server's address; always reachable from captive clients.
  std::string fas_address;
  Duration poll_interval = std::chrono::seconds(2);
  // Send gatewayname with every Authmon request so several gateways can
  // share one server.
  bool scoped_authmon = true;
  std::optional<std::string> authmon_secret;
  fas::BlobProfile blob_profile = fas::BlobProfile::kAuthenticated;
  int boot_attempts = 5;

  Status validate() const;
};

enum class ClientState { kCaptive, kPortalServed, kAuthorized, kExpired };
std::string_view to_string(ClientState state);

struct ClientRecord {
  std::string mac;
  std::string ip;
  std::string hid;
  std::string rhid;
  ClientState state = ClientState::kCaptive;
  std::string portal_url;
  Timestamp attached_at;
  std::optional<Timestamp> authorized_at;
  std::optional<Timestamp> expires_at;
  // A confirmation whose reply was lost; retried every cycle until answered.
  bool confirm_pending = false;
};

struct CaptivityStatus {
  bool captive = true;
  std::optional<std::string> user_portal_url;
  std::optional<int64_t> seconds_remaining;

  // The captive-portal API document.
  nlohmann::json to_json() const;
};

struct EnforcementDecision {
  bool allow = false;
  std::optional<std::string> redirect;
};

struct PollResult {
  std::vector<std::string> listed;
  std::vector<std::string> confirmed;    // newly authorized this cycle
  std::vector<std::string> deauthorized; // macs sent back to captivity
  std::vector<std::string> unmatched;    // listed rhids with no client here
  std::optional<Error> error;            // transport failure; cycle skipped
};

// Simulated captive-portal gateway: enforcement, provisioning of the portal
// URL, and the Authmon polling client. All operations are thread safe.
class GatewaySim {
 public:
  // `authmon` carries form-encoded Authmon requests to the server; a reply
  // with status 0 is treated as a network failure.
  GatewaySim(GatewayConfig config, http::Handler authmon, const Clock& clock,
             RandomSource& random, EventSink* events = nullptr);

  // New attachment: fresh hid, state captive. Re-attaching a known MAC
  // starts over with a new hid.
  ClientRecord client_attach(const std::string& mac, const std::string& ip);
  void client_detach(const std::string& mac);

  // Errors: kUnknownClient.
  Result<CaptivityStatus> captivity_status(const std::string& mac);
  Result<EnforcementDecision> enforcement_check(const std::string& mac,
                                                const std::string& destination);

  // One Authmon round: view, confirm each match, then re-confirm every
  // authorized client so server-side logout and expiry take effect.
  PollResult authmon_poll_cycle();

  // Resets all clients to captive and sends clear, retrying up to
  // boot_attempts times. Errors: kTransportError after the last attempt.
  Status boot();

  // Authorized clients past expires_at become expired. Returns their MACs.
  std::vector<std::string> expiry_tick();

  std::optional<ClientRecord> client(const std::string& mac) const;
  std::optional<ClientRecord> client_by_ip(const std::string& ip) const;
  std::vector<ClientRecord> clients() const;
  const GatewayConfig& config() const { return config_; }

  // Loopback facade serving the captivity document at kCaptiveApiPath for
  // the client whose IP matches the request's source address.
  http::Handler captive_api();

 private:
  Result<std::string> authmon_call(const fas::AuthmonMessage& message);
  std::optional<std::string> scope() const;
  void mint_locked(ClientRecord& c);
  // Portal URL for the client's current attachment, re-minting the hid if a
  // previous authorization has ended.
  std::string portal_locked(ClientRecord& c);
  void deauthorize_locked(ClientRecord& c, std::string_view reason);

  GatewayConfig config_;
  http::Handler authmon_;
  const Clock& clock_;
  RandomSource& random_;
  EventEmitter emit_;

  mutable std::mutex mu_;
  std::map<std::string, ClientRecord> clients_;  // by MAC
};

// Wraps a transport so that a fraction of calls fail. `lose_reply` decides
// whether a failure happens before delivery or after the server acted.
class FlakyTransport {
 public:
  FlakyTransport(http::Handler inner, RandomSource& random,
                 double failure_rate, bool lose_reply = false)
      : inner_(std::move(inner)), random_(random),
        failure_rate_(failure_rate), lose_reply_(lose_reply) {}

  http::Response operator()(const http::Request& request);
  // Fails every call while set, regardless of the rate.
  void set_down(bool down) { down_ = down; }
  int failures() const { return failures_; }

 private:
  http::Handler inner_;
  RandomSource& random_;
  double failure_rate_;
  bool lose_reply_;
  bool down_ = false;
  int failures_ = 0;
};

}  // namespace fido2cap::gateway

#endif  // FIDO2CAP_GATEWAY_GATEWAY_H_
