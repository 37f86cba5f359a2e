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

#include <algorithm>

#include "fido2cap/crypto/crypto.h"

namespace fido2cap::gateway {

namespace {

constexpr size_t kAttachNonceSize = 16;

bool is_ack(const Result<std::string>& reply) {
  return reply && *reply == fas::kAuthmonAck;
}

}  // namespace

Status GatewayConfig::validate() const {
  if (auto s = fas.validate(); !s) return s;
  if (poll_interval.count() <= 0) {
    return Error(Errc::kConfigError, "poll interval must be positive");
  }
  if (gateway_name.empty()) {
    return Error(Errc::kConfigError, "gateway name is empty");
  }
  if (boot_attempts < 1) {
    return Error(Errc::kConfigError, "boot attempts must be at least 1");
  }
  return {};
}

std::string_view to_string(ClientState state) {
  switch (state) {
    case ClientState::kCaptive: return "captive";
    case ClientState::kPortalServed: return "portal_served";
    case ClientState::kAuthorized: return "authorized";
    case ClientState::kExpired: return "expired";
  }
  return "captive";
}

nlohmann::json CaptivityStatus::to_json() const {
  nlohmann::json j = {{"captive", captive}};
  if (user_portal_url) j["user-portal-url"] = *user_portal_url;
  if (seconds_remaining) {
    j["seconds-remaining"] = *seconds_remaining;
    j["can-extend-session"] = false;
  }
  return j;
}

GatewaySim::GatewaySim(GatewayConfig config, http::Handler authmon,
                       const Clock& clock, RandomSource& random,
                       EventSink* events)
    : config_(std::move(config)),
      authmon_(std::move(authmon)),
      clock_(clock),
      random_(random),
      emit_("gateway:" + config_.gateway_name, clock, events) {}

std::optional<std::string> GatewaySim::scope() const {
  if (!config_.scoped_authmon) return std::nullopt;
  return config_.gateway_name;
}

void GatewaySim::mint_locked(ClientRecord& c) {
  Bytes material = to_bytes(c.mac);
  Bytes nonce = random_.bytes(kAttachNonceSize);
  material.insert(material.end(), nonce.begin(), nonce.end());
  auto digest = crypto::sha256(material);
  c.hid = hex_encode(digest);
  c.rhid = *fas::compute_rhid(c.hid, config_.fas.fas_key);
  c.state = ClientState::kCaptive;
  c.authorized_at.reset();
  c.expires_at.reset();
  c.confirm_pending = false;
  c.attached_at = clock_.now();

  fas::FasParams params;
  params.hid = c.hid;
  params.client_ip = c.ip;
  params.client_mac = c.mac;
  params.gateway_name = config_.gateway_name;
  params.original_url = "http://captive.invalid/";
  std::string blob =
      fas::encrypt_fas_blob(params, config_.fas, random_, config_.blob_profile);
  c.portal_url = "https://" + config_.fas.fas_fqdn + ":" +
                 std::to_string(config_.fas.fas_port) +
                 "/portal?fas=" + fas::form_encode(blob);
}

std::string GatewaySim::portal_locked(ClientRecord& c) {
  if (c.state == ClientState::kExpired) {
    mint_locked(c);
    emit_("hid_minted", {{"mac", c.mac}, {"hid", c.hid}});
  }
  if (c.state == ClientState::kCaptive) {
    c.state = ClientState::kPortalServed;
    emit_("portal_redirect", {{"mac", c.mac}, {"hid", c.hid}});
  }
  return c.portal_url;
}

void GatewaySim::deauthorize_locked(ClientRecord& c, std::string_view reason) {
  c.state = ClientState::kExpired;
  c.authorized_at.reset();
  c.expires_at.reset();
  c.confirm_pending = false;
  emit_("client_deauthorized",
        {{"mac", c.mac}, {"rhid", c.rhid}, {"reason", std::string(reason)}});
}

ClientRecord GatewaySim::client_attach(const std::string& mac,
                                       const std::string& ip) {
  std::lock_guard lock(mu_);
  ClientRecord& c = clients_[mac];
  c.mac = mac;
  c.ip = ip;
  mint_locked(c);
  emit_("client_attached", {{"mac", mac}, {"ip", ip}, {"hid", c.hid}});
  return c;
}

void GatewaySim::client_detach(const std::string& mac) {
  std::lock_guard lock(mu_);
  if (clients_.erase(mac) > 0) emit_("client_detached", {{"mac", mac}});
}

Result<CaptivityStatus> GatewaySim::captivity_status(const std::string& mac) {
  std::lock_guard lock(mu_);
  auto it = clients_.find(mac);
  if (it == clients_.end()) return Error(Errc::kUnknownClient, mac);
  ClientRecord& c = it->second;
  CaptivityStatus status;
  if (c.state == ClientState::kAuthorized) {
    status.captive = false;
    auto left = *c.expires_at - clock_.now();
    status.seconds_remaining = std::max<int64_t>(
        0, std::chrono::duration_cast<std::chrono::seconds>(left).count());
  } else {
    status.user_portal_url = portal_locked(c);
  }
  return status;
}

Result<EnforcementDecision> GatewaySim::enforcement_check(
    const std::string& mac, const std::string& destination) {
  std::lock_guard lock(mu_);
  auto it = clients_.find(mac);
  if (it == clients_.end()) return Error(Errc::kUnknownClient, mac);
  ClientRecord& c = it->second;
  if (c.state == ClientState::kAuthorized ||
      (!config_.fas_address.empty() && destination == config_.fas_address) ||
      destination == config_.fas.fas_fqdn) {
    return EnforcementDecision{true, std::nullopt};
  }
  return EnforcementDecision{false, portal_locked(c)};
}

Result<std::string> GatewaySim::authmon_call(const fas::AuthmonMessage& message) {
  http::Request req;
  req.method = "POST";
  req.path = "/fas";
  req.body = fas::serialize_authmon_request(message);
  req.headers["Content-Type"] = "application/x-www-form-urlencoded";
  if (config_.authmon_secret) {
    req.headers["X-Authmon-Secret"] = *config_.authmon_secret;
  }
  http::Response r = authmon_(req);
  if (r.status == 0) return Error(Errc::kTransportError, "no reply");
  if (r.status != 200) {
    return Error(Errc::kTransportError,
                 "HTTP " + std::to_string(r.status) + ": " + r.body);
  }
  return r.body;
}

PollResult GatewaySim::authmon_poll_cycle() {
  PollResult result;
  auto listing = authmon_call(fas::view_all(scope()));
  if (!listing) {
    result.error = listing.error();
    emit_("authmon_poll_failed", {{"error", listing.error().to_string()}});
    return result;
  }
  auto rhids = fas::parse_auth_list(*listing);
  if (!rhids) {
    result.error = rhids.error();
    emit_("authmon_poll_failed", {{"error", rhids.error().to_string()}});
    return result;
  }
  result.listed = *rhids;

  // Which rhids need a confirmation: freshly listed ones that belong to a
  // waiting client, plus earlier confirmations whose reply never arrived.
  std::vector<std::string> to_confirm;
  std::vector<std::string> keepalive;
  {
    std::lock_guard lock(mu_);
    for (const auto& rhid : result.listed) {
      bool matched = std::ranges::any_of(clients_, [&](const auto& kv) {
        const ClientRecord& c = kv.second;
        return c.state != ClientState::kAuthorized &&
               c.state != ClientState::kExpired &&
               crypto::constant_time_equal(to_bytes(c.rhid), to_bytes(rhid));
      });
      if (matched) {
        to_confirm.push_back(rhid);
      } else {
        result.unmatched.push_back(rhid);
        emit_("authmon_unmatched", {{"rhid", rhid}});
      }
    }
    for (const auto& [_, c] : clients_) {
      if (c.confirm_pending &&
          std::ranges::find(to_confirm, c.rhid) == to_confirm.end()) {
        to_confirm.push_back(c.rhid);
      }
      if (c.state == ClientState::kAuthorized) keepalive.push_back(c.rhid);
    }
  }

  for (const auto& rhid : to_confirm) {
    auto reply = authmon_call(fas::confirm(rhid, scope()));
    std::lock_guard lock(mu_);
    for (auto& [_, c] : clients_) {
      if (c.rhid != rhid || c.state == ClientState::kAuthorized ||
          c.state == ClientState::kExpired) {
        continue;
      }
      if (!reply) {
        c.confirm_pending = true;
        emit_("authmon_confirm_lost", {{"mac", c.mac}, {"rhid", rhid}});
        continue;
      }
      c.confirm_pending = false;
      if (!is_ack(reply)) {
        emit_("authmon_confirm_refused", {{"mac", c.mac}, {"rhid", rhid}});
        continue;
      }
      Timestamp now = clock_.now();
      c.state = ClientState::kAuthorized;
      c.authorized_at = now;
      c.expires_at = now + std::chrono::seconds(config_.fas.session_timeout_seconds);
      result.confirmed.push_back(rhid);
      emit_("client_authorized", {{"mac", c.mac}, {"rhid", rhid},
                                  {"expires_at", format_iso8601(*c.expires_at)}});
    }
  }

  for (const auto& rhid : keepalive) {
    auto reply = authmon_call(fas::confirm(rhid, scope()));
    // A lost keepalive proves nothing; the next cycle asks again.
    if (!reply || is_ack(reply)) continue;
    std::lock_guard lock(mu_);
    for (auto& [_, c] : clients_) {
      if (c.rhid == rhid && c.state == ClientState::kAuthorized) {
        deauthorize_locked(c, "server_nak");
        result.deauthorized.push_back(c.mac);
      }
    }
  }

  emit_("authmon_poll", {{"listed", std::to_string(result.listed.size())},
                         {"confirmed", std::to_string(result.confirmed.size())},
                         {"deauthorized", std::to_string(result.deauthorized.size())}});
  return result;
}

Status GatewaySim::boot() {
  {
    std::lock_guard lock(mu_);
    for (auto& [_, c] : clients_) mint_locked(c);
  }
  Error last(Errc::kTransportError, "no attempt made");
  for (int attempt = 1; attempt <= config_.boot_attempts; ++attempt) {
    auto reply = authmon_call(fas::clear(scope()));
    if (reply) {
      emit_("boot", {{"attempts", std::to_string(attempt)}});
      return {};
    }
    last = reply.error();
    emit_("boot_retry", {{"attempt", std::to_string(attempt)},
                         {"error", last.to_string()}});
  }
  return last;
}

std::vector<std::string> GatewaySim::expiry_tick() {
  std::vector<std::string> expired;
  Timestamp now = clock_.now();
  std::lock_guard lock(mu_);
  for (auto& [mac, c] : clients_) {
    if (c.state == ClientState::kAuthorized && now >= *c.expires_at) {
      deauthorize_locked(c, "timeout");
      expired.push_back(mac);
    }
  }
  return expired;
}

std::optional<ClientRecord> GatewaySim::client(const std::string& mac) const {
  std::lock_guard lock(mu_);
  auto it = clients_.find(mac);
  if (it == clients_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClientRecord> GatewaySim::client_by_ip(const std::string& ip) const {
  std::lock_guard lock(mu_);
  for (const auto& [_, c] : clients_) {
    if (c.ip == ip) return c;
  }
  return std::nullopt;
}

std::vector<ClientRecord> GatewaySim::clients() const {
  std::lock_guard lock(mu_);
  std::vector<ClientRecord> out;
  for (const auto& [_, c] : clients_) out.push_back(c);
  return out;
}

http::Handler GatewaySim::captive_api() {
  return [this](const http::Request& req) {
    if (req.method != "GET" || req.path != kCaptiveApiPath) {
      return http::text_response(404, "not found");
    }
    auto c = client_by_ip(req.remote_addr);
    if (!c) return http::text_response(404, "unknown client");
    auto status = captivity_status(c->mac);
    if (!status) return http::text_response(404, "unknown client");
    http::Response r = http::text_response(200, status->to_json().dump(), kCaptiveJson);
    r.headers["Cache-Control"] = "private";
    return r;
  };
}

http::Response FlakyTransport::operator()(const http::Request& request) {
  Bytes roll = random_.bytes(4);
  uint32_t v = (uint32_t{roll[0]} << 24) | (uint32_t{roll[1]} << 16) |
               (uint32_t{roll[2]} << 8) | roll[3];
  bool fail = down_ || v < failure_rate_ * 4294967296.0;
  if (!fail) return inner_(request);
  ++failures_;
  if (lose_reply_ && !down_) (void)inner_(request);
  return http::Response{0, {}, "injected network failure"};
}

}  // namespace fido2cap::gateway
