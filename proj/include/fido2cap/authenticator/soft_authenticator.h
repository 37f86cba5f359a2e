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

#ifndef FIDO2CAP_AUTHENTICATOR_SOFT_AUTHENTICATOR_H_
#define FIDO2CAP_AUTHENTICATOR_SOFT_AUTHENTICATOR_H_

#include <array>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/random.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/types.h"

namespace fido2cap::authenticator {

enum class CounterMode { kPerCredential, kGlobal };

// What the simulated user does when the authenticator asks for a touch.
enum class PresenceStep {
  kApprove,
  kDeny,
  // Block until touch() or simulate_disconnect() is called.
  kAwaitTouch,
};

struct SoftAuthenticatorOptions {
  CounterMode counter_mode = CounterMode::kPerCredential;
  bool user_verification_supported = true;
  // Emit "packed" self attestation instead of "none".
  bool self_attestation = false;
  // Step used once the presence script runs out.
  PresenceStep default_presence = PresenceStep::kApprove;
};

struct UserInfo {
  Bytes id;
  std::string name;
  std::string display_name;
};

struct MakeCredentialResult {
  Bytes credential_id;
  Bytes authenticator_data;
  Bytes attestation_object;
};

struct GetAssertionResult {
  Bytes credential_id;
  Bytes authenticator_data;
  Bytes signature;
  std::optional<Bytes> user_handle;
};

inline constexpr size_t kResidentIdSize = 16;
inline constexpr size_t kWrapNonceSize = 12;
inline constexpr size_t kWrapSeedSize = 32;
inline constexpr size_t kWrappedIdSize = kWrapNonceSize + kWrapSeedSize + 32 + 16;

// Software FIDO2 authenticator with ES256 keys. Resident credentials live in
// an in-memory store; non-resident credential ids are the key seed sealed
// under a per-instance wrap key.
//
// One ceremony at a time: a call that arrives while another is running fails
// with kBusy.
class SoftAuthenticator {
 public:
  explicit SoftAuthenticator(RandomSource& random,
                             SoftAuthenticatorOptions options = {});

  const std::array<uint8_t, 16>& aaguid() const { return aaguid_; }
  const SoftAuthenticatorOptions& options() const { return options_; }

  Result<MakeCredentialResult> make_credential(
      std::string_view rp_id, const UserInfo& user,
      const std::vector<Bytes>& exclude, bool resident, bool uv,
      ByteSpan client_data_hash);

  Result<GetAssertionResult> get_assertion(std::string_view rp_id,
                                           const std::vector<Bytes>& allow,
                                           ByteSpan client_data_hash, bool uv);

  // Appends steps to the presence script.
  void script_presence(std::vector<PresenceStep> steps);
  // Resolves a ceremony blocked in kAwaitTouch. False if none is waiting.
  bool touch();
  // Aborts a ceremony blocked in kAwaitTouch with kUserPresenceDenied.
  // False (and no effect) when nothing is waiting.
  bool simulate_disconnect();
  bool awaiting_touch() const;

  size_t resident_count() const;
  uint32_t counter_for(ByteSpan credential_id) const;

  // Exposed for property tests of the id format.
  Bytes wrap(ByteSpan seed, ByteSpan rp_id_hash);
  Result<Bytes> unwrap(ByteSpan credential_id, ByteSpan rp_id_hash) const;

 private:
  struct ResidentEntry {
    Bytes seed;
    std::string rp_id;
    Bytes user_id;
    std::string user_name;
    uint64_t seq = 0;
  };

  Status await_presence();
  // Seed for `credential_id` under `rp_id`, or nullopt.
  std::optional<Bytes> resolve(ByteSpan credential_id,
                               std::string_view rp_id) const;
  uint32_t next_counter(const Bytes& credential_id);

  RandomSource& random_;
  SoftAuthenticatorOptions options_;
  std::array<uint8_t, 16> aaguid_{};
  Bytes master_wrap_key_;

  std::mutex ceremony_mu_;

  mutable std::mutex state_mu_;
  std::map<Bytes, ResidentEntry> resident_store_;
  std::map<Bytes, uint32_t> counters_;
  uint32_t global_counter_ = 0;
  uint64_t resident_seq_ = 0;

  mutable std::mutex presence_mu_;
  std::condition_variable presence_cv_;
  std::deque<PresenceStep> script_;
  bool waiting_ = false;
  std::optional<bool> touch_result_;
};

}  // namespace fido2cap::authenticator

#endif  // FIDO2CAP_AUTHENTICATOR_SOFT_AUTHENTICATOR_H_
