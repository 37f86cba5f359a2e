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

#include "fido2cap/webauthn/challenge_store.h"

namespace fido2cap::webauthn {

Challenge ChallengeStore::issue(Ceremony ceremony, Duration ttl,
                                ChallengeBinding binding, bool decoy) {
  Challenge c;
  c.ceremony = ceremony;
  c.issued_at = clock_.now();
  c.expires_at = c.issued_at + ttl;
  c.binding = std::move(binding);
  c.decoy = decoy;
  std::lock_guard lock(mu_);
  do {
    c.value = random_.bytes(kChallengeSize);
  } while (pending_.contains(c.value));
  pending_.emplace(c.value, c);
  return c;
}

Result<Challenge> ChallengeStore::take(ByteSpan value, Ceremony ceremony) {
  Timestamp now = clock_.now();
  std::lock_guard lock(mu_);
  auto it = pending_.find(Bytes(value.begin(), value.end()));
  if (it == pending_.end()) {
    return Error(Errc::kChallengeUnknownOrExpired, "challenge not outstanding");
  }
  Challenge c = std::move(it->second);
  pending_.erase(it);
  if (c.ceremony != ceremony) {
    return Error(Errc::kChallengeUnknownOrExpired,
                 "challenge was issued for another ceremony");
  }
  if (now >= c.expires_at) {
    return Error(Errc::kChallengeUnknownOrExpired, "challenge expired");
  }
  c.consumed = true;
  return c;
}

size_t ChallengeStore::purge_expired() {
  Timestamp now = clock_.now();
  std::lock_guard lock(mu_);
  return std::erase_if(pending_,
                       [&](const auto& kv) { return now >= kv.second.expires_at; });
}

size_t ChallengeStore::size() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

}  // namespace fido2cap::webauthn
