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

#ifndef FIDO2CAP_WEBAUTHN_CHALLENGE_STORE_H_
#define FIDO2CAP_WEBAUTHN_CHALLENGE_STORE_H_

#include <map>
#include <mutex>

#include "fido2cap/common/clock.h"
#include "fido2cap/common/random.h"
#include "fido2cap/common/result.h"
#include "fido2cap/webauthn/types.h"

namespace fido2cap::webauthn {

// Outstanding challenges. take() is the single consume point: at most one
// caller ever receives a given challenge, even under concurrent calls.
class ChallengeStore {
 public:
  ChallengeStore(const Clock& clock, RandomSource& random)
      : clock_(clock), random_(random) {}

  Challenge issue(Ceremony ceremony, Duration ttl, ChallengeBinding binding,
                  bool decoy = false);

  // Removes and returns the challenge if it exists, matches the ceremony and
  // has not expired. Any lookup that matches a stored value consumes it.
  Result<Challenge> take(ByteSpan value, Ceremony ceremony);

  size_t purge_expired();
  size_t size() const;

 private:
  const Clock& clock_;
  RandomSource& random_;
  mutable std::mutex mu_;
  std::map<Bytes, Challenge> pending_;
};

}  // namespace fido2cap::webauthn

#endif  // FIDO2CAP_WEBAUTHN_CHALLENGE_STORE_H_
