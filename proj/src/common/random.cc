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

#include "fido2cap/common/random.h"

#include <openssl/rand.h>
#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <stdexcept>

namespace fido2cap {

void SystemRandom::fill(std::span<uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

void SeededRandom::fill(std::span<uint8_t> out) {
  std::lock_guard lock(mu_);
  size_t offset = 0;
  while (offset < out.size()) {
    std::array<uint8_t, 16> input{};
    for (int i = 0; i < 8; ++i) {
      input[i] = static_cast<uint8_t>(seed_ >> (8 * i));
      input[8 + i] = static_cast<uint8_t>(counter_ >> (8 * i));
    }
    ++counter_;
    std::array<uint8_t, SHA256_DIGEST_LENGTH> block;
    SHA256(input.data(), input.size(), block.data());
    size_t n = std::min(block.size(), out.size() - offset);
    std::copy_n(block.begin(), n, out.begin() + offset);
    offset += n;
  }
}

}  // namespace fido2cap
