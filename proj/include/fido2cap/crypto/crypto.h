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

#ifndef FIDO2CAP_CRYPTO_CRYPTO_H_
#define FIDO2CAP_CRYPTO_CRYPTO_H_

#include <array>
#include <cstdint>
#include <memory>

#include "fido2cap/common/bytes.h"
#include "fido2cap/common/result.h"

// Thin wrappers over OpenSSL. Nothing here is protocol specific.
namespace fido2cap::crypto {

using Sha256Digest = std::array<uint8_t, 32>;

Sha256Digest sha256(ByteSpan data);
Sha256Digest hmac_sha256(ByteSpan key, ByteSpan data);

bool constant_time_equal(ByteSpan a, ByteSpan b);

inline constexpr size_t kAesBlockSize = 16;
inline constexpr size_t kAes256KeySize = 32;
inline constexpr size_t kGcmNonceSize = 12;
inline constexpr size_t kGcmTagSize = 16;

// AES-256-CBC with PKCS#7 padding.
Result<Bytes> aes256_cbc_encrypt(ByteSpan key, ByteSpan iv,
                                 ByteSpan plaintext);
// Fails with kCipherError on bad padding or a misaligned ciphertext.
Result<Bytes> aes256_cbc_decrypt(ByteSpan key, ByteSpan iv,
                                 ByteSpan ciphertext);

// AES-256-GCM. Output is ciphertext || 16-byte tag.
Result<Bytes> aes256_gcm_seal(ByteSpan key, ByteSpan nonce, ByteSpan plaintext,
                              ByteSpan aad);
Result<Bytes> aes256_gcm_open(ByteSpan key, ByteSpan nonce,
                              ByteSpan sealed, ByteSpan aad);

// ECDSA over P-256 with SHA-256, signatures DER encoded.
class EcdsaP256Key {
 public:
  // Derives a valid scalar from 32 seed bytes (seed mod (n-1) + 1).
  static EcdsaP256Key from_seed(ByteSpan seed);

  EcdsaP256Key(EcdsaP256Key&&) noexcept;
  EcdsaP256Key& operator=(EcdsaP256Key&&) noexcept;
  ~EcdsaP256Key();

  const std::array<uint8_t, 32>& x() const { return x_; }
  const std::array<uint8_t, 32>& y() const { return y_; }
  Bytes sign(ByteSpan message) const;

 private:
  struct Impl;
  explicit EcdsaP256Key(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
  std::array<uint8_t, 32> x_{};
  std::array<uint8_t, 32> y_{};
};

bool verify_es256(ByteSpan x, ByteSpan y, ByteSpan message,
                  ByteSpan der_signature);

// RSASSA-PKCS1-v1_5 with SHA-256.
class RsaKey {
 public:
  static RsaKey generate(int bits = 2048);

  RsaKey(RsaKey&&) noexcept;
  RsaKey& operator=(RsaKey&&) noexcept;
  ~RsaKey();

  const Bytes& modulus() const { return n_; }
  const Bytes& exponent() const { return e_; }
  Bytes sign(ByteSpan message) const;

 private:
  struct Impl;
  explicit RsaKey(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
  Bytes n_;
  Bytes e_;
};

bool verify_rs256(ByteSpan modulus, ByteSpan exponent, ByteSpan message,
                  ByteSpan signature);

}  // namespace fido2cap::crypto

#endif  // FIDO2CAP_CRYPTO_CRYPTO_H_
