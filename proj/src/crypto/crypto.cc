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

#include "fido2cap/crypto/crypto.h"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/sha.h>

#include <stdexcept>

namespace fido2cap::crypto {
namespace {

template <typename T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
using CipherCtx =
    std::unique_ptr<EVP_CIPHER_CTX, Deleter<EVP_CIPHER_CTX, EVP_CIPHER_CTX_free>>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, Deleter<EVP_MD_CTX, EVP_MD_CTX_free>>;
using PkeyPtr = std::unique_ptr<EVP_PKEY, Deleter<EVP_PKEY, EVP_PKEY_free>>;
using PkeyCtx =
    std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX, EVP_PKEY_CTX_free>>;
using BnPtr = std::unique_ptr<BIGNUM, Deleter<BIGNUM, BN_free>>;
using BnCtx = std::unique_ptr<BN_CTX, Deleter<BN_CTX, BN_CTX_free>>;
using GroupPtr = std::unique_ptr<EC_GROUP, Deleter<EC_GROUP, EC_GROUP_free>>;
using PointPtr = std::unique_ptr<EC_POINT, Deleter<EC_POINT, EC_POINT_free>>;
using ParamBld =
    std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD, OSSL_PARAM_BLD_free>>;
using ParamPtr = std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM, OSSL_PARAM_free>>;

[[noreturn]] void fail(const char* what) { throw std::runtime_error(what); }

PkeyPtr pkey_from_params(const char* type, OSSL_PARAM* params, int selection) {
  PkeyCtx ctx(EVP_PKEY_CTX_new_from_name(nullptr, type, nullptr));
  EVP_PKEY* raw = nullptr;
  if (!ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, selection, params) != 1) {
    return nullptr;
  }
  return PkeyPtr(raw);
}

Bytes digest_sign(EVP_PKEY* key, ByteSpan message) {
  MdCtx ctx(EVP_MD_CTX_new());
  size_t len = 0;
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key) != 1 ||
      EVP_DigestSign(ctx.get(), nullptr, &len, message.data(),
                     message.size()) != 1) {
    fail("EVP_DigestSign setup failed");
  }
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                     message.size()) != 1) {
    fail("EVP_DigestSign failed");
  }
  sig.resize(len);
  return sig;
}

bool digest_verify(EVP_PKEY* key, ByteSpan message, ByteSpan signature) {
  MdCtx ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr,
                                   key) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

Bytes bn_to_bytes(const BIGNUM* bn) {
  Bytes out(static_cast<size_t>(BN_num_bytes(bn)));
  BN_bn2bin(bn, out.data());
  return out;
}

}  // namespace

Sha256Digest sha256(ByteSpan data) {
  Sha256Digest out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Sha256Digest hmac_sha256(ByteSpan key, ByteSpan data) {
  Sha256Digest out;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(),
           data.size(), out.data(), &len) == nullptr) {
    fail("HMAC failed");
  }
  return out;
}

bool constant_time_equal(ByteSpan a, ByteSpan b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Result<Bytes> aes256_cbc_encrypt(ByteSpan key, ByteSpan iv,
                                 ByteSpan plaintext) {
  if (key.size() != kAes256KeySize || iv.size() != kAesBlockSize) {
    return Error(Errc::kInvalidArgument, "AES-256-CBC needs 32-byte key and 16-byte IV");
  }
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + kAesBlockSize);
  int len = 0;
  int total = 0;
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(),
                         iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    return Error(Errc::kCipherError, "encryption failed");
  }
  total = len;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    return Error(Errc::kCipherError, "encryption failed");
  }
  out.resize(static_cast<size_t>(total + len));
  return out;
}

Result<Bytes> aes256_cbc_decrypt(ByteSpan key, ByteSpan iv,
                                 ByteSpan ciphertext) {
  if (key.size() != kAes256KeySize || iv.size() != kAesBlockSize) {
    return Error(Errc::kInvalidArgument, "AES-256-CBC needs 32-byte key and 16-byte IV");
  }
  if (ciphertext.empty() || ciphertext.size() % kAesBlockSize != 0) {
    return Error(Errc::kCipherError, "ciphertext is not block aligned");
  }
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(ciphertext.size() + kAesBlockSize);
  int len = 0;
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.data(),
                         iv.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1) {
    return Error(Errc::kCipherError, "decryption failed");
  }
  int total = len;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    return Error(Errc::kCipherError, "bad padding");
  }
  out.resize(static_cast<size_t>(total + len));
  return out;
}

Result<Bytes> aes256_gcm_seal(ByteSpan key, ByteSpan nonce, ByteSpan plaintext,
                              ByteSpan aad) {
  if (key.size() != kAes256KeySize || nonce.size() != kGcmNonceSize) {
    return Error(Errc::kInvalidArgument, "AES-256-GCM needs 32-byte key and 12-byte nonce");
  }
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + kGcmTagSize);
  int len = 0;
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) != 1 ||
      (!aad.empty() && EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                                         static_cast<int>(aad.size())) != 1) ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize,
                          out.data() + plaintext.size()) != 1) {
    return Error(Errc::kCipherError, "GCM seal failed");
  }
  return out;
}

Result<Bytes> aes256_gcm_open(ByteSpan key, ByteSpan nonce, ByteSpan sealed,
                              ByteSpan aad) {
  if (key.size() != kAes256KeySize || nonce.size() != kGcmNonceSize) {
    return Error(Errc::kInvalidArgument, "AES-256-GCM needs 32-byte key and 12-byte nonce");
  }
  if (sealed.size() < kGcmTagSize) {
    return Error(Errc::kCipherError, "sealed box shorter than tag");
  }
  size_t ct_len = sealed.size() - kGcmTagSize;
  Bytes tag(sealed.begin() + static_cast<ptrdiff_t>(ct_len), sealed.end());
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes out(ct_len + kAesBlockSize);
  int len = 0;
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) != 1 ||
      (!aad.empty() && EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                                         static_cast<int>(aad.size())) != 1) ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(),
                        static_cast<int>(ct_len)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize,
                          tag.data()) != 1) {
    return Error(Errc::kCipherError, "GCM open failed");
  }
  int total = len;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
    return Error(Errc::kCipherError, "authentication tag mismatch");
  }
  out.resize(static_cast<size_t>(total + len));
  return out;
}

// ---------------------------------------------------------------------------
// ECDSA P-256

struct EcdsaP256Key::Impl {
  PkeyPtr pkey;
};

EcdsaP256Key::EcdsaP256Key(std::unique_ptr<Impl> impl)
    : impl_(std::move(impl)) {}
EcdsaP256Key::EcdsaP256Key(EcdsaP256Key&&) noexcept = default;
EcdsaP256Key& EcdsaP256Key::operator=(EcdsaP256Key&&) noexcept = default;
EcdsaP256Key::~EcdsaP256Key() = default;

EcdsaP256Key EcdsaP256Key::from_seed(ByteSpan seed) {
  GroupPtr group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  BnCtx bn_ctx(BN_CTX_new());
  BnPtr order(BN_new());
  BnPtr scalar(BN_bin2bn(seed.data(), static_cast<int>(seed.size()), nullptr));
  if (!group || !bn_ctx || !order || !scalar ||
      EC_GROUP_get_order(group.get(), order.get(), bn_ctx.get()) != 1) {
    fail("P-256 setup failed");
  }
  BnPtr order_minus_one(BN_dup(order.get()));
  BN_sub_word(order_minus_one.get(), 1);
  BN_mod(scalar.get(), scalar.get(), order_minus_one.get(), bn_ctx.get());
  BN_add_word(scalar.get(), 1);

  PointPtr pub(EC_POINT_new(group.get()));
  if (!pub || EC_POINT_mul(group.get(), pub.get(), scalar.get(), nullptr,
                           nullptr, bn_ctx.get()) != 1) {
    fail("P-256 point multiplication failed");
  }
  std::array<uint8_t, 65> pub_oct{};
  if (EC_POINT_point2oct(group.get(), pub.get(), POINT_CONVERSION_UNCOMPRESSED,
                         pub_oct.data(), pub_oct.size(),
                         bn_ctx.get()) != pub_oct.size()) {
    fail("P-256 point encoding failed");
  }

  ParamBld bld(OSSL_PARAM_BLD_new());
  OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME,
                                  "prime256v1", 0);
  OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, scalar.get());
  OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY,
                                   pub_oct.data(), pub_oct.size());
  ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  auto impl = std::make_unique<Impl>();
  impl->pkey = pkey_from_params("EC", params.get(), EVP_PKEY_KEYPAIR);
  if (!impl->pkey) fail("EC key import failed");

  EcdsaP256Key key(std::move(impl));
  std::copy(pub_oct.begin() + 1, pub_oct.begin() + 33, key.x_.begin());
  std::copy(pub_oct.begin() + 33, pub_oct.end(), key.y_.begin());
  return key;
}

Bytes EcdsaP256Key::sign(ByteSpan message) const {
  return digest_sign(impl_->pkey.get(), message);
}

bool verify_es256(ByteSpan x, ByteSpan y, ByteSpan message,
                  ByteSpan der_signature) {
  if (x.size() != 32 || y.size() != 32) return false;
  Bytes pub_oct{0x04};
  pub_oct.insert(pub_oct.end(), x.begin(), x.end());
  pub_oct.insert(pub_oct.end(), y.begin(), y.end());
  ParamBld bld(OSSL_PARAM_BLD_new());
  OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME,
                                  "prime256v1", 0);
  OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY,
                                   pub_oct.data(), pub_oct.size());
  ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  // Import fails for points that are not on the curve.
  PkeyPtr pkey = pkey_from_params("EC", params.get(), EVP_PKEY_PUBLIC_KEY);
  if (!pkey) return false;
  return digest_verify(pkey.get(), message, der_signature);
}

// ---------------------------------------------------------------------------
// RSA

struct RsaKey::Impl {
  PkeyPtr pkey;
};

RsaKey::RsaKey(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
RsaKey::RsaKey(RsaKey&&) noexcept = default;
RsaKey& RsaKey::operator=(RsaKey&&) noexcept = default;
RsaKey::~RsaKey() = default;

RsaKey RsaKey::generate(int bits) {
  auto impl = std::make_unique<Impl>();
  impl->pkey.reset(EVP_PKEY_Q_keygen(nullptr, nullptr, "RSA",
                                     static_cast<size_t>(bits)));
  if (!impl->pkey) fail("RSA keygen failed");
  BIGNUM* n = nullptr;
  BIGNUM* e = nullptr;
  EVP_PKEY_get_bn_param(impl->pkey.get(), OSSL_PKEY_PARAM_RSA_N, &n);
  EVP_PKEY_get_bn_param(impl->pkey.get(), OSSL_PKEY_PARAM_RSA_E, &e);
  BnPtr n_owned(n);
  BnPtr e_owned(e);
  if (!n || !e) fail("RSA parameter export failed");
  RsaKey key(std::move(impl));
  key.n_ = bn_to_bytes(n);
  key.e_ = bn_to_bytes(e);
  return key;
}

Bytes RsaKey::sign(ByteSpan message) const {
  return digest_sign(impl_->pkey.get(), message);
}

bool verify_rs256(ByteSpan modulus, ByteSpan exponent, ByteSpan message,
                  ByteSpan signature) {
  if (modulus.empty() || exponent.empty()) return false;
  BnPtr n(BN_bin2bn(modulus.data(), static_cast<int>(modulus.size()), nullptr));
  BnPtr e(BN_bin2bn(exponent.data(), static_cast<int>(exponent.size()), nullptr));
  ParamBld bld(OSSL_PARAM_BLD_new());
  OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_N, n.get());
  OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_RSA_E, e.get());
  ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyPtr pkey = pkey_from_params("RSA", params.get(), EVP_PKEY_PUBLIC_KEY);
  if (!pkey) return false;
  return digest_verify(pkey.get(), message, signature);
}

}  // namespace fido2cap::crypto
