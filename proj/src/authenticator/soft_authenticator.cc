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

#include "fido2cap/authenticator/soft_authenticator.h"

#include "fido2cap/cbor/cbor.h"
#include "fido2cap/crypto/crypto.h"
#include "fido2cap/webauthn/authenticator_data.h"

namespace fido2cap::authenticator {
namespace {

using webauthn::AuthenticatorData;
namespace wflags = webauthn::flags;

webauthn::CoseKey cose_key_for(const crypto::EcdsaP256Key& key) {
  webauthn::CoseKey cose;
  cose.kty = 2;
  cose.alg = webauthn::kAlgEs256;
  cose.params = webauthn::Ec2Params{
      1, Bytes(key.x().begin(), key.x().end()),
      Bytes(key.y().begin(), key.y().end())};
  return cose;
}

}  // namespace

SoftAuthenticator::SoftAuthenticator(RandomSource& random,
                                     SoftAuthenticatorOptions options)
    : random_(random), options_(options) {
  random_.fill(aaguid_);
  master_wrap_key_ = random_.bytes(crypto::kAes256KeySize);
}

Bytes SoftAuthenticator::wrap(ByteSpan seed, ByteSpan rp_id_hash) {
  Bytes nonce = random_.bytes(kWrapNonceSize);
  Bytes sealed =
      *crypto::aes256_gcm_seal(master_wrap_key_, nonce,
                               concat(seed, rp_id_hash), ByteSpan{});
  return concat(nonce, sealed);
}

Result<Bytes> SoftAuthenticator::unwrap(ByteSpan credential_id,
                                        ByteSpan rp_id_hash) const {
  if (credential_id.size() != kWrappedIdSize) {
    return Error(Errc::kNoMatchingCredential, "not a wrapped id");
  }
  auto plain = crypto::aes256_gcm_open(
      master_wrap_key_, credential_id.first(kWrapNonceSize),
      credential_id.subspan(kWrapNonceSize), ByteSpan{});
  if (!plain || plain->size() != kWrapSeedSize + 32) {
    return Error(Errc::kNoMatchingCredential, "wrapped id does not open");
  }
  ByteSpan bound_hash = ByteSpan(*plain).subspan(kWrapSeedSize);
  if (!crypto::constant_time_equal(bound_hash, rp_id_hash)) {
    return Error(Errc::kNoMatchingCredential, "wrapped id bound to another rp");
  }
  return Bytes(plain->begin(), plain->begin() + kWrapSeedSize);
}

std::optional<Bytes> SoftAuthenticator::resolve(ByteSpan credential_id,
                                                std::string_view rp_id) const {
  {
    std::lock_guard lock(state_mu_);
    auto it = resident_store_.find(Bytes(credential_id.begin(),
                                         credential_id.end()));
    if (it != resident_store_.end()) {
      if (it->second.rp_id != rp_id) return std::nullopt;
      return it->second.seed;
    }
  }
  auto rp_hash = crypto::sha256(to_bytes(rp_id));
  auto seed = unwrap(credential_id, rp_hash);
  if (!seed) return std::nullopt;
  return *seed;
}

Status SoftAuthenticator::await_presence() {
  std::unique_lock lock(presence_mu_);
  PresenceStep step = options_.default_presence;
  if (!script_.empty()) {
    step = script_.front();
    script_.pop_front();
  }
  switch (step) {
    case PresenceStep::kApprove:
      return {};
    case PresenceStep::kDeny:
      return Error(Errc::kUserPresenceDenied, "user declined");
    case PresenceStep::kAwaitTouch:
      break;
  }
  waiting_ = true;
  touch_result_.reset();
  presence_cv_.notify_all();
  presence_cv_.wait(lock, [&] { return touch_result_.has_value(); });
  waiting_ = false;
  bool approved = *touch_result_;
  touch_result_.reset();
  if (!approved) {
    return Error(Errc::kUserPresenceDenied, "authenticator disconnected");
  }
  return {};
}

void SoftAuthenticator::script_presence(std::vector<PresenceStep> steps) {
  std::lock_guard lock(presence_mu_);
  script_.insert(script_.end(), steps.begin(), steps.end());
}

bool SoftAuthenticator::touch() {
  std::lock_guard lock(presence_mu_);
  if (!waiting_ || touch_result_) return false;
  touch_result_ = true;
  presence_cv_.notify_all();
  return true;
}

bool SoftAuthenticator::simulate_disconnect() {
  std::lock_guard lock(presence_mu_);
  if (!waiting_ || touch_result_) return false;
  touch_result_ = false;
  presence_cv_.notify_all();
  return true;
}

bool SoftAuthenticator::awaiting_touch() const {
  std::lock_guard lock(presence_mu_);
  return waiting_ && !touch_result_;
}

size_t SoftAuthenticator::resident_count() const {
  std::lock_guard lock(state_mu_);
  return resident_store_.size();
}

uint32_t SoftAuthenticator::counter_for(ByteSpan credential_id) const {
  std::lock_guard lock(state_mu_);
  if (options_.counter_mode == CounterMode::kGlobal) return global_counter_;
  auto it = counters_.find(Bytes(credential_id.begin(), credential_id.end()));
  return it == counters_.end() ? 0 : it->second;
}

uint32_t SoftAuthenticator::next_counter(const Bytes& credential_id) {
  std::lock_guard lock(state_mu_);
  if (options_.counter_mode == CounterMode::kGlobal) return ++global_counter_;
  return ++counters_[credential_id];
}

Result<MakeCredentialResult> SoftAuthenticator::make_credential(
    std::string_view rp_id, const UserInfo& user,
    const std::vector<Bytes>& exclude, bool resident, bool uv,
    ByteSpan client_data_hash) {
  std::unique_lock ceremony(ceremony_mu_, std::try_to_lock);
  if (!ceremony.owns_lock()) {
    return Error(Errc::kBusy, "another ceremony is in progress");
  }
  if (uv && !options_.user_verification_supported) {
    return Error(Errc::kUserVerificationUnavailable,
                 "user verification not supported");
  }
  for (const auto& id : exclude) {
    if (resolve(id, rp_id)) {
      return Error(Errc::kExcludedCredentialExists,
                   "authenticator already holds an excluded credential");
    }
  }
  if (auto s = await_presence(); !s) return s.error();

  Bytes seed = random_.bytes(kWrapSeedSize);
  auto key = crypto::EcdsaP256Key::from_seed(seed);
  auto rp_hash = crypto::sha256(to_bytes(rp_id));

  Bytes credential_id;
  if (resident) {
    std::lock_guard lock(state_mu_);
    std::erase_if(resident_store_, [&](const auto& kv) {
      return kv.second.rp_id == rp_id && kv.second.user_id == user.id;
    });
    do {
      credential_id = random_.bytes(kResidentIdSize);
    } while (resident_store_.contains(credential_id));
    resident_store_[credential_id] =
        ResidentEntry{seed, std::string(rp_id), user.id, user.name,
                      ++resident_seq_};
  } else {
    credential_id = wrap(seed, rp_hash);
  }
  {
    std::lock_guard lock(state_mu_);
    counters_[credential_id] = 0;
  }

  AuthenticatorData data;
  data.rp_id_hash = rp_hash;
  data.flags = wflags::kUserPresent | wflags::kAttestedCredential;
  if (uv) data.flags |= wflags::kUserVerified;
  data.sign_count = 0;
  data.attested_credential =
      webauthn::AttestedCredential{aaguid_, credential_id, cose_key_for(key)};
  Bytes auth_data = webauthn::serialize_authenticator_data(data);

  cbor::Map att_stmt;
  std::string fmt = "none";
  if (options_.self_attestation) {
    fmt = "packed";
    att_stmt.emplace_back("alg", cbor::Value(webauthn::kAlgEs256));
    att_stmt.emplace_back("sig", key.sign(concat(auth_data, client_data_hash)));
  }
  cbor::Map att_obj;
  att_obj.emplace_back("fmt", fmt);
  att_obj.emplace_back("attStmt", std::move(att_stmt));
  att_obj.emplace_back("authData", auth_data);

  return MakeCredentialResult{credential_id, auth_data,
                              cbor::encode(std::move(att_obj))};
}

Result<GetAssertionResult> SoftAuthenticator::get_assertion(
    std::string_view rp_id, const std::vector<Bytes>& allow,
    ByteSpan client_data_hash, bool uv) {
  std::unique_lock ceremony(ceremony_mu_, std::try_to_lock);
  if (!ceremony.owns_lock()) {
    return Error(Errc::kBusy, "another ceremony is in progress");
  }

  Bytes credential_id;
  Bytes seed;
  std::optional<Bytes> user_handle;
  if (!allow.empty()) {
    for (const auto& id : allow) {
      if (auto s = resolve(id, rp_id)) {
        credential_id = id;
        seed = std::move(*s);
        break;
      }
    }
  } else {
    std::lock_guard lock(state_mu_);
    const ResidentEntry* best = nullptr;
    for (const auto& [id, entry] : resident_store_) {
      if (entry.rp_id == rp_id && (best == nullptr || entry.seq > best->seq)) {
        best = &entry;
        credential_id = id;
      }
    }
    if (best != nullptr) seed = best->seed;
  }
  if (seed.empty()) {
    return Error(Errc::kNoMatchingCredential, "no usable credential for rp");
  }
  {
    std::lock_guard lock(state_mu_);
    auto it = resident_store_.find(credential_id);
    if (it != resident_store_.end()) user_handle = it->second.user_id;
  }

  if (auto s = await_presence(); !s) return s.error();

  AuthenticatorData data;
  data.rp_id_hash = crypto::sha256(to_bytes(rp_id));
  data.flags = wflags::kUserPresent;
  if (uv && options_.user_verification_supported) {
    data.flags |= wflags::kUserVerified;
  }
  data.sign_count = next_counter(credential_id);
  Bytes auth_data = webauthn::serialize_authenticator_data(data);

  auto key = crypto::EcdsaP256Key::from_seed(seed);
  Bytes signature = key.sign(concat(auth_data, client_data_hash));
  return GetAssertionResult{credential_id, std::move(auth_data),
                            std::move(signature), std::move(user_handle)};
}

}  // namespace fido2cap::authenticator
