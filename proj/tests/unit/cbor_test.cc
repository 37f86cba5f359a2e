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

#include <gtest/gtest.h>

#include "fido2cap/cbor/cbor.h"
#include "fido2cap/common/random.h"
#include "fido2cap/webauthn/authenticator_data.h"

namespace fido2cap {
namespace {

using cbor::Array;
using cbor::Map;
using cbor::Value;

Bytes hex(std::string_view s) { return *hex_decode(s); }

// RFC 8949 appendix A examples within the supported subset.
TEST(CborTest, RfcVectors) {
  const std::pair<Value, const char*> vectors[] = {
      {Value(0), "00"},
      {Value(23), "17"},
      {Value(24), "1818"},
      {Value(100), "1864"},
      {Value(1000), "1903e8"},
      {Value(1000000), "1a000f4240"},
      {Value(int64_t{1000000000000}), "1b000000e8d4a51000"},
      {Value(-1), "20"},
      {Value(-100), "3863"},
      {Value(-1000), "3903e7"},
      {Value(false), "f4"},
      {Value(true), "f5"},
      {Value(cbor::Null{}), "f6"},
      {Value(Bytes{}), "40"},
      {Value(hex("01020304")), "4401020304"},
      {Value(""), "60"},
      {Value("a"), "6161"},
      {Value("IETF"), "6449455446"},
      {Value("\xc3\xbc"), "62c3bc"},
      {Value(Array{}), "80"},
      {Value(Array{1, 2, 3}), "83010203"},
      {Value(Array{1, Array{2, 3}, Array{4, 5}}), "8301820203820405"},
      {Value(Map{}), "a0"},
      {Value(Map{{1, 2}, {3, 4}}), "a201020304"},
      {Value(Map{{"a", 1}, {"b", Array{2, 3}}}), "a26161016162820203"},
  };
  for (const auto& [value, encoded] : vectors) {
    EXPECT_EQ(hex_encode(cbor::encode(value)), encoded);
    auto back = cbor::decode(hex(encoded));
    ASSERT_TRUE(back) << encoded;
    EXPECT_EQ(*back, value) << encoded;
  }
}

TEST(CborTest, RejectsOutsideSubset) {
  const char* rejected[] = {
      "f90000",              // half float
      "fb3ff199999999999a",  // double
      "c074323031332d30332d32315432303a30343a30305a",  // tag 0
      "5f42010243030405ff",  // indefinite byte string
      "9fff",                // indefinite array
      "1bffffffffffffffff",  // beyond int64
      "62c328",              // invalid UTF-8
      "a201020103",          // duplicate key
      "f7",                  // undefined
  };
  for (const char* h : rejected) EXPECT_FALSE(cbor::decode(hex(h))) << h;
}

TEST(CborTest, TruncationAndTrailingBytes) {
  Bytes enc = cbor::encode(Value(Map{{"key", hex("00112233")}, {1, Array{1, 2}}}));
  for (size_t n = 0; n < enc.size(); ++n) {
    EXPECT_FALSE(cbor::decode(ByteSpan(enc).first(n))) << n;
  }
  Bytes extra = enc;
  extra.push_back(0x00);
  EXPECT_FALSE(cbor::decode(extra));
  size_t consumed = 0;
  auto prefix = cbor::decode_prefix(extra, &consumed);
  ASSERT_TRUE(prefix);
  EXPECT_EQ(consumed, enc.size());
  // An absurd length must not allocate.
  EXPECT_FALSE(cbor::decode(hex("5bffffffffffffff00")));
  EXPECT_FALSE(cbor::decode(hex("9bffffffffffffff00")));
}

TEST(CborTest, DeepNestingIsRejected) {
  Bytes deep(1000, 0x81);
  deep.push_back(0x00);
  EXPECT_FALSE(cbor::decode(deep));
}

TEST(CborTest, MapLookup) {
  Value m(Map{{1, 2}, {-3, "ec"}, {"fmt", "none"}});
  ASSERT_NE(m.find(-3), nullptr);
  EXPECT_EQ(m.find(-3)->as_text(), "ec");
  EXPECT_EQ(m.find("fmt")->as_text(), "none");
  EXPECT_EQ(m.find(7), nullptr);
  EXPECT_EQ(Value(1).find(1), nullptr);
}

Value random_value(SeededRandom& rng, int depth) {
  auto pick = [&](uint32_t n) {
    Bytes b = rng.bytes(4);
    return ((uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) | b[3]) % n;
  };
  uint32_t kind = pick(depth > 3 ? 5 : 8);
  switch (kind) {
    case 0: {
      Bytes b = rng.bytes(8);
      int64_t v = 0;
      for (uint8_t x : b) v = (v << 8) | x;
      return Value(v >> pick(64));
    }
    case 1: return Value(rng.bytes(pick(40)));
    case 2: {
      std::string s;
      for (uint32_t i = pick(30); i > 0; --i) s += static_cast<char>('a' + pick(26));
      return Value(s);
    }
    case 3: return Value(pick(2) == 1);
    case 4: return Value(cbor::Null{});
    case 5: {
      Array a;
      for (uint32_t i = pick(5); i > 0; --i) a.push_back(random_value(rng, depth + 1));
      return Value(a);
    }
    default: {
      Map m;
      for (uint32_t i = pick(5); i > 0; --i) {
        m.emplace_back(Value("k" + std::to_string(i)), random_value(rng, depth + 1));
      }
      return Value(m);
    }
  }
}

TEST(CborTest, RandomValuesRoundTrip) {
  SeededRandom rng(2024);
  for (int i = 0; i < 500; ++i) {
    Value v = random_value(rng, 0);
    Bytes enc = cbor::encode(v);
    auto back = cbor::decode(enc);
    ASSERT_TRUE(back) << hex_encode(enc);
    EXPECT_EQ(*back, v);
    EXPECT_EQ(cbor::encode(*back), enc);
  }
}

webauthn::AuthenticatorData sample_auth_data(SeededRandom& rng, bool attested, bool ext) {
  webauthn::AuthenticatorData d;
  Bytes h = rng.bytes(32);
  std::copy(h.begin(), h.end(), d.rp_id_hash.begin());
  d.flags = webauthn::flags::kUserPresent;
  Bytes c = rng.bytes(4);
  d.sign_count = (uint32_t{c[0]} << 24) | (uint32_t{c[1]} << 16) | (uint32_t{c[2]} << 8) | c[3];
  if (attested) {
    d.flags |= webauthn::flags::kAttestedCredential;
    webauthn::AttestedCredential cred;
    Bytes g = rng.bytes(16);
    std::copy(g.begin(), g.end(), cred.aaguid.begin());
    cred.credential_id = rng.bytes(16 + rng.bytes(1)[0] % 64);
    webauthn::Ec2Params ec{1, rng.bytes(32), rng.bytes(32)};
    cred.public_key.params = ec;
    d.attested_credential = cred;
  }
  if (ext) {
    d.flags |= webauthn::flags::kExtensionData;
    d.extensions = cbor::encode(Value(Map{{"credProtect", 2}}));
  }
  return d;
}

TEST(AuthenticatorDataTest, RandomRoundTrip) {
  SeededRandom rng(77);
  for (int i = 0; i < 200; ++i) {
    auto d = sample_auth_data(rng, i % 2 == 0, i % 3 == 0);
    Bytes raw = webauthn::serialize_authenticator_data(d);
    auto back = webauthn::parse_authenticator_data(raw);
    ASSERT_TRUE(back) << back.error().to_string();
    EXPECT_EQ(*back, d);
  }
}

TEST(AuthenticatorDataTest, LayoutMatchesByteOffsets) {
  SeededRandom rng(3);
  auto d = sample_auth_data(rng, true, false);
  d.sign_count = 0x01020304;
  Bytes raw = webauthn::serialize_authenticator_data(d);
  EXPECT_TRUE(std::equal(d.rp_id_hash.begin(), d.rp_id_hash.end(), raw.begin()));
  EXPECT_EQ(raw[32], webauthn::flags::kUserPresent | webauthn::flags::kAttestedCredential);
  EXPECT_EQ(hex_encode(ByteSpan(raw).subspan(33, 4)), "01020304");
  const auto& cred = *d.attested_credential;
  EXPECT_TRUE(std::equal(cred.aaguid.begin(), cred.aaguid.end(), raw.begin() + 37));
  size_t len = (size_t{raw[53]} << 8) | raw[54];
  EXPECT_EQ(len, cred.credential_id.size());
  EXPECT_EQ(Bytes(raw.begin() + 55, raw.begin() + 55 + len), cred.credential_id);
  auto key = cbor::decode(ByteSpan(raw).subspan(55 + len));
  ASSERT_TRUE(key);
  EXPECT_EQ(key->find(1)->as_int(), 2);    // kty EC2
  EXPECT_EQ(key->find(3)->as_int(), -7);   // ES256
  EXPECT_EQ(key->find(-1)->as_int(), 1);   // P-256
}

TEST(AuthenticatorDataTest, RejectsMalformed) {
  SeededRandom rng(5);
  EXPECT_FALSE(webauthn::parse_authenticator_data(Bytes(36, 0)));
  EXPECT_TRUE(webauthn::parse_authenticator_data(Bytes(37, 0)));

  auto d = sample_auth_data(rng, true, false);
  Bytes raw = webauthn::serialize_authenticator_data(d);
  for (size_t n = 37; n < raw.size(); ++n) {
    EXPECT_FALSE(webauthn::parse_authenticator_data(ByteSpan(raw).first(n))) << n;
  }
  Bytes trailing = raw;
  trailing.push_back(0);
  EXPECT_FALSE(webauthn::parse_authenticator_data(trailing));

  Bytes no_at(37, 0);
  no_at[32] = webauthn::flags::kAttestedCredential;
  EXPECT_FALSE(webauthn::parse_authenticator_data(no_at));
}

}  // namespace
}  // namespace fido2cap
