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

#include "fido2cap/webauthn/wire.h"

namespace fido2cap::webauthn {
namespace {

using nlohmann::json;

Error bad(std::string detail) {
  return Error(Errc::kInvalidArgument, std::move(detail));
}

Result<Bytes> b64_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    return bad(std::string("missing string field '") + key + "'");
  }
  auto decoded = base64url_decode(j[key].get<std::string>());
  if (!decoded) return bad(std::string("field '") + key + "' is not base64url");
  return decoded;
}

json descriptor_list(const std::vector<Bytes>& ids) {
  json list = json::array();
  for (const auto& id : ids) {
    list.push_back({{"type", "public-key"}, {"id", base64url_encode(id)}});
  }
  return list;
}

Result<std::vector<Bytes>> parse_descriptor_list(const json& j,
                                                 const char* key) {
  std::vector<Bytes> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) return bad(std::string(key) + " must be an array");
  for (const auto& d : j[key]) {
    auto id = b64_field(d, "id");
    if (!id) return id.error();
    out.push_back(std::move(*id));
  }
  return out;
}

}  // namespace

Result<CollectedClientData> parse_client_data(ByteSpan client_data_json) {
  std::string text = fido2cap::to_string(client_data_json);
  if (!is_valid_utf8(text)) {
    return Error(Errc::kMalformedClientData, "clientDataJSON is not UTF-8");
  }
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string() ||
      !j.contains("challenge") || !j["challenge"].is_string() ||
      !j.contains("origin") || !j["origin"].is_string()) {
    return Error(Errc::kMalformedClientData,
                 "clientDataJSON lacks type, challenge or origin");
  }
  CollectedClientData out;
  out.type = j["type"].get<std::string>();
  out.origin = j["origin"].get<std::string>();
  auto challenge = base64url_decode(j["challenge"].get<std::string>());
  if (!challenge) {
    return Error(Errc::kMalformedClientData, "challenge is not base64url");
  }
  out.challenge = std::move(*challenge);
  if (j.contains("crossOrigin") && j["crossOrigin"].is_boolean()) {
    out.cross_origin = j["crossOrigin"].get<bool>();
  }
  return out;
}

Bytes build_client_data_json(std::string_view type, ByteSpan challenge,
                             std::string_view origin) {
  // Member order matches what browsers emit.
  std::string text = "{\"type\":" + json(std::string(type)).dump() +
                     ",\"challenge\":" + json(base64url_encode(challenge)).dump() +
                     ",\"origin\":" + json(std::string(origin)).dump() +
                     ",\"crossOrigin\":false}";
  return to_bytes(text);
}

json to_json(const CreationOptions& o) {
  json params = json::array();
  for (int64_t alg : o.algorithms) {
    params.push_back({{"type", "public-key"}, {"alg", alg}});
  }
  return {
      {"challenge", base64url_encode(o.challenge)},
      {"rp", {{"id", o.rp_id}, {"name", o.rp_name}}},
      {"user",
       {{"id", base64url_encode(o.user.id)},
        {"name", o.user.name},
        {"displayName", o.user.display_name}}},
      {"pubKeyCredParams", params},
      {"timeout", o.timeout.count()},
      {"excludeCredentials", descriptor_list(o.exclude_credentials)},
      {"authenticatorSelection",
       {{"residentKey", to_string(o.resident_key)},
        {"requireResidentKey",
         o.resident_key == ResidentKeyRequirement::kRequired},
        {"userVerification", to_string(o.user_verification)}}},
      {"attestation", o.attestation},
      {"extensions", {{"credProps", true}}},
  };
}

Result<CreationOptions> creation_options_from_json(const json& j) {
  if (!j.is_object()) return bad("options must be an object");
  CreationOptions o;
  auto challenge = b64_field(j, "challenge");
  if (!challenge) return challenge.error();
  o.challenge = std::move(*challenge);
  if (!j.contains("rp") || !j["rp"].is_object() || !j["rp"].contains("id")) {
    return bad("missing rp.id");
  }
  o.rp_id = j["rp"].value("id", "");
  o.rp_name = j["rp"].value("name", "");
  if (!j.contains("user") || !j["user"].is_object()) return bad("missing user");
  auto user_id = b64_field(j["user"], "id");
  if (!user_id) return user_id.error();
  o.user.id = std::move(*user_id);
  o.user.name = j["user"].value("name", "");
  o.user.display_name = j["user"].value("displayName", "");
  if (j.contains("pubKeyCredParams") && j["pubKeyCredParams"].is_array()) {
    for (const auto& p : j["pubKeyCredParams"]) {
      if (p.contains("alg") && p["alg"].is_number_integer()) {
        o.algorithms.push_back(p["alg"].get<int64_t>());
      }
    }
  }
  o.timeout = Duration(j.value("timeout", int64_t{0}));
  auto exclude = parse_descriptor_list(j, "excludeCredentials");
  if (!exclude) return exclude.error();
  o.exclude_credentials = std::move(*exclude);
  if (j.contains("authenticatorSelection")) {
    const auto& sel = j["authenticatorSelection"];
    auto rk = parse_resident_key(sel.value("residentKey", "preferred"));
    auto uv = parse_user_verification(sel.value("userVerification", "preferred"));
    if (!rk) return rk.error();
    if (!uv) return uv.error();
    o.resident_key = *rk;
    o.user_verification = *uv;
  }
  o.attestation = j.value("attestation", "none");
  return o;
}

json to_json(const RequestOptions& o) {
  return {
      {"challenge", base64url_encode(o.challenge)},
      {"rpId", o.rp_id},
      {"timeout", o.timeout.count()},
      {"allowCredentials", descriptor_list(o.allow_credentials)},
      {"userVerification", to_string(o.user_verification)},
  };
}

Result<RequestOptions> request_options_from_json(const json& j) {
  if (!j.is_object()) return bad("options must be an object");
  RequestOptions o;
  auto challenge = b64_field(j, "challenge");
  if (!challenge) return challenge.error();
  o.challenge = std::move(*challenge);
  o.rp_id = j.value("rpId", "");
  o.timeout = Duration(j.value("timeout", int64_t{0}));
  auto allow = parse_descriptor_list(j, "allowCredentials");
  if (!allow) return allow.error();
  o.allow_credentials = std::move(*allow);
  auto uv = parse_user_verification(j.value("userVerification", "preferred"));
  if (!uv) return uv.error();
  o.user_verification = *uv;
  return o;
}

json to_json(const AttestationResponse& r) {
  json out = {
      {"id", base64url_encode(r.raw_id)},
      {"rawId", base64url_encode(r.raw_id)},
      {"type", "public-key"},
      {"response",
       {{"clientDataJSON", base64url_encode(r.client_data_json)},
        {"attestationObject", base64url_encode(r.attestation_object)}}},
      {"clientExtensionResults", json::object()},
  };
  if (r.resident_key) {
    out["clientExtensionResults"]["credProps"] = {{"rk", *r.resident_key}};
  }
  return out;
}

Result<AttestationResponse> attestation_response_from_json(const json& j) {
  if (!j.is_object() || !j.contains("response") || !j["response"].is_object()) {
    return bad("attestation must carry a response object");
  }
  if (j.value("type", "") != "public-key") return bad("type must be public-key");
  AttestationResponse r;
  auto raw_id = b64_field(j, "rawId");
  auto cdj = b64_field(j["response"], "clientDataJSON");
  auto att = b64_field(j["response"], "attestationObject");
  if (!raw_id) return raw_id.error();
  if (!cdj) return cdj.error();
  if (!att) return att.error();
  r.raw_id = std::move(*raw_id);
  r.client_data_json = std::move(*cdj);
  r.attestation_object = std::move(*att);
  if (j.contains("clientExtensionResults")) {
    const auto& ext = j["clientExtensionResults"];
    if (ext.is_object() && ext.contains("credProps") &&
        ext["credProps"].is_object() && ext["credProps"].contains("rk") &&
        ext["credProps"]["rk"].is_boolean()) {
      r.resident_key = ext["credProps"]["rk"].get<bool>();
    }
  }
  return r;
}

json to_json(const AssertionResponse& r) {
  json response = {
      {"clientDataJSON", base64url_encode(r.client_data_json)},
      {"authenticatorData", base64url_encode(r.authenticator_data)},
      {"signature", base64url_encode(r.signature)},
  };
  if (r.user_handle) response["userHandle"] = base64url_encode(*r.user_handle);
  return {
      {"id", base64url_encode(r.raw_id)},
      {"rawId", base64url_encode(r.raw_id)},
      {"type", "public-key"},
      {"response", response},
      {"clientExtensionResults", json::object()},
  };
}

Result<AssertionResponse> assertion_response_from_json(const json& j) {
  if (!j.is_object() || !j.contains("response") || !j["response"].is_object()) {
    return bad("assertion must carry a response object");
  }
  if (j.value("type", "") != "public-key") return bad("type must be public-key");
  AssertionResponse r;
  const auto& resp = j["response"];
  auto raw_id = b64_field(j, "rawId");
  auto cdj = b64_field(resp, "clientDataJSON");
  auto ad = b64_field(resp, "authenticatorData");
  auto sig = b64_field(resp, "signature");
  if (!raw_id) return raw_id.error();
  if (!cdj) return cdj.error();
  if (!ad) return ad.error();
  if (!sig) return sig.error();
  r.raw_id = std::move(*raw_id);
  r.client_data_json = std::move(*cdj);
  r.authenticator_data = std::move(*ad);
  r.signature = std::move(*sig);
  if (resp.contains("userHandle") && !resp["userHandle"].is_null()) {
    auto uh = b64_field(resp, "userHandle");
    if (!uh) return uh.error();
    r.user_handle = std::move(*uh);
  }
  return r;
}

}  // namespace fido2cap::webauthn
