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

#ifndef FIDO2CAP_HTTP_HTTP_H_
#define FIDO2CAP_HTTP_HTTP_H_

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "fido2cap/common/result.h"

// Transport-neutral HTTP messages. Services are written as handlers over
// these so tests can drive them in process and the same code can sit behind
// a real socket.
namespace fido2cap::http {

struct CaseInsensitiveLess {
  bool operator()(const std::string& a, const std::string& b) const;
};

using Headers = std::map<std::string, std::string, CaseInsensitiveLess>;

struct Request {
  std::string method = "GET";
  std::string path = "/";
  std::map<std::string, std::string> query;
  Headers headers;
  std::string body;
  std::string remote_addr = "127.0.0.1";

  std::optional<std::string> header(const std::string& name) const;
  std::optional<std::string> cookie(std::string_view name) const;
  std::optional<std::string> query_param(const std::string& name) const;
};

struct Response {
  int status = 200;
  Headers headers;
  std::string body;

  std::string content_type() const;
};

using Handler = std::function<Response(const Request&)>;

Response text_response(int status, std::string body,
                       std::string content_type = "text/plain; charset=utf-8");

// Splits "/a/b?x=1&y=2" into path and decoded query parameters.
Status parse_target(std::string_view target, Request& out);

// Value of `name` from a Set-Cookie header, if that header sets it.
std::optional<std::string> set_cookie_value(const Response& response,
                                            std::string_view name);

}  // namespace fido2cap::http

#endif  // FIDO2CAP_HTTP_HTTP_H_
