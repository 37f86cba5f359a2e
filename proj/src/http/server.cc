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

#include "fido2cap/http/server.h"

#include <httplib.h>

namespace fido2cap::http {
namespace {

Request from_httplib(const httplib::Request& req) {
  Request out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [k, v] : req.params) out.query.emplace(k, v);
  for (const auto& [k, v] : req.headers) out.headers.emplace(k, v);
  out.body = req.body;
  out.remote_addr = req.remote_addr;
  return out;
}

}  // namespace

struct Server::Impl {
  httplib::Server server;
  Handler handler;
};

Server::Server(Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = impl_->handler(from_httplib(req));
    res.status = r.status;
    std::string type = r.content_type();
    for (const auto& [k, v] : r.headers) {
      if (strcasecmp(k.c_str(), "Content-Type") != 0) res.set_header(k, v);
    }
    res.set_content(r.body, type.empty() ? "text/plain" : type);
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
}

Server::~Server() { stop(); }

Status Server::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ <= 0) return Error(Errc::kTransportError, "cannot bind " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      return Error(Errc::kTransportError,
                   "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return {};
}

void Server::stop() {
  if (thread_.joinable()) {
    impl_->server.stop();
    thread_.join();
  }
}

Handler remote_handler(const std::string& host, int port, int timeout_ms) {
  auto client = std::make_shared<httplib::Client>(host, port);
  client->set_connection_timeout(0, timeout_ms * 1000);
  client->set_read_timeout(0, timeout_ms * 1000);
  auto mu = std::make_shared<std::mutex>();
  return [client, mu](const Request& req) {
    httplib::Headers headers;
    for (const auto& [k, v] : req.headers) {
      if (strcasecmp(k.c_str(), "Content-Type") != 0) headers.emplace(k, v);
    }
    std::string target = req.path;
    char sep = '?';
    for (const auto& [k, v] : req.query) {
      target += sep + httplib::detail::encode_query_param(k) + "=" +
                httplib::detail::encode_query_param(v);
      sep = '&';
    }
    std::string type = "text/plain";
    if (auto t = req.header("Content-Type")) type = *t;
    std::lock_guard lock(*mu);
    httplib::Result res =
        req.method == "POST"
            ? client->Post(target, headers, req.body, type)
            : client->Get(target, headers);
    Response out;
    if (!res) {
      out.status = 0;
      out.body = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    out.body = res->body;
    return out;
  };
}

}  // namespace fido2cap::http
