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

#ifndef FIDO2CAP_HTTP_SERVER_H_
#define FIDO2CAP_HTTP_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "fido2cap/http/http.h"

namespace fido2cap::http {

// Serves a Handler over HTTP/1.1 on a background thread.
class Server {
 public:
  explicit Server(Handler handler);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // port 0 picks a free port. Errors: kTransportError on bind failure.
  Status start(const std::string& host, int port);
  // Lets in-flight requests finish, then stops accepting.
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

// Handler that forwards each request to a remote HTTP server. A request that
// never reaches the server yields status 0.
Handler remote_handler(const std::string& host, int port,
                       int timeout_ms = 2000);

}  // namespace fido2cap::http

#endif  // FIDO2CAP_HTTP_SERVER_H_
