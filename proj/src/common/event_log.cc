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

#include "fido2cap/common/event_log.h"

namespace fido2cap {

std::string Event::to_line() const {
  std::string line = format_iso8601(at);
  line += ' ';
  line += component;
  line += ' ';
  line += name;
  for (const auto& [k, v] : fields) {
    line += ' ';
    line += k;
    line += '=';
    line += v;
  }
  return line;
}

const std::string* Event::field(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

void EventLog::emit(Event event) {
  std::lock_guard lock(mu_);
  if (mirror_ != nullptr) *mirror_ << event.to_line() << '\n' << std::flush;
  events_.push_back(std::move(event));
}

std::vector<Event> EventLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<Event> EventLog::events_named(std::string_view component,
                                          std::string_view name) const {
  std::lock_guard lock(mu_);
  std::vector<Event> out;
  for (const auto& e : events_) {
    if (e.component == component && e.name == name) out.push_back(e);
  }
  return out;
}

std::vector<std::string> EventLog::lines() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.to_line());
  return out;
}

}  // namespace fido2cap
