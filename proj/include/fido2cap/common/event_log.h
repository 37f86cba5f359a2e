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

#ifndef FIDO2CAP_COMMON_EVENT_LOG_H_
#define FIDO2CAP_COMMON_EVENT_LOG_H_

#include <mutex>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fido2cap/common/clock.h"

namespace fido2cap {

struct Event {
  Timestamp at;
  std::string component;
  std::string name;
  std::vector<std::pair<std::string, std::string>> fields;

  // "<iso8601> <component> <name> k1=v1 k2=v2", fields in insertion order.
  std::string to_line() const;
  const std::string* field(std::string_view key) const;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void emit(Event event) = 0;
};

// Records every event in memory and optionally mirrors lines to a stream.
class EventLog final : public EventSink {
 public:
  explicit EventLog(std::ostream* mirror = nullptr) : mirror_(mirror) {}

  void emit(Event event) override;
  std::vector<Event> events() const;
  std::vector<Event> events_named(std::string_view component,
                                  std::string_view name) const;
  std::vector<std::string> lines() const;

 private:
  mutable std::mutex mu_;
  std::ostream* mirror_;
  std::vector<Event> events_;
};

// Helper so components can log without null checks.
class EventEmitter {
 public:
  EventEmitter(std::string component, const Clock& clock, EventSink* sink)
      : component_(std::move(component)), clock_(clock), sink_(sink) {}

  void operator()(std::string name,
                  std::vector<std::pair<std::string, std::string>> fields =
                      {}) const {
    if (sink_ == nullptr) return;
    sink_->emit(Event{clock_.now(), component_, std::move(name),
                      std::move(fields)});
  }

 private:
  std::string component_;
  const Clock& clock_;
  EventSink* sink_;
};

}  // namespace fido2cap

#endif  // FIDO2CAP_COMMON_EVENT_LOG_H_
