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

#ifndef FIDO2CAP_COMMON_CLOCK_H_
#define FIDO2CAP_COMMON_CLOCK_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>

namespace fido2cap {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

inline int64_t to_unix_seconds(Timestamp t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch())
      .count();
}
inline Timestamp from_unix_seconds(int64_t s) {
  return Timestamp(std::chrono::seconds(s));
}

// "2026-01-01T00:00:00.000Z"
std::string format_iso8601(Timestamp t);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

// Manually advanced clock used by tests and scenario runs.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start = from_unix_seconds(1'767'225'600))
      : now_ms_(start.time_since_epoch().count()) {}

  Timestamp now() const override { return Timestamp(Duration(now_ms_.load())); }
  void advance(Duration d) { now_ms_ += d.count(); }
  void set(Timestamp t) { now_ms_ = t.time_since_epoch().count(); }

 private:
  std::atomic<int64_t> now_ms_;
};

}  // namespace fido2cap

#endif  // FIDO2CAP_COMMON_CLOCK_H_
