// Copyright 2026 The ovrkit Authors
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

#ifndef OVRKIT_LOG_HPP_
#define OVRKIT_LOG_HPP_

#include <chrono>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

namespace ovrkit {

enum class LogLevel : int { kInfo = 0, kWarning = 1 };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink (default: stderr). Passing an empty
/// function restores the default.
void set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);
inline void log_info(std::string_view message) { log(LogLevel::kInfo, message); }
inline void log_warning(std::string_view message) { log(LogLevel::kWarning, message); }

/// Logs "<phase>: <seconds>s" at info level when it goes out of scope.
class PhaseTimer {
 public:
  explicit PhaseTimer(std::string phase)
      : phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
  PhaseTimer(const PhaseTimer&) = delete;
  PhaseTimer& operator=(const PhaseTimer&) = delete;
  ~PhaseTimer();

 private:
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace ovrkit

#endif  // OVRKIT_LOG_HPP_
