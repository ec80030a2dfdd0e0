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

#ifndef OVRKIT_TEXT_HPP_
#define OVRKIT_TEXT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ovrkit::text {

/// Shortest decimal form that parses back to the identical double.
/// Infinities print as "inf" / "-inf".
std::string format_double(double value);

std::optional<double> parse_double(std::string_view token);
std::optional<std::int64_t> parse_int(std::string_view token);

std::string_view trim(std::string_view s);

/// Splits on any run of whitespace; no empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);

/// Splits on a single delimiter; keeps empty fields.
std::vector<std::string_view> split(std::string_view s, char delim);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace ovrkit::text

#endif  // OVRKIT_TEXT_HPP_
