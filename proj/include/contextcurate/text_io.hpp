// Copyright 2026 The ContextCurate Authors.
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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ctxcur {

/// Reads a whole file. Throws InputError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes (truncating) a whole file in binary mode so output is identical
/// across platforms. Throws InputError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that round-trips to the same double.
std::string format_shortest(double value);

/// Fixed-point with `decimals` places; NaN renders as `nan`.
std::string format_fixed(double value, int decimals);

/// Strict double parse of the whole string. std::nullopt on garbage.
std::optional<double> parse_double(std::string_view text);

std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace ctxcur
