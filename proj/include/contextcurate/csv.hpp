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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctxcur::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: comma separated, double-quote escaping, quoted fields
/// may span lines. CRLF and LF both end a record. Blank lines are skipped.
/// Throws InputError on an unterminated quote.
std::vector<Record> parse(std::string_view text);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace ctxcur::csv
