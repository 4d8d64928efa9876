// Copyright 2026 The narm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace narm {

/// Writes `contents` to a sibling temporary file and renames it over
/// `path`, so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Non-empty, non-comment lines of a text file together with their 1-based
/// line numbers.
struct TextLine {
  std::size_t number;
  std::string text;
};
std::vector<TextLine> read_data_lines(const std::filesystem::path& path);

/// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_fields(std::string_view line);

/// Strict integer/real parsing; throws DataError tagged with `line`.
unsigned long long parse_index(std::string_view token, std::size_t line);
double parse_real(std::string_view token, std::size_t line);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

/// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace narm
