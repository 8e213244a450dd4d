// Copyright 2026 The HxAgent Authors
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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hxagent::util {

// Number of Unicode scalar values in a UTF-8 string (continuation bytes are
// not counted). Invalid sequences count one per lead byte.
std::size_t utf8_length(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Case-folded, whitespace-collapsed form used for text comparisons.
std::string fold(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

std::string base64_encode(std::string_view bytes);
// Throws Error("invalid-base64") on malformed input.
std::string base64_decode(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temporary and rename, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void append_line(const std::filesystem::path& path, std::string_view line);

std::vector<std::string> split_lines(std::string_view text);

}  // namespace hxagent::util
