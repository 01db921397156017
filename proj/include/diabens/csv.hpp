/*
 * Copyright 2026 The diabens Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace diabens::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number in the source file for each row.
  std::vector<std::size_t> line_numbers;
};

// Comma separated, header row required, double-quoted fields allowed, blank
// lines skipped, UTF-8 BOM tolerated.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::vector<std::string> split_line(std::string_view line);

// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

// Strict parse of a whole cell; returns false on trailing garbage or empty.
bool parse_double(std::string_view text, double& out);

void write_text(const std::filesystem::path& path, std::string_view content);
void append_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

}  // namespace diabens::csv
