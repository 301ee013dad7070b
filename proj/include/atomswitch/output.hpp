// Copyright 2026 The atomswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Comma-delimited result tables with a '#'-prefixed provenance header.

#include <filesystem>
#include <string>
#include <vector>

#include "atomswitch/config.hpp"

namespace atomswitch {

inline constexpr const char* kVersion = "0.1.0";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  // Throws std::out_of_range for an unknown column.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

struct TableFile {
  std::vector<std::string> header;  // without the leading "# "
  Table table;
};

// Header layout: version line, command line, the caller's notes, then the
// resolved configuration in INI form.
std::string format_table(const std::string& command, const std::vector<std::string>& notes,
                         const RunConfig& cfg, const Table& table);
void write_table(const std::filesystem::path& path, const std::string& command,
                 const std::vector<std::string>& notes, const RunConfig& cfg, const Table& table);
void write_text(const std::filesystem::path& path, const std::string& text);

TableFile parse_table(const std::string& text);
TableFile read_table(const std::filesystem::path& path);

std::string format_number(double v);
std::string config_header(const std::string& command, const std::vector<std::string>& notes,
                          const RunConfig& cfg);

}  // namespace atomswitch
