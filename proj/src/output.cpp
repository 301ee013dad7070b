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

#include "atomswitch/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace atomswitch {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument(
        fmt::format("row has {} values for {} columns", row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) {
      return i;
    }
  }
  throw std::out_of_range("no column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back(r[c]);
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  return fmt::format("{:.10g}", v);
}

std::string config_header(const std::string& command, const std::vector<std::string>& notes,
                          const RunConfig& cfg) {
  std::string out = fmt::format("# atomswitch {}\n# command: {}\n", kVersion, command);
  for (const std::string& n : notes) {
    out += "# " + n + "\n";
  }
  out += "# config:\n";
  std::istringstream ini(cfg.to_ini());
  std::string line;
  while (std::getline(ini, line)) {
    // Execution details do not change results.
    if (line.rfind("workers =", 0) == 0 || line.rfind("out =", 0) == 0) {
      continue;
    }
    out += line.empty() ? "#\n" : "#   " + line + "\n";
  }
  return out;
}

std::string format_table(const std::string& command, const std::vector<std::string>& notes,
                         const RunConfig& cfg, const Table& table) {
  std::string out = config_header(command, notes, cfg);
  out += fmt::format("{}\n", fmt::join(table.columns, ","));
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

void write_table(const std::filesystem::path& path, const std::string& command,
                 const std::vector<std::string>& notes, const RunConfig& cfg, const Table& table) {
  write_text(path, format_table(command, notes, cfg, table));
}

TableFile parse_table(const std::string& text) {
  TableFile file;
  std::istringstream in(text);
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line[0] == '#') {
      file.header.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (!have_columns) {
      file.table.columns = cells;
      have_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      double v = 0.0;
      if (c == "nan") {
        v = std::nan("");
      } else {
        const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc() || ptr != c.data() + c.size()) {
          throw std::runtime_error("malformed table cell '" + c + "'");
        }
      }
      row.push_back(v);
    }
    file.table.add_row(std::move(row));
  }
  return file;
}

TableFile read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str());
}

}  // namespace atomswitch
