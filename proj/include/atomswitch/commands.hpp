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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomswitch/config.hpp"

namespace atomswitch {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitStatus : int {
  kExitSuccess = 0,
  kExitUsage = 1,
  kExitConfigInvalid = 2,
  kExitNumerical = 3,
};

struct CommandOptions {
  bool no_atom = false;  // empty resonator only
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;
  int status = kExitSuccess;
};

// Each command writes its tables below cfg.run.out.
CommandResult cmd_spectrum(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_g2(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_kappa_sweep(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_fit(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_transit(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_metrics(const RunConfig& cfg, const CommandOptions& options = {});
CommandResult cmd_project(const RunConfig& cfg, const CommandOptions& options = {});

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atomswitch
