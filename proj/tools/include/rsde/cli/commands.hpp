// Copyright 2026 The rsde Authors
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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rsde::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
};

struct CommandOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::string>> checks;
  int threads = 1;
  std::vector<std::string> argv;  // recorded in the manifest
};

// Runs one of simulate | verify | picard | couple | pde-compare.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

// Full command-line entry point.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsde::cli
