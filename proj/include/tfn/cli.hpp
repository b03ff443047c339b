// Copyright 2026 The tfnfraud Authors.
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

#include <atomic>
#include <iosfwd>

#include "tfn/app_config.hpp"

namespace tfn::cli {

// Exit statuses shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // validation or usage error
  kExitRuntime = 2,  // runtime or numeric failure
  kExitIo = 3,
};

// Parses argv, runs one subcommand and maps failures to exit codes. Normal
// output goes to `out`, diagnostics to `err`; `in` feeds infer and
// stdio serving.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

// Set from signal handlers to end serve mode gracefully.
std::atomic<bool>& stop_flag();

int cmd_gen_data(const AppConfig& cfg, std::ostream& out);
int cmd_train(const AppConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ablate(const AppConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_infer(const AppConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err);
int cmd_serve(const AppConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err);
int cmd_gradcheck(const AppConfig& cfg, bool inject_fault, std::ostream& out);

}  // namespace tfn::cli
