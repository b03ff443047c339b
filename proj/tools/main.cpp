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

#include <csignal>
#include <iostream>

#include "tfn/cli.hpp"

namespace {

void on_signal(int) { tfn::cli::stop_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  // No SA_RESTART: a blocked stdin read returns so serve can print its
  // latency summary before exiting.
  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
  std::ios::sync_with_stdio(false);
  return tfn::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
