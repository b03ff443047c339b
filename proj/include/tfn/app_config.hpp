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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tfn/data.hpp"
#include "tfn/train.hpp"

namespace tfn::cli {

// Everything a subcommand can be told, merged from defaults, a config file
// and command-line flags (in increasing precedence).
struct AppConfig {
  train::TrainConfig train;
  data::SynthConfig synth;
  std::uint64_t seed = 0;  // drives generation, fold assignment and training
  std::string out_dir = "out";
  std::string data;        // dataset path; empty means generate in-process
  std::string format = "binary";
  std::string output;      // gen-data target; empty means <out_dir>/dataset.*
  std::string variant = "tf-complete";
  std::string variants = "all";
  std::size_t folds = 5;
  std::size_t jobs = 1;
  std::string model_size = "full";  // full | scaled
  std::string checkpoint;
  std::string input = "-";
  std::string transport = "stdio";

  // Copies seed into the nested configs.
  void sync();
};

struct Setting {
  std::string key;
  std::string help;
  std::function<void(AppConfig&, const std::string&)> set;
  std::function<std::string(const AppConfig&)> get;
};

// Every recognised key, in the order the resolved config is written.
const std::vector<Setting>& settings();
const Setting* find_setting(const std::string& key);

// Config file grammar, one entry per line:
//   line    := blank | comment | entry
//   comment := ws* '#' any*
//   entry   := ws* key ws* '=' ws* value ws*
// Keys are the long flag names without dashes ("lr-max"). Later entries
// override earlier ones. Unknown keys and malformed lines throw
// ConfigurationError naming the line.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Applies key/value pairs in map order; throws ConfigurationError for
// unknown keys or unparsable values.
void apply_settings(AppConfig& cfg, const std::map<std::string, std::string>& values);

// All keys with their effective values, in the config file grammar.
std::string render_config(const AppConfig& cfg);

}  // namespace tfn::cli
