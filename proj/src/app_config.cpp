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

#include "tfn/app_config.hpp"

#include <charconv>
#include <sstream>

#include "tfn/error.hpp"

namespace tfn::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigurationError(key + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[40];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

template <typename Get>
Setting real_setting(std::string key, std::string help, Get field) {
  Setting s{key, std::move(help), nullptr, nullptr};
  s.set = [key, field](AppConfig& c, const std::string& v) {
    field(c) = parse_number<double>(key, v);
  };
  s.get = [field](const AppConfig& c) {
    return format_double(field(c));
  };
  return s;
}

template <typename Get>
Setting count_setting(std::string key, std::string help, Get field) {
  Setting s{key, std::move(help), nullptr, nullptr};
  s.set = [key, field](AppConfig& c, const std::string& v) {
    field(c) = parse_number<std::size_t>(key, v);
  };
  s.get = [field](const AppConfig& c) {
    return std::to_string(field(c));
  };
  return s;
}

template <typename Get>
Setting text_setting(std::string key, std::string help, Get field) {
  Setting s{key, std::move(help), nullptr, nullptr};
  s.set = [field](AppConfig& c, const std::string& v) { field(c) = v; };
  s.get = [field](const AppConfig& c) {
    return field(c);
  };
  return s;
}

std::vector<Setting> build_settings() {
  std::vector<Setting> s;
  Setting seed{"seed", "master seed for generation, folds and training",
               nullptr, nullptr};
  seed.set = [](AppConfig& c, const std::string& v) {
    c.seed = parse_number<std::uint64_t>("seed", v);
  };
  seed.get = [](const AppConfig& c) { return std::to_string(c.seed); };
  s.push_back(seed);
  s.push_back(real_setting("threshold", "fraud iff probability >= threshold",
                           [](auto& c) -> auto& { return c.train.threshold; }));
  s.push_back(text_setting("out-dir", "directory for run artifacts",
                           [](auto& c) -> auto& { return c.out_dir; }));
  s.push_back(text_setting("data", "dataset path (binary or JSONL); empty generates one",
                           [](auto& c) -> auto& { return c.data; }));
  s.push_back(text_setting("format", "dataset format written by gen-data: binary | jsonl",
                           [](auto& c) -> auto& { return c.format; }));
  s.push_back(text_setting("output", "gen-data output file",
                           [](auto& c) -> auto& { return c.output; }));
  s.push_back(text_setting("variant", "model variant for train",
                           [](auto& c) -> auto& { return c.variant; }));
  s.push_back(text_setting("variants", "comma-separated variants for ablate, or 'all'",
                           [](auto& c) -> auto& { return c.variants; }));
  s.push_back(count_setting("folds", "cross-validation folds",
                            [](auto& c) -> auto& { return c.folds; }));
  s.push_back(count_setting("jobs", "folds trained concurrently",
                            [](auto& c) -> auto& { return c.jobs; }));
  s.push_back(text_setting("model-size", "layer widths: full | scaled",
                           [](auto& c) -> auto& { return c.model_size; }));
  s.push_back(real_setting("lr-max", "peak learning rate",
                           [](auto& c) -> auto& { return c.train.lr_max; }));
  s.push_back(real_setting("lr-min", "cosine floor learning rate",
                           [](auto& c) -> auto& { return c.train.lr_min; }));
  s.push_back(count_setting("batch-size", "minibatch size",
                            [](auto& c) -> auto& { return c.train.batch_size; }));
  s.push_back(count_setting("max-epochs", "epoch budget",
                            [](auto& c) -> auto& { return c.train.max_epochs; }));
  s.push_back(count_setting("t-max", "cosine period in epochs (0 = max-epochs)",
                            [](auto& c) -> auto& { return c.train.t_max; }));
  s.push_back(real_setting("weight-decay", "decoupled weight decay",
                           [](auto& c) -> auto& { return c.train.weight_decay; }));
  s.push_back(real_setting("beta1", "Adam first-moment decay",
                           [](auto& c) -> auto& { return c.train.beta1; }));
  s.push_back(real_setting("beta2", "Adam second-moment decay",
                           [](auto& c) -> auto& { return c.train.beta2; }));
  s.push_back(real_setting("eps", "Adam denominator epsilon",
                           [](auto& c) -> auto& { return c.train.eps; }));
  s.push_back(real_setting("dropout", "head dropout probability",
                           [](auto& c) -> auto& { return c.train.dropout_p; }));
  s.push_back(count_setting("patience", "early-stopping patience in epochs",
                            [](auto& c) -> auto& { return c.train.patience; }));
  s.push_back(real_setting("val-fraction", "share of each training split held out for early stopping",
                           [](auto& c) -> auto& { return c.train.val_fraction; }));
  s.push_back(count_setting("n-total", "synthetic records",
                            [](auto& c) -> auto& { return c.synth.n_total; }));
  s.push_back(count_setting("n-fraud", "synthetic fraud records",
                            [](auto& c) -> auto& { return c.synth.n_fraud; }));
  s.push_back(real_setting("a", "video sign weight in the label score",
                           [](auto& c) -> auto& { return c.synth.a; }));
  s.push_back(real_setting("b", "audio sign weight in the label score",
                           [](auto& c) -> auto& { return c.synth.b; }));
  s.push_back(real_setting("c", "interaction weight in the label score",
                           [](auto& c) -> auto& { return c.synth.c; }));
  s.push_back(real_setting("sigma", "label score noise",
                           [](auto& c) -> auto& { return c.synth.sigma; }));
  s.push_back(count_setting("d-sig", "signal-carrying feature dimensions",
                            [](auto& c) -> auto& { return c.synth.d_sig; }));
  s.push_back(real_setting("amplitude", "mean shift of signal dimensions",
                           [](auto& c) -> auto& { return c.synth.amplitude; }));
  s.push_back(text_setting("checkpoint", "model checkpoint for infer and serve",
                           [](auto& c) -> auto& { return c.checkpoint; }));
  s.push_back(text_setting("input", "infer input file, '-' for stdin",
                           [](auto& c) -> auto& { return c.input; }));
  s.push_back(text_setting("transport", "serve transport: stdio | tcp:<port> | tcp:<host>:<port>",
                           [](auto& c) -> auto& { return c.transport; }));
  return s;
}

}  // namespace

void AppConfig::sync() {
  synth.seed = seed;
  train.seed = seed;
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> all = build_settings();
  return all;
}

const Setting* find_setting(const std::string& key) {
  for (const auto& s : settings()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (!find_setting(key)) {
      throw ConfigurationError("config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_settings(AppConfig& cfg, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const Setting* s = find_setting(key);
    if (!s) throw ConfigurationError("unknown setting '" + key + "'");
    s->set(cfg, value);
  }
  cfg.sync();
}

std::string render_config(const AppConfig& cfg) {
  std::string out = "# resolved configuration\n";
  for (const auto& s : settings()) {
    out += s.key + " = " + s.get(cfg) + "\n";
  }
  return out;
}

}  // namespace tfn::cli
