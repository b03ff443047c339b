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

#include "tfn/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tfn/ablation.hpp"
#include "tfn/binary_io.hpp"
#include "tfn/checkpoint.hpp"
#include "tfn/error.hpp"
#include "tfn/selfcheck.hpp"
#include "tfn/serve.hpp"

namespace tfn::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSynthKeys = {
    "n-total", "n-fraud", "a", "b", "c", "sigma", "d-sig", "amplitude"};
const std::vector<std::string> kTrainKeys = {
    "data",    "folds",   "jobs",     "model-size", "lr-max",  "lr-min",
    "batch-size", "max-epochs", "t-max", "weight-decay", "beta1", "beta2",
    "eps",     "dropout", "patience", "val-fraction"};

model::Dims dims_for(const AppConfig& cfg) {
  if (cfg.model_size == "full") return model::Dims::full();
  if (cfg.model_size == "scaled") return model::Dims::scaled();
  throw ConfigurationError("model-size must be full or scaled, got '" +
                           cfg.model_size + "'");
}

void prepare_out_dir(const AppConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.out_dir + ": " + ec.message());
  io::write_text(fs::path(cfg.out_dir) / "resolved.conf", render_config(cfg));
}

data::Dataset load_or_generate(const AppConfig& cfg, const model::Dims& dims) {
  data::Dataset ds;
  if (cfg.data.empty()) {
    data::SynthConfig synth = cfg.synth;
    synth.feature_dim = dims.input;
    ds = data::generate_synthetic(synth);
  } else {
    ds = data::load_dataset(cfg.data);
  }
  data::validate(ds, dims.input);
  return ds;
}

std::vector<model::Variant> parse_variant_list(const std::string& text) {
  if (text == "all") {
    return {model::kAllVariants.begin(), model::kAllVariants.end()};
  }
  std::vector<model::Variant> out;
  std::stringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) out.push_back(model::parse_variant(name));
  if (out.empty()) throw ConfigurationError("variants: empty list");
  return out;
}

train::CvOptions cv_options(const AppConfig& cfg, std::ostream& err) {
  train::CvOptions opts;
  opts.dims = dims_for(cfg);
  opts.jobs = cfg.jobs;
  const std::size_t k = cfg.folds;
  opts.on_fold = [&err, k](model::Variant v, const train::FoldResult& f) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%s fold %zu/%zu: test f1 %.4f acc %.4f (best epoch %zu of %zu)\n",
                  std::string(model::variant_name(v)).c_str(), f.fold + 1, k,
                  f.test.f1, f.test.accuracy, f.history.best_epoch,
                  f.history.epochs.size());
    err << buf << std::flush;
  };
  return opts;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kValidation: return kExitUsage;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kRuntime: break;
  }
  return kExitRuntime;
}

bool is_default_generator(const data::SynthConfig& s) {
  data::SynthConfig d;
  return s.n_total == d.n_total && s.n_fraud == d.n_fraud && s.a == d.a &&
         s.b == d.b && s.c == d.c && s.sigma == d.sigma;
}

}  // namespace

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int cmd_gen_data(const AppConfig& cfg, std::ostream& out) {
  data::validate(cfg.synth);
  const data::Format format = data::parse_format(cfg.format);
  prepare_out_dir(cfg);
  const fs::path path =
      cfg.output.empty()
          ? fs::path(cfg.out_dir) /
                (format == data::Format::kBinary ? "dataset.bin" : "dataset.jsonl")
          : fs::path(cfg.output);
  const data::Dataset ds = data::generate_synthetic(cfg.synth);
  data::save_dataset(ds, path, format);

  char buf[160];
  out << "wrote " << ds.size() << " records to " << path.string() << "\n";
  out << "fraud " << ds.count_label(data::kFraud) << ", legit "
      << ds.count_label(data::kLegit) << "\n";
  if (is_default_generator(cfg.synth)) {
    std::snprintf(buf, sizeof buf,
                  "Bayes ceiling (latent-sign oracle): %.4f, committed "
                  "Monte-Carlo estimate\n",
                  data::kDefaultBayesCeiling);
  } else {
    std::snprintf(buf, sizeof buf,
                  "Bayes ceiling (latent-sign oracle): %.4f, closed form\n",
                  data::bayes_ceiling_exact(cfg.synth));
  }
  out << buf;
  return kExitOk;
}

int cmd_train(const AppConfig& cfg, std::ostream& out, std::ostream& err) {
  const model::Variant variant = model::parse_variant(cfg.variant);
  train::validate(cfg.train);
  const auto opts = cv_options(cfg, err);
  const data::Dataset ds = load_or_generate(cfg, opts.dims);
  const auto plan = data::stratified_kfold(ds, cfg.folds, cfg.seed);
  prepare_out_dir(cfg);

  const auto cv = train::run_cv(ds, plan, variant, cfg.train, opts);
  const fs::path dir(cfg.out_dir);
  for (const auto& f : cv.folds) {
    const std::string stem = "fold" + std::to_string(f.fold);
    model::save_params(f.params, dir / (stem + ".tfnm"));
    io::write_text(dir / (stem + "_history.csv"), f.history.to_csv());
    for (const auto& w : f.history.warnings) err << stem << ": " << w << "\n";
  }
  io::write_text(dir / "report.json",
                 eval::cv_report_json(cv, cfg.train, ds.provenance));

  eval::AblationReport table;
  table.rows.push_back({variant, cfg.train.seed, cv});
  out << table.to_text();
  return kExitOk;
}

int cmd_ablate(const AppConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto variants = parse_variant_list(cfg.variants);
  train::validate(cfg.train);
  const auto opts = cv_options(cfg, err);
  const data::Dataset ds = load_or_generate(cfg, opts.dims);
  const auto plan = data::stratified_kfold(ds, cfg.folds, cfg.seed);
  prepare_out_dir(cfg);

  const auto report = eval::run_ablation(ds, plan, variants, cfg.train, opts);
  const fs::path dir(cfg.out_dir);
  io::write_text(dir / "ablation.json", report.to_json());
  io::write_text(dir / "ablation.csv", report.to_csv());
  io::write_text(dir / "ablation.txt", report.to_text());
  out << report.to_text();
  return kExitOk;
}

int cmd_infer(const AppConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err) {
  if (cfg.checkpoint.empty()) throw ConfigurationError("infer: --checkpoint is required");
  const InferenceEngine engine(model::load_params(cfg.checkpoint),
                               cfg.train.threshold);
  std::ifstream file;
  std::istream* src = &in;
  if (cfg.input != "-") {
    file.open(cfg.input);
    if (!file) throw IoError("cannot open " + cfg.input);
    src = &file;
  }
  bool failed = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*src, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out << format_response(engine.infer(parse_request(line, engine.input_dim())))
          << "\n";
    } catch (const Error& e) {
      err << "line " << line_no << ": " << e.what() << "\n";
      failed = true;
    }
  }
  return failed ? kExitUsage : kExitOk;
}

int cmd_serve(const AppConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err) {
  if (cfg.checkpoint.empty()) throw ConfigurationError("serve: --checkpoint is required");
  const Transport transport = parse_transport(cfg.transport);
  const InferenceEngine engine(model::load_params(cfg.checkpoint),
                               cfg.train.threshold);
  LatencyStats stats;
  if (transport.tcp) {
    TcpServer server(engine, transport.host, transport.port, stats);
    err << "listening on " << transport.host << ":" << server.port() << "\n"
        << std::flush;
    server.run(stop_flag());
  } else {
    serve_stream(engine, in, out, stats);
  }
  err << stats.report() << std::flush;
  return kExitOk;
}

int cmd_gradcheck(const AppConfig& cfg, bool inject_fault, std::ostream& out) {
  model::testing::set_backward_fault(inject_fault);
  std::vector<model::VariantGradCheck> results;
  try {
    results = model::check_all_gradients(model::Dims::scaled(), cfg.seed);
  } catch (...) {
    model::testing::set_backward_fault(false);
    throw;
  }
  model::testing::set_backward_fault(false);

  bool ok = true;
  for (const auto& r : results) {
    const bool pass = r.result.max_rel_error < numkit::kGradCheckTolerance;
    ok = ok && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s params %6zu  max rel error %.3e  %s\n",
                  std::string(model::variant_name(r.variant)).c_str(),
                  r.parameters, r.result.max_rel_error, pass ? "ok" : "FAIL");
    out << buf;
  }
  return ok ? kExitOk : kExitRuntime;
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Tensor fusion fraud classifier on paired video/audio features"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::map<std::string, std::string> flags;
  const auto add_key = [&flags](CLI::App* cmd, const std::string& key) {
    const Setting* s = find_setting(key);
    cmd->add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags[key] = v; },
        s->help)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };

  app.add_option("--config", config_path, "flat key = value configuration file");
  for (const char* key : {"seed", "threshold", "out-dir"}) add_key(&app, key);

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  for (const auto& k : kSynthKeys) add_key(gen, k);
  add_key(gen, "format");
  add_key(gen, "output");

  auto* trn = app.add_subcommand("train", "cross-validate one variant");
  for (const auto& k : kTrainKeys) add_key(trn, k);
  for (const auto& k : kSynthKeys) add_key(trn, k);
  add_key(trn, "variant");

  auto* abl = app.add_subcommand("ablate", "cross-validate several variants");
  for (const auto& k : kTrainKeys) add_key(abl, k);
  for (const auto& k : kSynthKeys) add_key(abl, k);
  add_key(abl, "variants");

  auto* inf = app.add_subcommand("infer", "score JSONL records with a checkpoint");
  add_key(inf, "checkpoint");
  add_key(inf, "input");

  auto* srv = app.add_subcommand("serve", "stream inference over stdio or TCP");
  add_key(srv, "checkpoint");
  add_key(srv, "transport");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of every variant");
  bool inject_fault = false;
  grad->add_flag("--inject-fault", inject_fault,
                 "corrupt the backward pass to exercise the check")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    AppConfig cfg;
    if (!config_path.empty()) {
      const auto bytes = io::read_file(config_path);
      apply_settings(cfg, parse_config_text(std::string(bytes.begin(), bytes.end())));
    }
    apply_settings(cfg, flags);

    if (gen->parsed()) return cmd_gen_data(cfg, out);
    if (trn->parsed()) return cmd_train(cfg, out, err);
    if (abl->parsed()) return cmd_ablate(cfg, out, err);
    if (inf->parsed()) return cmd_infer(cfg, in, out, err);
    if (srv->parsed()) return cmd_serve(cfg, in, out, err);
    return cmd_gradcheck(cfg, inject_fault, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace tfn::cli
