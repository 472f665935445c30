// Copyright 2026 The GDBR Authors
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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gdbr/config.h"
#include "gdbr/dataset.h"
#include "gdbr/error.h"
#include "gdbr/harness.h"
#include "gdbr/report.h"
#include "gdbr/verify.h"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out_dir;
};

void AddOverrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--reps", o.reps, "Repetitions per value (overrides the config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_dir, "Directory for report.json and trials.csv");
}

gdbr::ExperimentConfig Load(const std::string& path, const Overrides& o) {
  gdbr::ExperimentConfig config = gdbr::LoadConfig(path);
  if (o.seed) config.seed = *o.seed;
  if (o.reps) config.repetitions = *o.reps;
  return config;
}

void Emit(const gdbr::SweepReport& report, const Overrides& o) {
  gdbr::WriteSummary(report, std::cout);
  if (o.out_dir.empty()) return;
  const std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream json(dir / "report.json");
  json << gdbr::SerializeReport(report) << '\n';
  std::ofstream csv(dir / "trials.csv");
  gdbr::WriteTrialsCsv(report, csv);
  if (!json || !csv) throw gdbr::Error("failed writing reports to " + dir.string());
  std::cout << "wrote " << (dir / "report.json").string() << " and "
            << (dir / "trials.csv").string() << '\n';
}

std::vector<std::string> SplitList(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    std::stringstream in(item);
    std::string part;
    while (std::getline(in, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-bridge label recovery lab"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Run R trials of one configuration");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  AddOverrides(run, run_opts);

  Overrides sweep_opts;
  std::string sweep_config;
  std::string axis;
  std::vector<std::string> values;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one config field");
  sweep->add_option("config", sweep_config, "Experiment config (JSON)")->required();
  sweep->add_option("--axis", axis,
                    "batch_size | distribution | layer | prune_ratio | noise_sigma | "
                    "estimator | init")
      ->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();
  AddOverrides(sweep, sweep_opts);

  gdbr::VerifyOptions verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "Check every gradient identity");
  verify->add_option("--instances", verify_opts.instances, "Random instances per check")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_opts.seed, "Seed for the random instances");

  std::string spec_path;
  std::string out_path;
  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic dataset as CSV");
  gen->add_option("spec", spec_path, "Synthetic dataset spec (JSON)")->required();
  gen->add_option("out", out_path, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Emit(gdbr::RunExperiment(Load(run_config, run_opts)), run_opts);
    } else if (*sweep) {
      const gdbr::ExperimentConfig config = Load(sweep_config, sweep_opts);
      Emit(gdbr::RunSweep(config, gdbr::ParseSweepAxis(axis), SplitList(values)), sweep_opts);
    } else if (*verify) {
      bool ok = true;
      for (const gdbr::CheckResult& r : gdbr::RunVerifySuite(verify_opts)) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    } else if (*gen) {
      std::ifstream in(spec_path);
      if (!in) throw gdbr::ConfigError("cannot open spec " + spec_path);
      std::ostringstream text;
      text << in.rdbuf();
      const gdbr::Dataset data = gdbr::GenerateSynthetic(gdbr::ParseSyntheticSpec(text.str()));
      std::ofstream out(out_path);
      gdbr::WriteDatasetCsv(data, out);
      if (!out) throw gdbr::Error("failed writing " + out_path);
      std::cout << "wrote " << data.size() << " samples to " << out_path << '\n';
    }
  } catch (const gdbr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
