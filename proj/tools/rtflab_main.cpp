// tools/rtflab_main.cpp

// Copyright 2026  rtflab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rtflab/config.hpp"
#include "rtflab/experiment.hpp"
#include "rtflab/identities.hpp"

namespace {

rtflab::ExperimentConfig load_experiment_config(const std::string& config_path,
                                                std::uint64_t seed, bool seed_set,
                                                const std::string& out_dir,
                                                const std::string& estimators) {
  rtflab::Config file;
  if (!config_path.empty()) file = rtflab::Config::load(config_path);
  if (seed_set) file.set("scene.seed", std::to_string(seed));
  if (!out_dir.empty()) file.set("output.dir", out_dir);
  if (!estimators.empty()) file.set("estimators", estimators);
  return rtflab::experiment_config_from(file);
}

int run_verify(std::uint64_t seed, std::size_t trials) {
  const std::vector<rtflab::CheckResult> results = rtflab::verify_identities(seed, trials);
  bool all_pass = true;
  for (const rtflab::CheckResult& r : results) {
    std::printf("%s %-34s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all_pass &= r.pass;
  }
  return all_pass ? 0 : 1;
}

int run_report(const std::string& dir) {
  std::ifstream snr(dir + "/snr.csv");
  if (!snr) {
    std::fprintf(stderr, "no snr.csv under %s (run `rtflab run` first)\n", dir.c_str());
    return 2;
  }
  std::string line;
  std::getline(snr, line);  // header
  std::printf("%-10s %s\n", "estimator", "delta_snr_db");
  while (std::getline(snr, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    std::printf("%-10s %s\n", line.substr(0, comma).c_str(), line.substr(comma + 1).c_str());
  }

  std::ifstream weights(dir + "/weights.csv");
  if (weights) {
    std::string header, first, last;
    std::getline(weights, header);
    while (std::getline(weights, line))
      if (!line.empty()) {
        if (first.empty()) first = line;
        last = line;
      }
    if (!first.empty()) {
      std::printf("weights.csv columns: %s\n", header.c_str());
      std::printf("first frame: %s\n", first.c_str());
      std::printf("last frame:  %s\n", last.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-coherence RTF estimation laboratory"};
  app.require_subcommand(0, 1);

  bool dump_defaults = false;
  app.add_flag("--dump-defaults", dump_defaults,
               "Print the default configuration (all keys) and exit");

  std::string config_path, out_dir, estimators;
  std::uint64_t seed = 0;
  bool seed_set = false;
  auto add_common = [&](CLI::App* cmd, bool with_estimators) {
    cmd->add_option("--config", config_path, "Configuration file (key = value lines)");
    cmd->add_option("--seed", seed, "Scene seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--out", out_dir, "Output directory override");
    if (with_estimators)
      cmd->add_option("--estimators", estimators,
                      "Comma list: sc1,sc2,...,gevd,model (overrides config)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a scene and write WAVs + metadata");
  add_common(simulate, false);

  CLI::App* run = app.add_subcommand("run", "Run the full estimation/beamforming experiment");
  add_common(run, true);

  CLI::App* verify =
      app.add_subcommand("verify", "Run the constructed-covariance identity battery");
  std::uint64_t verify_seed = 1;
  std::size_t verify_trials = 200;
  verify->add_option("--seed", verify_seed, "Battery seed");
  verify->add_option("--trials", verify_trials, "Randomized trials per check");

  CLI::App* report = app.add_subcommand("report", "Summarize a finished run directory");
  std::string report_dir = "out";
  report->add_option("--out", report_dir, "Run directory to summarize");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump_defaults) {
      std::fputs(
          rtflab::experiment_config_to_config(rtflab::default_experiment_config())
              .serialize()
              .c_str(),
          stdout);
      return 0;
    }
    if (app.got_subcommand(verify)) return run_verify(verify_seed, verify_trials);
    if (app.got_subcommand(report)) return run_report(report_dir);

    if (app.got_subcommand(simulate)) {
      rtflab::ExperimentConfig cfg =
          load_experiment_config(config_path, seed, seed_set, out_dir, estimators);
      rtflab::LabeledRecording rec = rtflab::render_scene(cfg.scene, cfg.stft);
      rtflab::write_scene_files(cfg.output_dir, rec, cfg.scene, cfg.stft);
      std::printf("scene written to %s (%zu segments, %zu frames)\n", cfg.output_dir.c_str(),
                  rec.segment_start_times.size(), rec.vad.size());
      return 0;
    }
    if (app.got_subcommand(run)) {
      rtflab::ExperimentConfig cfg =
          load_experiment_config(config_path, seed, seed_set, out_dir, estimators);
      rtflab::ExperimentReport rep = rtflab::run_experiment(cfg);
      std::printf("input SNR: %.2f dB\n", rep.input_snr_db);
      for (const rtflab::EstimatorResult& res : rep.estimators)
        std::printf("%-8s output %.2f dB  delta %.2f dB  (gevd fallbacks: %llu)\n",
                    res.name.c_str(), res.output_snr_db, res.delta_snr_db,
                    static_cast<unsigned long long>(res.fallback_count));
      std::printf("outputs in %s\n", cfg.output_dir.c_str());
      return 0;
    }
    std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const rtflab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
