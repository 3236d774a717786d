// Copyright 2026 The LAE Authors
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

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "lae/common/error.hpp"
#include "lae/harness/checks.hpp"
#include "lae/harness/config.hpp"
#include "lae/harness/experiments.hpp"
#include "lae/harness/idx.hpp"
#include "lae/harness/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lae;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Experiment seed");
  cmd->add_option("--out", flags.out, "Output directory");
}

harness::ExperimentConfig resolve(const std::string& kind, const CommonFlags& flags) {
  harness::ExperimentConfig cfg = harness::default_config(kind);
  if (!flags.config.empty()) {
    std::ifstream is(flags.config);
    if (!is) throw ConfigError("cannot read " + flags.config);
    harness::apply_config(cfg, is);
  }
  cfg.kind = kind;
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

int selftest(const fs::path& ref, const fs::path& out, bool update) {
  int failures = 0;
  for (const auto& file : harness::selftest_artifacts()) {
    if (!out.empty()) {
      fs::create_directories(out);
      std::ofstream(out / file.name, std::ios::binary) << file.contents;
    }
    if (update) {
      fs::create_directories(ref);
      std::ofstream(ref / file.name, std::ios::binary) << file.contents;
      std::cout << "wrote " << (ref / file.name).string() << '\n';
      continue;
    }
    if (!fs::exists(ref / file.name)) {
      std::cout << "MISSING " << file.name << '\n';
      ++failures;
    } else if (slurp(ref / file.name) != file.contents) {
      std::cout << "DIFF " << file.name << '\n';
      ++failures;
    } else {
      std::cout << "MATCH " << file.name << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amortized Langevin dynamics and the Langevin autoencoder"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* kind;
    const char* help;
  };
  const Command commands[] = {
      {"sample-ld", "sample-ld", "Per-datapoint Langevin sampling on the conjugate Gaussian model"},
      {"sample-ald", "conjugate-ald", "Amortized Langevin sampling on the conjugate Gaussian model"},
      {"ablate-capacity", "capacity-ablation", "Feature-dimension ablation on the conjugate Gaussian model"},
      {"neural-posterior", "neural-posterior", "ALD against Gaussian VI on a neural decoder with a grid oracle"},
      {"train-lae", "train-lae", "Train a Langevin autoencoder on images"},
      {"train-ae", "train-ae", "Train the prior-regularized autoencoder baseline"},
      {"train-vae", "train-vae", "Train a variational autoencoder"},
      {"train-hoffman", "train-hoffman", "Train a VAE whose latents are refined by Langevin steps"},
      {"eval-elbo", "eval-elbo", "Held-out negative ELBO per dimension of a saved checkpoint"},
  };
  CommonFlags flags;
  std::string checkpoint;
  std::string chosen_kind;
  for (const auto& c : commands) {
    auto* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, flags);
    if (std::string(c.name) == "eval-elbo") cmd->add_option("--checkpoint", checkpoint, "Checkpoint file");
    cmd->callback([&chosen_kind, kind = c.kind] { chosen_kind = kind; });
  }

  std::string ref_dir = LAE_SELFTEST_REFERENCE_DIR;
  std::string selftest_out;
  bool update_ref = false;
  auto* st = app.add_subcommand("selftest", "Rerun fixed-seed checks and compare against reference CSVs");
  st->add_option("--ref", ref_dir, "Reference directory");
  st->add_option("--out", selftest_out, "Also write the regenerated CSVs here");
  st->add_flag("--update-ref", update_ref, "Overwrite the references with the regenerated CSVs");

  std::string digits_out;
  std::size_t digits_count = 5120;
  std::uint64_t digits_seed = 1;
  auto* gd = app.add_subcommand("gen-digits", "Write procedurally drawn 28x28 digits as IDX files");
  gd->add_option("--out", digits_out, "Output directory")->required();
  gd->add_option("--count", digits_count, "Number of images");
  gd->add_option("--seed", digits_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (st->parsed()) return selftest(ref_dir, selftest_out, update_ref);
    if (gd->parsed()) {
      std::vector<std::uint8_t> labels;
      const auto images = harness::synthetic_digits(digits_count, digits_seed, &labels);
      fs::create_directories(digits_out);
      harness::write_idx_images(fs::path(digits_out) / "images-idx3-ubyte", images);
      harness::write_idx_labels(fs::path(digits_out) / "labels-idx1-ubyte", labels);
      return 0;
    }
    harness::ExperimentConfig cfg = resolve(chosen_kind, flags);
    if (!checkpoint.empty()) cfg.data.checkpoint = checkpoint;
    return harness::run_experiment(cfg, std::cout);
  } catch (const lae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
