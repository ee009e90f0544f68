// losstomo: loss-landscape tomography experiments from the command line.
//
// Subcommands map one-to-one onto experiment kinds; each runs a sweep (or
// estimate) and writes CSV/JSON/SVG artifacts under --out. Without --config
// the built-in defaults run; --dump-config prints them for editing.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tomo/config.hpp"
#include "tomo/error.hpp"
#include "tomo/runner.hpp"

namespace {

int exit_code_for(tomo::Error::Kind kind) {
  switch (kind) {
    case tomo::Error::Kind::config:
      return 2;
    case tomo::Error::Kind::io:
      return 3;
    default:
      return 4;
  }
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string workers;
  bool svg = false;
  bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed (u64)");
  cmd->add_option("--workers", flags.workers, "worker thread count");
  cmd->add_flag("--svg", flags.svg, "write phase-map SVGs");
  cmd->add_flag("--dump-config", flags.dump_config,
                "print the effective config as JSON and exit");
}

int run_kind(tomo::ExperimentKind kind, const CommonFlags& flags) {
  tomo::ExperimentConfig cfg =
      flags.config_path.empty() ? tomo::default_config(kind)
                                : tomo::load_config_file(flags.config_path, kind);

  // Precedence for workers: config < LOSSTOMO_WORKERS < --workers.
  if (const char* env = std::getenv("LOSSTOMO_WORKERS")) {
    cfg.workers = static_cast<std::size_t>(std::stoull(env));
  }
  if (!flags.workers.empty()) {
    cfg.workers = static_cast<std::size_t>(std::stoull(flags.workers));
  }
  if (!flags.seed.empty()) cfg.master_seed = std::stoull(flags.seed);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.svg) cfg.svg = true;

  if (flags.dump_config) {
    std::cout << tomo::config_to_json(cfg, true);
    return 0;
  }

  const tomo::SweepResult result = tomo::run_experiment(cfg);
  std::cout << cfg.experiment << ": wrote " << result.files_written.size()
            << " files under " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loss-landscape tomography toolkit"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    tomo::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"quadratic-sweep", "phase transition on a synthetic quadratic well",
       tomo::ExperimentKind::quadratic_sweep},
      {"nn-sweep", "random/burn-in subspace training phase maps for an MLP",
       tomo::ExperimentKind::nn_sweep},
      {"width-estimate", "Monte Carlo ellipsoid widths against the analytic bounds",
       tomo::ExperimentKind::width_estimate},
      {"affine-distance", "distance scaling between random affine subspaces",
       tomo::ExperimentKind::affine_distance},
      {"lottery", "lottery subspaces from trajectory SVD vs random baselines",
       tomo::ExperimentKind::lottery},
      {"ticket", "magnitude-pruned lottery tickets with rewinding",
       tomo::ExperimentKind::ticket},
  };

  CommonFlags flags[std::size(subs)];
  CLI::App* cmds[std::size(subs)];
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmds[i], flags[i]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < std::size(subs); ++i) {
      if (cmds[i]->parsed()) return run_kind(subs[i].kind, flags[i]);
    }
  } catch (const tomo::Error& e) {
    std::cerr << "error (" << static_cast<int>(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}
