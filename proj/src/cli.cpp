#include "skt/cli.hpp"

#include "skt/config.hpp"
#include "skt/studies.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace skt {

using nlohmann::json;

namespace {

void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out << std::setw(2) << j << '\n';
}

std::string describe_failure(const ConditionReport& r) {
  std::ostringstream msg;
  msg << "inadmissible model: neither coercivity condition holds (";
  if (!r.detailed_balance) {
    msg << "no detailed balance for the given weights";
  } else {
    msg << "detailed balance holds but alpha1 = " << *r.alpha1;
  }
  msg << "; self-diffusion condition alpha2 = " << r.alpha2 << ")";
  return msg.str();
}

json run_summary(const Simulator& sim, const EnsembleStats& stats) {
  json j = summarize(stats, sim.basis().modes_per_axis()).to_json();
  j["paths"] = sim.config().paths;
  j["blown_up_fraction"] = stats.blown_up_fraction();
  j["moment_order"] = stats.moment_order();
  j["sup_l2_pow_p"] = {{"mean", stats.sup_l2_pow_p().mean},
                       {"stderr", stats.sup_l2_pow_p().stderr_of_mean()}};
  if (sim.config().track_ito) {
    j["ito_residual"] = {{"mean", stats.ito_residual().mean},
                         {"stderr", stats.ito_residual().stderr_of_mean()}};
  }
  j["noise_growth_constant"] = sim.noise().growth_constant();
  if (auto v = sim.noise().vanishing_constant()) j["noise_vanishing_constant"] = *v;
  if (stats.completed() > 0) {
    const std::size_t last = stats.times().size() - 1;
    json fin = json::object();
    for (Field f : kAllFields) {
      const std::size_t ns = is_species_field(f) ? stats.species() : 1;
      json rows = json::array();
      for (std::size_t s = 0; s < ns; ++s) {
        const auto& m = stats.at(last, f, s);
        rows.push_back({{"mean", m.mean}, {"stderr", m.stderr_of_mean()}, {"p_moment", m.mean_p}});
      }
      fin[std::string(field_name(f))] = is_species_field(f) ? rows : rows[0];
    }
    j["final"] = fin;
  }
  return j;
}

}  // namespace

int run_experiment(const RunOptions& opts, std::ostream& log, std::ostream& err) {
  if (!std::filesystem::is_regular_file(opts.config)) {
    err << "error: config file not found: " << opts.config.string() << '\n';
    return kExitUsage;
  }
  ExperimentConfig cfg = load_config(opts.config, opts.overrides);
  if (opts.workers) cfg.sim.workers = *opts.workers;
  const std::optional<std::string> study = opts.study ? opts.study : cfg.study;
  if (study && std::find(kStudyNames.begin(), kStudyNames.end(), *study) == kStudyNames.end()) {
    err << "error: unknown study '" << *study << "'\n";
    return kExitUsage;
  }
  const std::filesystem::path dir =
      opts.output ? *opts.output : std::filesystem::path(cfg.output_dir.value_or("out"));
  std::filesystem::create_directories(dir);

  const Simulator sim = make_simulator(cfg);
  const ConditionReport& report = sim.conditions();
  json conditions = to_json(report);
  conditions["model"] = to_json(cfg.model);
  write_json(dir / "conditions.json", conditions);
  write_json(dir / "manifest.json",
             {{"tool", "skt-spde"},
              {"version", SKT_SPDE_VERSION},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"seed", cfg.noise.seed},
              {"rng", "philox4x32-10, counter (block, step, path)"},
              {"study", study ? json(*study) : json(nullptr)},
              {"overrides", opts.overrides},
              {"config", cfg.source}});
  if (!report.admissible) {
    err << "error: " << describe_failure(report) << '\n';
    return kExitInadmissible;
  }

  const bool self_contained = study && (*study == "heat" || *study == "moment");
  json summary;
  int code = kExitOk;
  if (self_contained) {
    std::ofstream(dir / "stats.csv") << kStatsCsvHeader << '\n';
  } else {
    log << "running " << cfg.sim.paths << " paths, " << cfg.sim.steps() << " steps each\n";
    const EnsembleStats stats = sim.run_ensemble();
    export_csv(stats, dir / "stats.csv");
    summary = run_summary(sim, stats);
    if (!stats.within_blowup_budget()) {
      err << "error: " << stats.blown_up() << " of " << cfg.sim.paths
          << " paths blew up (budget 1%)\n";
      code = kExitBlowUp;
    }
  }
  if (study && code == kExitOk) {
    log << "running study " << *study << '\n';
    summary["study"] = run_study(*study, cfg);
  }
  write_json(dir / "summary.json", summary);
  log << "wrote " << dir.string() << '\n';
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin ensembles for stochastic cross-diffusion systems", "skt-spde"};
  app.set_version_flag("--version", SKT_SPDE_VERSION);
  app.require_subcommand(1);
  RunOptions opts;
  std::string config;
  unsigned workers = 0;
  std::string output;
  std::string study;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Experiment JSON file")->required();
  run->add_option("--set", opts.overrides, "Override a config value, e.g. sim.dt=1e-4")
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  auto* w = run->add_option("--workers", workers, "Worker threads (default: all cores)");
  auto* o = run->add_option("--output", output, "Output directory");
  auto* s = run->add_option("--study", study, "Canned study")->check(CLI::IsMember(kStudyNames));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  opts.config = config;
  if (*w) opts.workers = workers;
  if (*o) opts.output = output;
  if (*s) opts.study = study;

  try {
    return run_experiment(opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace skt
