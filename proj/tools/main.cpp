// Command line front end: figure-style experiment tables, a Monte Carlo
// comparison run, and the acceptance validation suite.
//
//   cpm figure1|figure2|figure3|trajectories [options]
//   cpm validate [--traj N] [--seed S] [--threads T]
//
// Options compose with a JSON config file (--config); explicit flags win.
// Exit codes: 0 success, 1 validation/runtime failure, 2 usage or config
// error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "cpm/table.hpp"
#include "cpm/validation.hpp"
#include "experiments.hpp"
#include "json.hpp"

namespace {

using cpm::tools::ExperimentConfig;

struct CommandState {
  ExperimentConfig config;
  std::string config_path;
  std::map<std::string, CLI::Option*> options;
};

void add_common_options(CLI::App* cmd, CommandState& state) {
  auto& cfg = state.config;
  auto& opt = state.options;
  opt["model"] = cmd->add_option("--model", cfg.model, "sd, e, or both");
  opt["state"] = cmd->add_option("--state", cfg.state,
                                 "coherent, number, thermal, or all");
  opt["nbar"] = cmd->add_option("--nbar", cfg.nbar, "initial mean photon number");
  opt["eta"] = cmd->add_option("--eta", cfg.eta, "quantum efficiency in [0,1]");
  opt["dark"] = cmd->add_option("--dark", cfg.dark, "dark count rate ratio");
  opt["cavity"] = cmd->add_option("--cavity", cfg.cavity, "cavity damping ratio");
  opt["tmin"] = cmd->add_option("--tmin", cfg.tmin, "grid start (lambda t)");
  opt["tmax"] = cmd->add_option("--tmax", cfg.tmax, "grid end (lambda t)");
  opt["points"] = cmd->add_option("--points", cfg.points, "grid points (>= 2)");
  opt["nmax"] = cmd->add_option("--nmax", cfg.nmax, "Fock truncation override");
  opt["mmax"] = cmd->add_option("--mmax", cfg.mmax, "count support override");
  opt["traj"] = cmd->add_option("--traj", cfg.traj, "trajectory count");
  opt["seed"] = cmd->add_option("--seed", cfg.seed, "ensemble seed");
  opt["threads"] = cmd->add_option("--threads", cfg.threads,
                                   "worker threads (0 = hardware)");
  opt["out"] = cmd->add_option("--out", cfg.out, "output path");
  opt["format"] = cmd->add_option("--format", cfg.format, "csv or json");
  cmd->add_option("--config", state.config_path, "JSON config file");
}

// Fill every option the user did not pass explicitly from the config file.
void merge_config_file(CommandState& state) {
  if (state.config_path.empty()) return;
  std::ifstream in(state.config_path);
  if (!in) throw std::invalid_argument("cannot open config file: " + state.config_path);
  nlohmann::json json;
  in >> json;
  auto& cfg = state.config;
  const auto load = [&](const char* key, auto& field) {
    if (state.options.at(key)->count() > 0) return;  // flags win
    if (json.contains(key)) json.at(key).get_to(field);
  };
  load("model", cfg.model);
  load("state", cfg.state);
  load("nbar", cfg.nbar);
  load("eta", cfg.eta);
  load("dark", cfg.dark);
  load("cavity", cfg.cavity);
  load("tmin", cfg.tmin);
  load("tmax", cfg.tmax);
  load("points", cfg.points);
  load("nmax", cfg.nmax);
  load("mmax", cfg.mmax);
  load("traj", cfg.traj);
  load("seed", cfg.seed);
  load("threads", cfg.threads);
  load("out", cfg.out);
  load("format", cfg.format);
}

int write_table(const cpm::Table& table, const ExperimentConfig& cfg,
                const std::string& default_stem) {
  std::string path = cfg.out;
  if (path.empty()) {
    path = default_stem + (cfg.format == "json" ? ".json" : ".csv");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file: " << path << "\n";
    return 1;
  }
  out << (cfg.format == "json" ? cpm::to_json(table) : cpm::to_csv(table));
  if (!out) {
    std::cerr << "error: write failed: " << path << "\n";
    return 1;
  }
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous photodetection statistics"};
  app.require_subcommand(1);

  CommandState fig1, fig2, fig3, trajectories;
  add_common_options(app.add_subcommand("figure1", "mean counts versus time"), fig1);
  add_common_options(
      app.add_subcommand("figure2", "normalized second factorial moment"), fig2);
  add_common_options(
      app.add_subcommand("figure3", "mean waiting time and cavity photon number"),
      fig3);
  add_common_options(
      app.add_subcommand("trajectories", "Monte Carlo versus analytic moments"),
      trajectories);

  cpm::ValidationOptions validation;
  CLI::App* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--traj", validation.mc_trajectories, "trajectory count");
  validate->add_option("--seed", validation.seed, "ensemble seed");
  validate->add_option("--threads", validation.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) {
      const auto results = cpm::run_acceptance_criteria(validation);
      return cpm::print_report(std::cout, results) ? 0 : 1;
    }
    for (auto& [name, state] :
         {std::pair<std::string, CommandState*>{"figure1", &fig1},
          {"figure2", &fig2},
          {"figure3", &fig3},
          {"trajectories", &trajectories}}) {
      if (!app.get_subcommand(name)->parsed()) continue;
      merge_config_file(*state);
      if (state->config.format != "csv" && state->config.format != "json") {
        std::cerr << "error: unknown format: " << state->config.format << "\n";
        return 2;
      }
      cpm::Table table;
      if (name == "figure1") table = cpm::tools::figure1_table(state->config);
      if (name == "figure2") table = cpm::tools::figure2_table(state->config);
      if (name == "figure3") table = cpm::tools::figure3_table(state->config);
      if (name == "trajectories") {
        table = cpm::tools::trajectories_table(state->config);
      }
      return write_table(table, state->config, name);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
