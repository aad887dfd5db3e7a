#include "experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpm/detector.hpp"
#include "cpm/e_model.hpp"
#include "cpm/fock.hpp"
#include "cpm/sd_model.hpp"
#include "cpm/trajectories.hpp"

namespace cpm::tools {

namespace {

DetectorParams to_params(const ExperimentConfig& config) {
  DetectorParams p;
  p.eta = config.eta;
  p.dark = config.dark;
  p.cavity = config.cavity;
  p.validate();
  return p;
}

std::vector<double> time_grid(const ExperimentConfig& config, double def_min,
                              double def_max, int def_points) {
  const double lo = config.tmin >= 0.0 ? config.tmin : def_min;
  const double hi = config.tmax >= 0.0 ? config.tmax : def_max;
  const int n = config.points >= 2 ? config.points : def_points;
  if (hi <= lo) throw std::invalid_argument("time grid: tmax must exceed tmin");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

DiagonalFockState build_state(const StateKind& kind, const ExperimentConfig& config) {
  return make_state(kind, config.nmax);
}

std::vector<StateKind> selected_states(const ExperimentConfig& config, double nbar) {
  std::vector<StateKind> kinds;
  const auto want = [&](const char* name) {
    return config.state == "all" || config.state == name;
  };
  if (want("coherent")) kinds.push_back(StateKind::coherent(nbar));
  if (want("number")) kinds.push_back(StateKind::number(static_cast<int>(std::llround(nbar))));
  if (want("thermal")) kinds.push_back(StateKind::thermal(nbar));
  if (kinds.empty()) throw std::invalid_argument("unknown state: " + config.state);
  return kinds;
}

bool want_model(const ExperimentConfig& config, const char* name) {
  if (config.model == "both") return true;
  if (config.model != "sd" && config.model != "e") {
    throw std::invalid_argument("unknown model: " + config.model);
  }
  return config.model == name;
}

std::string json_escape_free(const std::string& value) {
  // Config fields are plain identifiers/paths; quote them directly.
  std::string out;
  for (const char c : value) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  std::string json = "{";
  const auto add = [&json](const std::string& key, const std::string& value,
                           bool quote) {
    if (json.size() > 1) json += ", ";
    json += "\"" + key + "\": ";
    json += quote ? "\"" + json_escape_free(value) + "\"" : value;
  };
  add("model", model, true);
  add("state", state, true);
  add("nbar", format_number(nbar), false);
  add("eta", format_number(eta), false);
  add("dark", format_number(dark), false);
  add("cavity", format_number(cavity), false);
  add("tmin", format_number(tmin), false);
  add("tmax", format_number(tmax), false);
  add("points", std::to_string(points), false);
  add("nmax", std::to_string(nmax), false);
  add("mmax", std::to_string(mmax), false);
  add("traj", std::to_string(traj), false);
  add("seed", std::to_string(seed), false);
  add("threads", std::to_string(threads), false);
  add("format", format, true);
  json += "}";
  return json;
}

Table figure1_table(const ExperimentConfig& config) {
  const DetectorParams params = to_params(config);
  const std::vector<double> grid = time_grid(config, 0.0, 250.0, 201);
  const std::vector<double> nbars =
      config.nbar > 0.0 ? std::vector<double>{config.nbar}
                        : std::vector<double>{50.0, 100.0};

  Table table;
  table.config_json = config.to_json();
  table.columns = {"lambda_t"};
  struct Series {
    bool e_model;
    DiagonalFockState state;
  };
  std::vector<Series> series;
  for (const double nbar : nbars) {
    const std::string suffix = "_nbar" + format_number(nbar);
    if (want_model(config, "sd")) {
      // State independent: any family with this mean gives the same curve.
      table.columns.push_back("sd" + suffix);
      series.push_back({false, build_state(StateKind::coherent(nbar), config)});
    }
    if (want_model(config, "e")) {
      for (const StateKind& kind : selected_states(config, nbar)) {
        table.columns.push_back("e_" + to_string(kind.family) + suffix);
        series.push_back({true, build_state(kind, config)});
      }
    }
  }
  for (const double lt : grid) {
    std::vector<double> row{lt};
    for (const Series& s : series) {
      row.push_back(s.e_model ? emodel::mean_counts(s.state, params, lt)
                              : sd::mean_counts(s.state, params, lt));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table figure2_table(const ExperimentConfig& config) {
  const DetectorParams params = to_params(config);
  const std::vector<double> grid = time_grid(config, 0.01, 200.0, 201);
  const double nbar = config.nbar > 0.0 ? config.nbar : 50.0;
  const DiagonalFockState number =
      build_state(StateKind::number(static_cast<int>(std::llround(nbar))), config);
  const DiagonalFockState thermal = build_state(StateKind::thermal(nbar), config);

  Table table;
  table.config_json = config.to_json();
  table.columns = {"lambda_t"};
  if (want_model(config, "sd")) {
    table.columns.push_back("sd_number");
    table.columns.push_back("sd_thermal");
  }
  if (want_model(config, "e")) {
    table.columns.push_back("e_number");
    table.columns.push_back("e_thermal");
  }
  for (const double lt : grid) {
    std::vector<double> row{lt};
    if (want_model(config, "sd")) {
      row.push_back(sd::k_factor(number, params, lt).value_or(0.0));
      row.push_back(sd::k_factor(thermal, params, lt).value_or(0.0));
    }
    if (want_model(config, "e")) {
      row.push_back(emodel::k_factor(number, params, lt).value_or(0.0));
      row.push_back(emodel::k_factor(thermal, params, lt).value_or(0.0));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table figure3_table(const ExperimentConfig& config) {
  const DetectorParams params = to_params(config);
  const std::vector<double> grid = time_grid(config, 0.01, 600.0, 121);
  const double nbar = config.nbar > 0.0 ? config.nbar : 100.0;
  const double window = emodel::default_waiting_window(params);
  const DiagonalFockState number =
      build_state(StateKind::number(static_cast<int>(std::llround(nbar))), config);
  const DiagonalFockState thermal = build_state(StateKind::thermal(nbar), config);

  Table table;
  table.config_json = config.to_json();
  table.columns = {"lambda_t"};
  struct Series {
    bool e_model;
    const DiagonalFockState* state;
  };
  std::vector<Series> series;
  const auto add_series = [&](const char* model, bool e_model) {
    for (const auto& [name, state] :
         {std::pair{"number", &number}, std::pair{"thermal", &thermal}}) {
      table.columns.push_back(std::string(model) + "_" + name + "_ncav");
      table.columns.push_back(std::string(model) + "_" + name + "_tau");
      series.push_back({e_model, state});
    }
  };
  if (want_model(config, "sd")) add_series("sd", false);
  if (want_model(config, "e")) add_series("e", true);

  for (const double lt : grid) {
    std::vector<double> row{lt};
    for (const Series& s : series) {
      if (s.e_model) {
        row.push_back(emodel::n_cav(*s.state, params, lt));
        row.push_back(emodel::mean_waiting(*s.state, params, lt, window).value_or(0.0));
      } else {
        row.push_back(sd::n_cav(*s.state, params, lt));
        row.push_back(sd::mean_waiting(*s.state, params, lt, window).value_or(0.0));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table trajectories_table(const ExperimentConfig& config) {
  if (config.model == "both") {
    throw std::invalid_argument("trajectories needs --model sd or --model e");
  }
  const bool e_model = !want_model(config, "sd");
  const DetectorParams params = to_params(config);
  const std::vector<double> grid =
      time_grid(config, e_model ? 20.0 : 0.5, e_model ? 200.0 : 5.0, 10);
  const double nbar = config.nbar > 0.0 ? config.nbar : 50.0;
  const std::string state_name = config.state == "all" ? "coherent" : config.state;
  ExperimentConfig named = config;
  named.state = state_name;
  const DiagonalFockState state = build_state(selected_states(named, nbar).front(), config);

  const traj::EnsembleStats stats = traj::estimate_count_moments(
      state, params, e_model ? traj::Model::e : traj::Model::sd, grid,
      config.traj, config.seed, config.threads);

  Table table;
  table.config_json = config.to_json();
  table.columns = {"lambda_t",    "analytic_mean", "mc_mean", "mc_mean_se",
                   "analytic_m2", "mc_m2",         "mc_m2_se"};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double lt = grid[k];
    const double mean = e_model ? emodel::mean_counts(state, params, lt)
                                : sd::mean_counts(state, params, lt);
    const double m2 = e_model ? emodel::second_factorial_moment(state, params, lt)
                              : sd::second_factorial_moment(state, params, lt);
    table.rows.push_back({lt, mean, stats.mean_counts[k].value,
                          stats.mean_counts[k].std_error, m2,
                          stats.second_factorial[k].value,
                          stats.second_factorial[k].std_error});
  }
  return table;
}

}  // namespace cpm::tools
