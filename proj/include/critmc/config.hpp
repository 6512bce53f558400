#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critmc/histogram.hpp"
#include "critmc/model.hpp"

namespace critmc {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_no = 0)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) +
                                             ": " + msg
                                       : msg),
        line(line_no) {}
  int line = 0;
};

enum class EstimatorChoice { Ratio, Ladder, Both };

// One run, fully resolved: model, sizes, seeding, grids, output. The
// canonical serialization (and its fingerprint) is embedded in every
// artifact so results are traceable to the exact configuration.
struct RunConfig {
  ModelSpec model;

  std::uint64_t seed = 1;
  int replicas = 1;
  std::uint64_t steps = 1'000'000;   // total across replicas
  std::uint64_t cycles = 100'000;    // total across replicas
  std::uint64_t burn_in_cycles = 1000;
  std::uint64_t cycle_cap = 100'000'000;
  EstimatorChoice estimator = EstimatorChoice::Ratio;
  int workers = 0;
  bool x0_auto = true;
  double x0 = 0.0;
  int thin_fresh_draw = 1;
  std::uint64_t mc_draws = 25'000;  // per replica per grid point

  HistogramGeometry geometry;
  double x_lo = 0.0, x_hi = 14.0, x_step = 1.0 / 16.0;
  bool window_auto = false;
  double window_lo = 8.0, window_hi = 12.0;
  std::vector<std::pair<double, double>> pairs{{1.0, 2.718281828459045}};
  double gamma = 0.5;
  double kesten_window_lo = 20.0, kesten_window_hi = 3000.0;

  std::string out_dir = "out";
  bool force = false;

  std::vector<double> x_grid() const;
  std::string canonical() const;    // resolved, ordered key = value text
  std::string fingerprint() const;  // 64-bit FNV-1a of canonical(), hex
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace critmc
