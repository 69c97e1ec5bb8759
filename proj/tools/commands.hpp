#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "output.hpp"

namespace loopsoup::cli {

struct Grid {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  static Grid parse(const std::string& text);  // "start:stop:points"
  std::vector<double> values() const;
};

struct RunSpec {
  std::string command;
  int d = 3;
  double beta = 1.0;
  std::optional<double> a;  // pressure-gap defaults to 2, everything else to 0
  double b = 1.0;
  std::optional<double> rho;
  std::optional<double> mu;
  std::optional<std::int64_t> q;
  double volume = 1000.0;
  std::optional<std::int64_t> N;
  std::optional<Grid> grid;
  std::uint64_t seed = 1;
  int chains = 1;
  std::int64_t sweeps = 10000;
  std::int64_t burn_in = 1000;
  Format output = Format::csv;
  std::string out_path;
  std::optional<double> tol;

  std::string ensemble = "canonical";
  std::string interaction = "hyl";
  std::vector<std::string> suites;
  std::string trace_path;
  std::string table;        // finite-volume: pmf | long-mass | spectrum; gmf: CSV path
  std::int64_t jmax = 500;  // pressure-gap starting truncation

  nlohmann::json to_json() const;
};

// Each returns a process exit code: 0 success/all pass, 1 validation failure.
// Bad flag combinations raise loopsoup::ConfigError (exit 2 in main).
int cmd_phase_diagram(const RunSpec& s);
int cmd_validate(const RunSpec& s);
int cmd_simulate(const RunSpec& s);
int cmd_pressure_gap(const RunSpec& s);
int cmd_gmf(const RunSpec& s);
int cmd_finite_volume(const RunSpec& s);

const std::vector<std::string>& validation_suites();

}  // namespace loopsoup::cli
