#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "loopsoup/errors.hpp"

namespace {

using loopsoup::cli::RunSpec;

struct Flags {
  RunSpec spec;
  std::string grid, output = "csv";
  double a = 0, rho = 0, mu = 0, tol = 0;
  std::int64_t q = 0, N = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  RunSpec& s = f.spec;
  sub->add_option("--d", s.d, "spatial dimension (>= 3)")->capture_default_str();
  sub->add_option("--beta", s.beta, "inverse temperature")->capture_default_str();
  sub->add_option("--a", f.a, "mean-field repulsion (default 0; 2 for pressure-gap)");
  sub->add_option("--b", s.b, "counter-term strength")->capture_default_str();
  sub->add_option("--rho", f.rho, "particle density");
  sub->add_option("--mu", f.mu, "chemical potential");
  sub->add_option("--q", f.q, "long-loop cut-off (default ceil(V^0.75))");
  sub->add_option("--volume,--V", s.volume, "volume |Lambda|")->capture_default_str();
  sub->add_option("--N", f.N, "particle number");
  sub->add_option("--grid", f.grid, "start:stop:points");
  sub->add_option("--seed", s.seed, "random seed")->capture_default_str();
  sub->add_option("--chains", s.chains, "independent chains")->capture_default_str();
  sub->add_option("--sweeps", s.sweeps, "sweeps per chain")->capture_default_str();
  sub->add_option("--burn-in", s.burn_in, "discarded sweeps per chain")->capture_default_str();
  sub->add_option("--output", f.output, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--out", s.out_path, "output path (default stdout)");
  sub->add_option("--tol", f.tol, "tolerance override");
}

void resolve(CLI::App* sub, Flags& f) {
  RunSpec& s = f.spec;
  s.command = sub->get_name();
  if (sub->count("--a")) s.a = f.a;
  if (sub->count("--rho")) s.rho = f.rho;
  if (sub->count("--mu")) s.mu = f.mu;
  if (sub->count("--q")) s.q = f.q;
  if (sub->count("--N")) s.N = f.N;
  if (sub->count("--tol")) s.tol = f.tol;
  if (sub->count("--grid")) s.grid = loopsoup::cli::Grid::parse(f.grid);
  s.output = f.output == "json" ? loopsoup::cli::Format::json : loopsoup::cli::Format::csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-soup condensation toolkit"};
  app.require_subcommand(1);
  Flags f;
  RunSpec& s = f.spec;

  auto* phase = app.add_subcommand("phase-diagram", "condensate density over a rho or mu grid");
  add_common(phase, f);
  phase->add_option("--ensemble", s.ensemble, "canonical or gc")
      ->check(CLI::IsMember({"canonical", "gc"}))
      ->capture_default_str();

  auto* validate = app.add_subcommand("validate", "run validation suites");
  add_common(validate, f);
  validate->add_option("suites", s.suites, "asymptotics | finite-volume | mc-vs-exact | pressure-gap");
  validate->add_option("--jmax", s.jmax, "pressure-gap truncation")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the long-loop or particle density");
  add_common(sim, f);
  sim->add_option("--ensemble", s.ensemble, "canonical or gc")
      ->check(CLI::IsMember({"canonical", "gc"}))
      ->capture_default_str();
  sim->add_option("--interaction", s.interaction, "free, pmf or hyl (gc only)")
      ->check(CLI::IsMember({"free", "pmf", "hyl"}))
      ->capture_default_str();
  sim->add_option("--trace", s.trace_path, "per-sweep trace CSV");

  auto* gap = app.add_subcommand("pressure-gap", "full vs partial HYL pressure gap");
  add_common(gap, f);
  gap->add_option("--jmax", s.jmax, "starting truncation")->capture_default_str();

  auto* gmf = app.add_subcommand("gmf", "minimise I + G for a tabulated mean-field G");
  add_common(gmf, f);
  gmf->add_option("--table", s.table, "CSV with columns x,G")->required();

  auto* fv = app.add_subcommand("finite-volume", "exact finite-volume tables");
  add_common(fv, f);
  fv->add_option("--table", s.table, "pmf, long-mass or spectrum")
      ->check(CLI::IsMember({"pmf", "long-mass", "spectrum"}))
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    resolve(sub, f);
    if (sub == phase) return loopsoup::cli::cmd_phase_diagram(s);
    if (sub == validate) return loopsoup::cli::cmd_validate(s);
    if (sub == sim) return loopsoup::cli::cmd_simulate(s);
    if (sub == gap) return loopsoup::cli::cmd_pressure_gap(s);
    if (sub == gmf) return loopsoup::cli::cmd_gmf(s);
    if (sub == fv) return loopsoup::cli::cmd_finite_volume(s);
  } catch (const std::invalid_argument& e) {  // ConfigError
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
