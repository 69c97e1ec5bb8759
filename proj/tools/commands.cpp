#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "loopsoup/condensate.hpp"
#include "loopsoup/errors.hpp"
#include "loopsoup/finite_volume.hpp"
#include "loopsoup/full_hyl.hpp"
#include "loopsoup/monte_carlo.hpp"
#include "loopsoup/thermo.hpp"

namespace loopsoup::cli {

using nlohmann::json;

Grid Grid::parse(const std::string& text) {
  Grid g;
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c) || c.find(':') != std::string::npos)
    throw ConfigError("--grid expects start:stop:points");
  try {
    std::size_t pos = 0;
    g.start = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    g.stop = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    g.points = std::stoi(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    throw ConfigError("--grid expects start:stop:points, got '" + text + "'");
  }
  if (g.points < 2) throw ConfigError("--grid needs at least 2 points");
  if (!(g.start < g.stop)) throw ConfigError("--grid needs start < stop");
  return g;
}

std::vector<double> Grid::values() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[i] = start + (stop - start) * i / (points - 1);
  v.back() = stop;
  return v;
}

json RunSpec::to_json() const {
  json j;
  j["command"] = command;
  j["d"] = d;
  j["beta"] = beta;
  j["a"] = a ? json(*a) : json(nullptr);
  j["b"] = b;
  j["rho"] = rho ? json(*rho) : json(nullptr);
  j["mu"] = mu ? json(*mu) : json(nullptr);
  j["q"] = q ? json(*q) : json(nullptr);
  j["volume"] = volume;
  j["N"] = N ? json(*N) : json(nullptr);
  j["grid"] = grid ? json{{"start", grid->start}, {"stop", grid->stop}, {"points", grid->points}} : json(nullptr);
  j["seed"] = seed;
  j["chains"] = chains;
  j["sweeps"] = sweeps;
  j["burn_in"] = burn_in;
  j["output"] = output == Format::csv ? "csv" : "json";
  j["out"] = out_path;
  j["tol"] = tol ? json(*tol) : json(nullptr);
  j["ensemble"] = ensemble;
  j["interaction"] = interaction;
  j["suites"] = suites;
  j["trace"] = trace_path;
  j["table"] = table;
  j["jmax"] = jmax;
  return j;
}

namespace {

ModelParams model_params(const RunSpec& s) {
  ModelParams p{s.d, s.beta};
  p.validate();
  return p;
}

FiniteVolumeModel fv_model(const RunSpec& s, double V) {
  FiniteVolumeModel m;
  m.V = V;
  m.params = model_params(s);
  m.hyl = HYLParams{s.a.value_or(0.0), s.b};
  m.q = s.q ? *s.q : FiniteVolumeModel::default_q(V);
  m.mu = s.mu.value_or(0.0);
  m.validate();
  return m;
}

void finish(const RunSpec& s, const Table& t) {
  std::ostringstream os;
  write_table(os, s.output, s.command, s.to_json(), t);
  emit(s.out_path, os.str());
}

// Evaluates f on every grid point with one worker per hardware thread; rows keep grid order.
std::vector<std::vector<Cell>> sweep_grid(const std::vector<double>& xs,
                                          const std::function<std::vector<Cell>(double)>& f) {
  std::vector<std::vector<Cell>> rows(xs.size());
  std::vector<std::string> errors(xs.size());
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), xs.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < xs.size(); i += workers) {
        try {
          rows[i] = f(xs[i]);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (!e.empty()) throw NumericalFailure(e);
  return rows;
}

// ---- validation suites ----

struct Check {
  std::string suite;
  std::string name;
  double measured;
  double tolerance;
  bool pass;
  bool info = false;  // reported, not counted
};

void add_check(std::vector<Check>& out, const std::string& suite, const std::string& name, double measured,
               double tol, bool pass) {
  out.push_back({suite, name, measured, tol, pass});
}

void add_info(std::vector<Check>& out, const std::string& suite, const std::string& name, double measured) {
  out.push_back({suite, name, measured, 0.0, true, true});
}

void suite_asymptotics(const RunSpec& s, std::vector<Check>& out) {
  ModelParams p = model_params(s);
  const std::string S = "asymptotics";
  std::vector<double> hs;
  if (p.d == 3 || p.d == 5) hs = {1e-2, 1e-3, 1e-4};
  else if (p.d == 4) hs = {1e-3, 1e-4, 1e-5, 1e-6};
  else throw ConfigError("validate asymptotics supports --d 3, 4 or 5");
  std::vector<double> dev;
  for (double h : hs) {
    auto c = asymptotics_validator(p, AsymptoticKind::rate_near_rc, h);
    dev.push_back(std::fabs(c.ratio - 1.0));
    std::ostringstream nm;
    nm << "h=" << h;
    add_info(out, S, "rate ratio " + nm.str(), c.ratio);
    add_info(out, S, "re-derived rate ratio " + nm.str(), c.corrected_ratio);
  }
  if (p.d != 4) {
    double tol = s.tol.value_or(p.d == 3 ? 0.02 : 0.01);
    add_check(out, S, "|rate ratio - 1| at h=1e-4", dev.back(), tol, dev.back() <= tol);
  }
  if (p.d != 5) {
    bool dec = true;
    for (std::size_t i = 1; i < dev.size(); ++i) dec = dec && dev[i] < dev[i - 1];
    add_check(out, S, "|rate ratio - 1| decreasing as h shrinks", dev.back(), 0.0, dec);
  }
}

void suite_finite_volume(const RunSpec& s, std::vector<Check>& out) {
  const std::string S = "finite-volume";
  ModelParams p = model_params(s);
  {
    FiniteVolumeModel m = fv_model(s, 5.0);
    m.q = 1;
    m.mu = 0.0;
    auto rec = free_canonical_log_pmf(m, 20);
    auto brute = long_sector_log_weights(m, 20, 0.0, LongSectorMethod::enumeration);
    double worst = 0.0;
    for (int n = 0; n <= 20; ++n) worst = std::max(worst, std::fabs(rec[n] - brute[n]) / std::max(1.0, std::fabs(brute[n])));
    add_check(out, S, "recursion vs enumeration (N<=20, V=5)", worst, 1e-12, worst <= 1e-12);
  }
  const double V = s.volume;
  const double rc = critical_density(p);
  {
    FiniteVolumeModel m = fv_model(s, V);
    m.mu = 0.0;
    auto y = static_cast<std::int64_t>(std::floor(0.5 * rc * V));
    auto c = short_sector_check(m, y);
    double tol = s.tol.value_or(0.05);
    add_check(out, S, "short-sector ratio at y=rho_c V/2", c.ratio, tol, std::fabs(c.ratio - 1.0) <= tol);
  }
  {
    FiniteVolumeModel m = fv_model(s, V);
    m.mu = 0.0;
    auto lw = long_sector_log_weights(m, static_cast<std::int64_t>(2 * V), 0.0);
    double lo = 1e300, hi = -1e300;
    const double dd = p.d;
    for (auto x = static_cast<std::int64_t>(std::ceil(V / 2)); x <= static_cast<std::int64_t>(2 * V); ++x) {
      double r = std::exp(lw[x]) * std::pow(p.beta * x, dd / 2 + 1) / (p.beta * V * p.cd());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    add_check(out, S, "long-mass law ratio min, x in [V/2,2V]", lo, 0.1, lo >= 0.9);
    add_check(out, S, "long-mass law ratio max, x in [V/2,2V]", hi, 0.1, hi <= 1.1);
  }
  {
    FiniteVolumeModel m = fv_model(s, V);
    m.mu = 0.0;
    if (!s.q) m.q = static_cast<std::int64_t>(std::ceil(std::pow(V, 0.7)));
    double rho = s.rho.value_or(1.5 * rc);
    auto N = static_cast<std::int64_t>(std::floor(rho * V));
    auto cp = canonical_hyl_partition(m, N);
    double ratio = std::exp(cp.log_Z - log_partition_asymptotic(m, rho));
    add_check(out, S, "partition function exact/asymptotic", ratio, 0.15, std::fabs(ratio - 1.0) <= 0.15);
    double f_exact = -cp.log_Z_canonical / (p.beta * V);
    double f = free_energy(p, m.hyl, rho);
    add_check(out, S, "free energy |f_V - f|", std::fabs(f_exact - f), 1e-3, std::fabs(f_exact - f) <= 1e-3);
  }
}

void suite_mc(const RunSpec& s, std::vector<Check>& out) {
  const std::string S = "mc-vs-exact";
  ModelParams p = model_params(s);
  SamplerConfig cfg;
  cfg.seed = s.seed;
  cfg.n_chains = s.chains;
  cfg.sweeps = s.sweeps;
  cfg.burn_in = s.burn_in;
  cfg.validate();
  {
    FiniteVolumeModel m = fv_model(s, 5.0);
    m.q = 2;
    m.mu = 0.0;
    ProposalKernel k(m, Ensemble::canonical, Interaction::hyl, cfg);
    auto states = partitions_of(6);
    double worst = 0.0;
    for (const auto& x : states)
      for (const auto& y : states) {
        auto cxy = change_between(x, y);
        auto cyx = change_between(y, x);
        if (cxy.type == MoveType::none) continue;
        double txy = k.proposal_probability(x, cxy) * std::min(1.0, std::exp(k.log_acceptance(x, cxy)));
        double tyx = k.proposal_probability(y, cyx) * std::min(1.0, std::exp(k.log_acceptance(y, cyx)));
        double lhs = std::exp(k.log_target(x)) * txy, rhs = std::exp(k.log_target(y)) * tyx;
        if (lhs > 0 || rhs > 0) worst = std::max(worst, std::fabs(lhs - rhs) / std::max(lhs, rhs));
      }
    add_check(out, S, "detailed balance N=6", worst, 1e-12, worst <= 1e-12);
  }
  {
    FiniteVolumeModel m = fv_model(s, 5.0);
    m.hyl.b = 0.0;
    m.mu = 0.0;
    const std::int64_t N = 10;
    auto states = partitions_of(N);
    ProposalKernel k(m, Ensemble::canonical, Interaction::hyl, cfg);
    std::vector<double> logw;
    LogSum norm;
    for (const auto& c : states) {
      logw.push_back(k.log_target(c));
      norm.add(logw.back());
    }
    std::map<std::map<std::int64_t, std::int64_t>, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i].counts] = i;
    std::vector<std::vector<std::uint16_t>> hits(static_cast<std::size_t>(cfg.n_chains));
    sample_canonical_hyl(m, N, cfg, [&](int chain, std::int64_t, const CycleState& st) {
      hits[chain].push_back(static_cast<std::uint16_t>(index.at(st.counts().counts)));
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      std::vector<std::vector<double>> series;
      for (const auto& h : hits) {
        series.emplace_back();
        for (auto v : h) series.back().push_back(v == i ? 1.0 : 0.0);
      }
      auto r = summarize_series(series);
      double expect = std::exp(logw[i] - norm.value());
      // binomial floor: rare cells may see no hits at all
      double se = std::sqrt(std::max(r.std_error * r.std_error, expect * (1 - expect) / static_cast<double>(r.samples)));
      worst = std::max(worst, std::fabs(r.mean - expect) / se);
    }
    add_check(out, S, "b=0 empirical law, max |z| over cells (N=10, V=5)", worst, 3.0, worst <= 3.0);
  }
  {
    double V = s.volume;
    FiniteVolumeModel m = fv_model(s, V);
    m.mu = 0.0;
    if (!s.q) m.q = static_cast<std::int64_t>(std::ceil(std::pow(V, 0.7)));
    double rho = s.rho.value_or(1.5 * critical_density(p));
    auto N = static_cast<std::int64_t>(std::floor(rho * V));
    double exact = long_loop_density_exact(m, N);
    auto r = estimate_long_density(m, N, cfg);
    double z = r.std_error > 0 ? (r.mean - exact) / r.std_error : (r.mean == exact ? 0.0 : INFINITY);
    add_check(out, S, "long density z-score vs exact", z, 3.0, std::fabs(z) <= 3.0);
  }
}

void suite_pressure_gap(const RunSpec& s, std::vector<Check>& out) {
  const std::string S = "pressure-gap";
  ModelParams p = model_params(s);
  HYLParams hyl{s.a.value_or(2.0), s.b};
  double mu = s.mu.value_or(0.0);
  auto jmax = static_cast<std::size_t>(s.jmax);
  auto g1 = pressure_gap(p, hyl, mu, jmax, false);
  auto g2 = pressure_gap(p, hyl, mu, 2 * jmax, false);
  add_check(out, S, "gap witness", g2.gap, -1e-8, g2.gap < -1e-8);
  double stab = std::fabs(g2.gap - g1.gap);
  add_check(out, S, "gap stability under jmax doubling", stab, 1e-6, stab <= 1e-6);
  // central differences of the rate at a generic interior point
  CycleDensityVector x;
  for (std::size_t j = 1; j <= 50; ++j) x.x.push_back(0.05 * std::pow(static_cast<double>(j), -2.5));
  auto g = full_rate_gradient(p, hyl, mu, x);
  double worst = 0.0;
  for (std::size_t j = 0; j < x.x.size(); ++j) {
    double h = 1e-6 * x.x[j];
    auto xp = x, xm = x;
    xp.x[j] += h;
    xm.x[j] -= h;
    double fd = (full_rate(p, hyl, mu, xp, 0.0) - full_rate(p, hyl, mu, xm, 0.0)) / (2 * h);
    worst = std::max(worst, std::fabs(fd - g[j]) / std::max(1.0, std::fabs(g[j])));
  }
  add_check(out, S, "gradient vs finite differences", worst, 1e-6, worst <= 1e-6);
}

}  // namespace

const std::vector<std::string>& validation_suites() {
  static const std::vector<std::string> names{"asymptotics", "finite-volume", "mc-vs-exact", "pressure-gap"};
  return names;
}

int cmd_validate(const RunSpec& s) {
  if (s.suites.empty()) throw ConfigError("validate needs at least one suite: asymptotics, finite-volume, mc-vs-exact, pressure-gap");
  std::vector<Check> checks;
  for (const auto& name : s.suites) {
    if (name == "asymptotics") suite_asymptotics(s, checks);
    else if (name == "finite-volume") suite_finite_volume(s, checks);
    else if (name == "mc-vs-exact") suite_mc(s, checks);
    else if (name == "pressure-gap") suite_pressure_gap(s, checks);
    else throw ConfigError("unknown suite: " + name);
  }
  Table t{{"suite", "check", "measured", "tolerance", "status"}, {}};
  bool all = true;
  for (const auto& c : checks) {
    t.add({c.suite, c.name, c.measured, c.tolerance, std::string(c.info ? "info" : c.pass ? "pass" : "fail")});
    all = all && (c.info || c.pass);
  }
  finish(s, t);
  return all ? 0 : 1;
}

int cmd_phase_diagram(const RunSpec& s) {
  ModelParams p = model_params(s);
  HYLParams hyl{s.a.value_or(0.0), s.b};
  const double rc = critical_density(p);
  Table t;
  if (s.ensemble == "canonical") {
    hyl.validate_canonical();
    Grid g = s.grid.value_or(Grid{rc / 100.0, 2.0 * rc, 200});
    t.columns = {"rho", "rho_bar", "rho_minus_rho_bar", "branch"};
    t.rows = sweep_grid(g.values(), [&](double rho) -> std::vector<Cell> {
      auto sol = solve_rho_bar(p, hyl, rho);
      return {rho, sol.rho_bar, rho - sol.rho_bar, to_string(sol.branch)};
    });
  } else if (s.ensemble == "gc") {
    hyl.validate_grand_canonical();
    Grid g = s.grid.value_or(Grid{-1.0, 1.0, 101});
    t.columns = {"mu", "rho_gc", "rho_bar"};
    t.rows = sweep_grid(g.values(), [&](double mu) -> std::vector<Cell> {
      double r = rho_gc(p, hyl, mu);
      double rb = r > 0.0 ? solve_rho_bar(p, hyl, r).rho_bar : 0.0;
      return {mu, r, rb};
    });
  } else {
    throw ConfigError("--ensemble must be canonical or gc");
  }
  finish(s, t);
  return 0;
}

int cmd_simulate(const RunSpec& s) {
  ModelParams p = model_params(s);
  SamplerConfig cfg;
  cfg.seed = s.seed;
  cfg.n_chains = s.chains;
  cfg.sweeps = s.sweeps;
  cfg.burn_in = s.burn_in;
  cfg.validate();
  FiniteVolumeModel m = fv_model(s, s.volume);

  std::vector<TraceRow> trace;
  std::vector<TraceRow>* tp = s.trace_path.empty() ? nullptr : &trace;
  nlohmann::ordered_json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["command"] = "simulate";
  rep["config"] = s.to_json();
  EstimateReport r;
  nlohmann::ordered_json ref;
  if (s.ensemble == "canonical") {
    if (!s.N && !s.rho) throw ConfigError("simulate --ensemble canonical needs --N or --rho");
    std::int64_t N = s.N ? *s.N : static_cast<std::int64_t>(std::floor(*s.rho * s.volume));
    if (N < 1) throw ConfigError("simulate: N must be >= 1");
    m.mu = 0.0;
    r = estimate_long_density(m, N, cfg, tp);
    rep["observable"] = "N_long/V";
    ref["N"] = N;
    ref["q"] = m.q;
    ref["exact_long_density"] = long_loop_density_exact(m, N);
    ref["rho_bar"] = solve_rho_bar(p, m.hyl, static_cast<double>(N) / s.volume).rho_bar;
  } else if (s.ensemble == "gc") {
    if (!s.mu) throw ConfigError("simulate --ensemble gc needs --mu");
    Interaction inter;
    if (s.interaction == "free") inter = Interaction::free;
    else if (s.interaction == "pmf") inter = Interaction::pmf;
    else if (s.interaction == "hyl") inter = Interaction::hyl;
    else throw ConfigError("--interaction must be free, pmf or hyl");
    r = estimate_gc_density(m, cfg, inter, tp);
    rep["observable"] = "N/V";
    ref["q"] = m.q;
    if (inter == Interaction::free) ref["rho_mu"] = density(p, *s.mu);
    else if (inter == Interaction::pmf) ref["rho_mean_field"] = rho_mean_field(p, m.hyl.a, *s.mu);
    else ref["rho_gc"] = rho_gc(p, m.hyl, *s.mu);
  } else {
    throw ConfigError("--ensemble must be canonical or gc");
  }
  rep["estimate"] = {{"mean", r.mean},
                     {"std_error", r.std_error},
                     {"ess", r.ess},
                     {"acceptance_rates", r.acceptance_rates},
                     {"samples", r.samples},
                     {"n_chains", r.n_chains},
                     {"bimodality_coefficient", r.bimodality_coefficient}};
  rep["reference"] = ref;
  emit(s.out_path, rep.dump(2) + "\n");

  if (tp) {
    Table t{{"chain", "sweep", "N", "N_long", "largest", "energy"}, {}};
    for (const auto& row : trace)
      t.add({static_cast<std::int64_t>(row.chain), row.sweep, row.N, row.N_long, row.largest, row.energy});
    std::ostringstream os;
    write_csv(os, t);
    emit(s.trace_path, os.str());
  }
  return 0;
}

int cmd_pressure_gap(const RunSpec& s) {
  ModelParams p = model_params(s);
  HYLParams hyl{s.a.value_or(2.0), s.b};
  double mu = s.mu.value_or(0.0);
  double tol = s.tol.value_or(1e-8);
  auto g = pressure_gap(p, hyl, mu, static_cast<std::size_t>(s.jmax), true, tol);
  Table t{{"d", "beta", "a", "b", "mu", "gap", "lower_bound", "x1_star", "min_rate", "min_with_addon", "jmax",
           "grad_norm"},
          {}};
  t.add({static_cast<std::int64_t>(s.d), s.beta, hyl.a, s.b, mu, g.gap, g.lower_bound, g.x1_star, g.min_rate,
         g.min_with_addon, static_cast<std::int64_t>(g.jmax_used), g.grad_norm});
  finish(s, t);
  return 0;
}

int cmd_gmf(const RunSpec& s) {
  if (s.table.empty()) throw ConfigError("gmf needs --table PATH (CSV of x,G(x))");
  ModelParams p = model_params(s);
  auto G = TabulatedFunction::from_csv(s.table);
  GmfOptions opt;
  opt.mu_ref = s.mu.value_or(0.0);
  opt.x_max = G.x_max();
  auto r = gmf_solve(p, std::cref(G), opt);
  Table t{{"x_min", "L", "phase", "mu_limit", "interlacement_density", "non_unique", "level_set_condition"}, {}};
  auto opt_cell = [](const std::optional<double>& v) -> Cell { return v ? Cell(*v) : Cell(std::string()); };
  t.add({r.x_min, r.L, to_string(r.phase), opt_cell(r.limiting_params.mu),
         opt_cell(r.limiting_params.interlacement_density), r.non_unique, r.level_set_condition});
  finish(s, t);
  return 0;
}

int cmd_finite_volume(const RunSpec& s) {
  FiniteVolumeModel m = fv_model(s, s.volume);
  if (!s.N) throw ConfigError("finite-volume needs --N");
  const std::int64_t N = *s.N;
  if (N < 0) throw ConfigError("--N must be >= 0");
  Table t;
  if (s.table == "pmf") {
    t.columns = {"n", "log_pmf", "pmf"};
    auto lp = free_canonical_log_pmf(m, N);
    for (std::int64_t n = 0; n <= N; ++n) t.add({n, lp[n], std::exp(lp[n])});
  } else if (s.table == "long-mass") {
    t.columns = {"x", "log_pmf", "pmf"};
    auto lw = long_sector_log_weights(m, N, 0.0);
    for (std::int64_t x = 0; x <= N; ++x) t.add({x, lw[x], std::exp(lw[x])});
  } else if (s.table == "spectrum") {
    t.columns = {"N_long", "log_weight", "probability"};
    auto cp = canonical_hyl_partition(m, N);
    for (auto [x, lw] : cp.long_spectrum) t.add({x, lw, std::exp(lw - cp.log_Z)});
  } else {
    throw ConfigError("--table must be pmf, long-mass or spectrum");
  }
  finish(s, t);
  return 0;
}

}  // namespace loopsoup::cli
