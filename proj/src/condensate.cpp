#include "loopsoup/condensate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

auto tight_tol() {
  return [](double a, double b) { return std::fabs(a - b) <= 4.0 * kEps * std::max(std::fabs(a), std::fabs(b)); };
}

template <class F>
double bracket_root(F f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 300;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tight_tol(), iters);
  return 0.5 * (r.first + r.second);
}

// The excess problem in unified form: maximise R(x) = (βb/2)[(x+e)² − e²] − I_0(L − x)
// on [0, L], where (L, e) = (ρ_c, ρ − ρ_c) above ρ_c and (ρ_o, 0) below.
struct Excess {
  const ModelParams& p;
  double b;
  double L;
  double e;

  double R(double x) const {
    double q = 0.5 * p.beta * b * ((x + e) * (x + e) - e * e);
    return q - rate_I(p, 0.0, std::max(L - x, 0.0));
  }
  double Rp(double x) const {
    double y = L - x;
    if (y <= 0.0) return -kInf;
    return p.beta * (b * (x + e) + mu_of_rho(p, y));
  }
  double Rpp(double x) const {
    double y = L - x;
    if (y <= 0.0) return -kInf;
    double m = mu_of_rho(p, y);
    if (m == 0.0 && p.d <= 4) return p.beta * b;  // 𝛍' vanishes at ρ_c for d = 3, 4
    return p.beta * (b - 1.0 / density_prime(p, m));
  }
};

Excess make_excess(const ModelParams& p, const HYLParams& hyl, double rho_o) {
  double rc = critical_density(p);
  if (rho_o > rc) return {p, hyl.b, rc, rho_o - rc};
  return {p, hyl.b, rho_o, 0.0};
}

struct Candidates {
  bool has_interior = false;
  double x0 = 0.0;
  double R0 = 0.0;
  double Rx0 = -kInf;
};

// R' is concave: find its maximum, then the zero to its right.
Candidates analyse(const Excess& ex) {
  Candidates c;
  c.R0 = ex.R(0.0);
  double top = ex.L * (1.0 - 1e-12);
  auto neg = [&](double x) { return -ex.Rp(x); };
  auto mres = boost::math::tools::brent_find_minima(neg, 0.0, top, 40);
  double xp = mres.first;
  double rp = -mres.second;
  double r0 = ex.Rp(0.0);
  if (r0 >= rp) {
    xp = 0.0;
    rp = r0;
  }
  if (!(rp > 0.0)) return c;

  double hi = top;
  double fhi = ex.Rp(hi);
  int guard = 0;
  while (!(fhi < 0.0)) {
    hi = ex.L - 0.5 * (ex.L - hi);
    fhi = ex.Rp(hi);
    if (++guard > 60) throw NumericalFailure("solve_rho_bar: could not bracket the right zero of R'");
  }
  c.x0 = bracket_root([&](double x) { return ex.Rp(x); }, xp, hi, rp, fhi);
  c.Rx0 = ex.R(c.x0);
  c.has_interior = true;
  return c;
}

bool coexist(double r0, double rx) { return std::fabs(r0 - rx) <= 1e-10 * std::max(1.0, std::fabs(rx)); }

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::zero: return "zero";
    case Branch::interior: return "interior";
    case Branch::coexistence: return "coexistence";
  }
  return "?";
}

void HYLParams::validate_canonical() const {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("HYLParams: b must be > 0");
}

void HYLParams::validate_grand_canonical() const {
  validate_canonical();
  if (!(a > b)) throw DomainError("HYLParams: grand-canonical operations need a > b > 0");
}

double excess_objective(const ModelParams& p, const HYLParams& hyl, double rho_o, double x) {
  p.validate();
  hyl.validate_canonical();
  if (!(rho_o > 0.0)) throw DomainError("excess_objective: rho_o must be > 0");
  Excess ex = make_excess(p, hyl, rho_o);
  if (!(x >= 0.0 && x <= ex.L)) throw DomainError("excess_objective: x outside [0, min(rho_o, rho_c)]");
  return ex.R(x);
}

double excess_objective_prime(const ModelParams& p, const HYLParams& hyl, double rho_o, double x) {
  p.validate();
  hyl.validate_canonical();
  if (!(rho_o > 0.0)) throw DomainError("excess_objective_prime: rho_o must be > 0");
  Excess ex = make_excess(p, hyl, rho_o);
  if (!(x >= 0.0 && x <= ex.L)) throw DomainError("excess_objective_prime: x outside [0, min(rho_o, rho_c)]");
  return ex.Rp(x);
}

double excess_objective_second(const ModelParams& p, const HYLParams& hyl, double rho_o, double x) {
  p.validate();
  hyl.validate_canonical();
  if (!(rho_o > 0.0)) throw DomainError("excess_objective_second: rho_o must be > 0");
  Excess ex = make_excess(p, hyl, rho_o);
  if (!(x >= 0.0 && x <= ex.L)) throw DomainError("excess_objective_second: x outside [0, min(rho_o, rho_c)]");
  return ex.Rpp(x);
}

CondensateSolution solve_rho_bar(const ModelParams& p, const HYLParams& hyl, double rho) {
  p.validate();
  hyl.validate_canonical();
  if (!(rho > 0.0)) throw DomainError("solve_rho_bar: rho must be > 0");
  Excess ex = make_excess(p, hyl, rho);
  Candidates c = analyse(ex);

  CondensateSolution s;
  s.rho_total = rho;
  s.rho_e = ex.e;
  const double shift = 0.5 * hyl.b * p.beta * ex.e * ex.e;

  auto take_interior = [&] {
    s.rho_S = c.x0;
    s.S_value = c.Rx0;
    s.objective_curvature = ex.Rpp(c.x0);
  };

  if (ex.e > 0.0) {
    // R'(0) = βbρ_e > 0, so the maximiser is always interior above ρ_c.
    if (!c.has_interior) throw NumericalFailure("solve_rho_bar: supercritical maximiser not found");
    take_interior();
    s.branch = Branch::interior;
  } else if (!c.has_interior || c.Rx0 < c.R0) {
    s.branch = Branch::zero;
    s.S_value = c.R0;
    if (c.has_interior && coexist(c.R0, c.Rx0)) {
      s.branch = Branch::coexistence;
      s.coexisting_rho_S = c.x0;
    }
  } else if (coexist(c.R0, c.Rx0)) {
    s.branch = Branch::coexistence;
    s.S_value = c.R0;
    s.coexisting_rho_S = c.x0;
  } else {
    take_interior();
    s.branch = Branch::interior;
  }
  s.rho_bar = s.rho_S + s.rho_e;
  s.S_1 = s.S_value + shift;
  return s;
}

CriticalHYL critical_density_hyl(const ModelParams& p, const HYLParams& hyl) {
  p.validate();
  hyl.validate_canonical();
  const double rc = critical_density(p);
  auto diff = [&](double rho_o) {
    Candidates c = analyse(make_excess(p, hyl, rho_o));
    return std::pair{c.has_interior ? c.Rx0 - c.R0 : -kInf, c.x0};
  };

  auto [d_top, x_top] = diff(rc);
  if (!(d_top > 0.0)) return {rc, 0.0};

  // R(x0) − R(0) is increasing in ρ_o; bisect for its sign change.
  double hi = rc;
  double lo = 0.5 * rc;
  while (diff(lo).first > 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-12 * rc) throw NumericalFailure("critical_density_hyl: no sign change found");
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * kEps * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (diff(mid).first > 0.0) hi = mid; else lo = mid;
  }
  double rho_hy = 0.5 * (lo + hi);
  double jump = diff(hi).second;
  return {rho_hy, jump};
}

double b_critical(const ModelParams& p) {
  p.validate();
  if (p.d <= 4) throw DivergenceError("b_critical: rho'(0) diverges for d = 3, 4; every b > 0 shifts the transition");
  return 1.0 / density_prime(p, 0.0);
}

double free_energy(const ModelParams& p, const HYLParams& hyl, double rho) {
  CondensateSolution s = solve_rho_bar(p, hyl, rho);
  double y = rho - s.rho_bar;
  double m = mu_of_rho(p, y);
  return y * m - (pressure(p, m) - pressure(p, 0.0)) / p.beta - 0.5 * hyl.b * s.rho_bar * s.rho_bar;
}

double gc_objective(const ModelParams& p, const HYLParams& hyl, double mu, double rho) {
  if (!(rho > 0.0)) throw DomainError("gc_objective: rho must be > 0");
  CondensateSolution s = solve_rho_bar(p, hyl, rho);
  return p.beta * (mu * rho - 0.5 * hyl.a * rho * rho) + s.S_1;
}

double rho_gc(const ModelParams& p, const HYLParams& hyl, double mu) {
  p.validate();
  hyl.validate_grand_canonical();
  if (!std::isfinite(mu)) throw DomainError("rho_gc: mu must be finite");
  const double a = hyl.a;
  const double rc = critical_density(p);
  const double rho_hy = critical_density_hyl(p, hyl).rho_c_hyl;

  std::vector<double> cands;

  // Zero branch (ρ < ρ_c^HY): J' ∝ μ − aρ − 𝛍(ρ), strictly decreasing.
  auto g0 = [&](double r) { return mu - a * r - mu_of_rho(p, r); };
  double g_hy = g0(rho_hy);
  if (g_hy >= 0.0) {
    cands.push_back(rho_hy);
  } else {
    double lo = 0.5 * rho_hy;
    double glo = g0(lo);
    while (!(glo > 0.0)) {
      lo *= 0.5;
      if (lo < 1e-300) throw NumericalFailure("rho_gc: bracket failure on the zero branch");
      glo = g0(lo);
    }
    cands.push_back(bracket_root(g0, lo, rho_hy, glo, g_hy));
  }

  // Interior branch (ρ > ρ_c^HY): J' ∝ μ − aρ + bρ̄(ρ) ≤ μ − (a − b)ρ, so it is
  // negative beyond μ/(a − b). J is not concave here; scan for sign changes.
  double rho_max = mu / (a - hyl.b);
  if (rho_max > rho_hy) {
    auto g1 = [&](double r) { return mu - a * r + hyl.b * solve_rho_bar(p, hyl, r).rho_bar; };
    const int n = 240;
    double span = rho_max - rho_hy;
    double prev_r = rho_hy + 1e-9 * std::max(span, rc);
    double prev_g = g1(prev_r);
    for (int i = 1; i <= n; ++i) {
      double t = static_cast<double>(i) / n;
      double r = rho_hy + span * t * t;
      if (r <= prev_r) continue;
      double gr = (i == n) ? std::min(g1(r), 0.0) : g1(r);
      if (prev_g > 0.0 && gr <= 0.0) cands.push_back(bracket_root(g1, prev_r, r, prev_g, gr));
      prev_r = r;
      prev_g = gr;
    }
  }

  double best = cands.front();
  double best_j = gc_objective(p, hyl, mu, best);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    double j = gc_objective(p, hyl, mu, cands[i]);
    if (j > best_j || (j == best_j && cands[i] < best)) {
      best = cands[i];
      best_j = j;
    }
  }
  return best;
}

double pressure_hyl(const ModelParams& p, const HYLParams& hyl, double mu) {
  double r = rho_gc(p, hyl, mu);
  return gc_objective(p, hyl, mu, r) / p.beta;
}

double rho_mean_field(const ModelParams& p, double a, double mu) {
  p.validate();
  if (!(a > 0.0)) throw DomainError("rho_mean_field: a must be > 0");
  if (!std::isfinite(mu)) throw DomainError("rho_mean_field: mu must be finite");
  const double rc = critical_density(p);
  if (mu >= a * rc) return mu / a;  // 𝛍 = 0 on [ρ_c, ∞)
  auto g = [&](double r) { return mu - a * r - mu_of_rho(p, r); };
  double lo = 0.5 * rc, glo = g(lo);
  while (!(glo > 0.0)) {
    lo *= 0.5;
    if (lo < 1e-300) throw NumericalFailure("rho_mean_field: bracket failure");
    glo = g(lo);
  }
  return bracket_root(g, lo, rc, glo, g(rc));
}

// ---- general mean-field classifier ----

std::string to_string(GmfPhase ph) {
  switch (ph) {
    case GmfPhase::subcritical: return "subcritical";
    case GmfPhase::supercritical: return "supercritical";
    case GmfPhase::at_rc: return "at_rc";
  }
  return "?";
}

GmfResult gmf_solve(const ModelParams& p, const std::function<double(double)>& G, const GmfOptions& opt) {
  p.validate();
  if (!(opt.x_max > 0.0)) throw DomainError("gmf_solve: x_max must be > 0");
  if (opt.grid_points < 3) throw DomainError("gmf_solve: grid_points must be >= 3");
  const double rc = critical_density(p);
  auto F = [&](double x) {
    double v = rate_I(p, opt.mu_ref, x) + G(x);
    if (std::isnan(v)) throw NumericalFailure("gmf_solve: objective is NaN at x = " + std::to_string(x));
    if (v == -kInf) throw NumericalFailure("gmf_solve: objective unbounded below");
    return v;
  };

  const int n = opt.grid_points;
  const double h0 = opt.x_max / (n - 1);
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = i * h0;
    fs[i] = F(xs[i]);
  }
  int ib = 0;
  for (int i = 1; i < n; ++i)
    if (fs[i] < fs[ib]) ib = i;  // strict: lowest x wins ties
  if (!std::isfinite(fs[ib])) throw NumericalFailure("gmf_solve: objective is +inf on the whole grid");
  const double L0 = fs[ib];
  const double tol = opt.tie_tol * std::max(1.0, std::fabs(L0));

  // Clusters of near-minimal grid points.
  std::vector<std::pair<int, int>> clusters;
  for (int i = 0; i < n; ++i) {
    if (fs[i] <= L0 + tol) {
      if (!clusters.empty() && clusters.back().second == i - 1) clusters.back().second = i;
      else clusters.push_back({i, i});
    }
  }
  bool non_unique = clusters.size() > 1;
  for (auto& c : clusters)
    if (c.second - c.first > 2) non_unique = true;

  double x = xs[ib];
  double h = h0;
  double best = L0;
  for (int round = 0; round < opt.refinement_rounds; ++round) {
    double lo = std::max(0.0, x - h), hi = std::min(opt.x_max, x + h);
    double hn = h / 10.0;
    int m = static_cast<int>(std::lround((hi - lo) / hn));
    for (int k = 0; k <= m; ++k) {
      double xk = lo + k * hn;
      double fk = F(xk);
      if (fk < best) {
        best = fk;
        x = xk;
      }
    }
    h = hn;
  }

  GmfResult r;
  r.x_min = x;
  r.L = best;
  r.non_unique = non_unique;
  for (auto& c : clusters) r.near_minimisers.push_back(xs[(c.first + c.second) / 2]);

  const double at_tol = std::max(h, 1e-9);
  if (std::fabs(x - rc) <= at_tol) r.phase = GmfPhase::at_rc;
  else if (x < rc) r.phase = GmfPhase::subcritical;
  else r.phase = GmfPhase::supercritical;
  if (r.phase == GmfPhase::subcritical && x > 0.0) r.limiting_params.mu = mu_of_rho(p, x);
  if (r.phase == GmfPhase::supercritical) r.limiting_params.interlacement_density = x - rc;

  const double delta = opt.level_delta * std::max(1.0, std::fabs(best));
  r.level_set_condition = true;
  for (int i = 0; i < n; ++i)
    if (fs[i] <= best + delta && std::fabs(xs[i] - x) > opt.level_eps * opt.x_max) r.level_set_condition = false;
  return r;
}

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2) throw DomainError("TabulatedFunction: need >= 2 matching (x, value) rows");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("TabulatedFunction: x must be strictly increasing");
}

TabulatedFunction TabulatedFunction::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("TabulatedFunction: cannot open " + path);
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::string a, b;
    if (!(ss >> a >> b)) continue;
    char* end = nullptr;
    double xv = std::strtod(a.c_str(), &end);
    if (end == a.c_str()) continue;  // header row
    double yv = std::strtod(b.c_str(), &end);
    if (end == b.c_str()) throw DomainError("TabulatedFunction: bad value '" + b + "' in " + path);
    xs.push_back(xv);
    ys.push_back(yv);
  }
  return TabulatedFunction(std::move(xs), std::move(ys));
}

double TabulatedFunction::operator()(double x) const {
  if (x < x_.front() || x > x_.back()) return kInf;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  if (it == x_.end()) return y_.back();
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  if (std::isinf(y_[i - 1]) || std::isinf(y_[i])) return t == 0.0 ? y_[i - 1] : (t == 1.0 ? y_[i] : std::max(y_[i - 1], y_[i]));
  return y_[i - 1] + t * (y_[i] - y_[i - 1]);
}

}  // namespace loopsoup
