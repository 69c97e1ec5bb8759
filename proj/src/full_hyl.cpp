#include "loopsoup/full_hyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  ModelParams p;
  HYLParams h;
  double mu;
  std::size_t J;
  const RateAddon* addon;
  double P0;
  std::vector<double> logw;  // log(j / p_j)

  Problem(const ModelParams& p_, const HYLParams& h_, double mu_, std::size_t J_, const RateAddon* addon_)
      : p(p_), h(h_), mu(mu_), J(J_), addon(addon_), P0(pressure(p_, 0.0)), logw(J_) {
    for (std::size_t j = 1; j <= J; ++j)
      logw[j - 1] = std::log(static_cast<double>(j)) - std::log(bridge_return_weight(p.d, p.beta, static_cast<std::int64_t>(j)));
  }

  double excess(double D) const { return std::max(mu - h.a * D, 0.0); }
  double g(double D) const {
    double e = excess(D);
    return -mu * p.beta * D + 0.5 * h.a * p.beta * D * D - p.beta / (2.0 * (h.a - h.b)) * e * e - P0;
  }
  double gp(double D) const {
    return -mu * p.beta + h.a * p.beta * D + h.a * p.beta / (h.a - h.b) * excess(D);
  }
  double gpp(double D) const {
    return h.a * p.beta - (mu > h.a * D ? h.a * h.a * p.beta / (h.a - h.b) : 0.0);
  }

  static double total(const std::vector<double>& x) {
    double D = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) D += static_cast<double>(j + 1) * x[j];
    return D;
  }

  double value(const std::vector<double>& x) const {
    double D = total(x);
    if (!std::isfinite(D)) return kInf;
    double s = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      double xj = x[j];
      if (xj > 0.0) {
        double jd = static_cast<double>(j + 1);
        s += xj * (std::log(xj) + logw[j] - 1.0) - 0.5 * h.b * p.beta * jd * jd * xj * xj;
      }
    }
    double v = s + g(D);
    if (addon) v += addon->value(x);
    return v;
  }

  void gradient(const std::vector<double>& x, std::vector<double>& out) const {
    double D = total(x);
    double gd = gp(D);
    out.assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      double jd = static_cast<double>(j + 1);
      out[j] = std::log(x[j]) + logw[j] - h.b * p.beta * jd * jd * x[j] + jd * gd;
    }
    if (addon) addon->add_gradient(x, out);
  }
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::fabs(e));
  return m;
}

struct RunResult {
  std::vector<double> x;
  double value;
  double gnorm;
  int iterations;
};

// Newton in x (diagonal + rank-one Hessian via Sherman–Morrison) applied as a
// multiplicative update so positivity is preserved; preconditioned gradient
// steps when the Hessian is indefinite.
RunResult run(const Problem& pr, std::vector<double> x, const MinimizeOptions& opt) {
  const std::size_t J = pr.J;
  std::vector<double> grad(J), hdiag(J), s(J), trial(J), trial_grad(J);
  double F = pr.value(x);
  pr.gradient(x, grad);
  double gnorm = max_abs(grad);
  int it = 0;
  for (; it < opt.max_iter && gnorm > opt.grad_tol; ++it) {
    const double D = Problem::total(x);
    const double c = pr.gpp(D);
    bool pd = true;
    for (std::size_t j = 0; j < J; ++j) {
      double jd = static_cast<double>(j + 1);
      hdiag[j] = 1.0 / x[j] - pr.h.b * pr.p.beta * jd * jd;
    }
    if (pr.addon && pr.addon->add_hessian_diag) pr.addon->add_hessian_diag(x, hdiag);
    double jhj = 0.0, jhg = 0.0;
    for (std::size_t j = 0; j < J && pd; ++j) {
      if (!(hdiag[j] > 0.0)) pd = false;
      double jd = static_cast<double>(j + 1);
      jhj += jd * jd / hdiag[j];
      jhg += jd * grad[j] / hdiag[j];
    }
    double denom = 1.0 + c * jhj;
    if (pd && !(denom > 0.0)) pd = false;

    bool newton = pd;
    auto set_direction = [&] {
      if (newton) {
        double k = c * jhg / denom;
        for (std::size_t j = 0; j < J; ++j) {
          double jd = static_cast<double>(j + 1);
          s[j] = -(grad[j] - k * jd) / hdiag[j] / x[j];
        }
      } else {
        for (std::size_t j = 0; j < J; ++j) s[j] = -grad[j];
      }
    };
    set_direction();

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double slope = 0.0;
      for (std::size_t j = 0; j < J; ++j) slope += x[j] * grad[j] * s[j];
      if (!(slope < 0.0)) {
        if (!newton) break;
        newton = false;
        set_direction();
        continue;
      }
      double smax = max_abs(s);
      double t = std::min(1.0, (newton ? 5.0 : 1.0) / smax);
      for (int ls = 0; ls < 80; ++ls) {
        for (std::size_t j = 0; j < J; ++j) trial[j] = x[j] * std::exp(t * s[j]);
        double Ft = pr.value(trial);
        bool ok = Ft <= F + 1e-4 * t * slope;
        if (!ok && newton && t == 1.0 && std::isfinite(Ft)) {
          pr.gradient(trial, trial_grad);
          ok = max_abs(trial_grad) < 0.5 * gnorm;
        }
        if (ok) {
          x.swap(trial);
          F = Ft;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted && newton) {
        newton = false;
        set_direction();
      } else if (!accepted) {
        break;
      }
    }
    if (!accepted) break;
    pr.gradient(x, grad);
    gnorm = max_abs(grad);
  }
  return {std::move(x), F, gnorm, it};
}

void check_inputs(const ModelParams& p, const HYLParams& hyl) {
  p.validate();
  hyl.validate_canonical();
  if (!(hyl.a > hyl.b)) throw DomainError("full HYL rate function requires a > b > 0");
}

}  // namespace

double CycleDensityVector::D() const { return Problem::total(x); }

void CycleDensityVector::validate() const {
  for (double v : x)
    if (!(v >= 0.0)) throw DomainError("CycleDensityVector: densities must be non-negative");
}

double full_rate(const ModelParams& p, const HYLParams& hyl, double mu, const CycleDensityVector& x, double p_tilde) {
  check_inputs(p, hyl);
  x.validate();
  Problem pr(p, hyl, mu, x.jmax(), nullptr);
  return pr.value(x.x) + p_tilde;
}

std::vector<double> full_rate_gradient(const ModelParams& p, const HYLParams& hyl, double mu, const CycleDensityVector& x) {
  check_inputs(p, hyl);
  x.validate();
  Problem pr(p, hyl, mu, x.jmax(), nullptr);
  std::vector<double> g;
  pr.gradient(x.x, g);
  return g;
}

RateAddon x1_quadratic_addon(double coeff) {
  RateAddon a;
  a.value = [coeff](const std::vector<double>& x) { return 0.5 * coeff * x[0] * x[0]; };
  a.add_gradient = [coeff](const std::vector<double>& x, std::vector<double>& g) { g[0] += coeff * x[0]; };
  a.add_hessian_diag = [coeff](const std::vector<double>&, std::vector<double>& h) { h[0] += coeff; };
  return a;
}

namespace {

FullRateMinimum minimize_impl(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax,
                              const std::optional<RateAddon>& addon, const MinimizeOptions& opt,
                              const std::vector<std::vector<double>>& extra_starts) {
  check_inputs(p, hyl);
  if (jmax < 50) throw DomainError("minimize_full_rate: jmax must be >= 50");
  Problem pr(p, hyl, mu, jmax, addon ? &*addon : nullptr);

  std::vector<std::vector<double>> starts = extra_starts;
  const double mu0 = std::min(mu, 0.0);
  std::vector<double> free(jmax);
  for (std::size_t j = 1; j <= jmax; ++j) {
    double jd = static_cast<double>(j);
    free[j - 1] = bridge_return_weight(p.d, p.beta, static_cast<std::int64_t>(j)) * std::exp(p.beta * mu0 * jd) / jd;
  }
  starts.push_back(free);
  const double mass = std::max(mu / (hyl.a - hyl.b), 0.5 * critical_density(p));
  for (std::size_t jc : {std::size_t{1}, jmax / 4, jmax / 2, jmax}) {
    std::vector<double> x = free;
    for (double& v : x) v *= 0.5;
    x[jc - 1] += mass / static_cast<double>(jc);
    starts.push_back(std::move(x));
  }

  FullRateMinimum best{};
  best.value = kInf;
  best.grad_norm = kInf;
  double best_failed_gnorm = kInf;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (starts[k].size() != jmax) continue;
    RunResult r = run(pr, starts[k], opt);
    if (r.gnorm > opt.grad_tol) {
      best_failed_gnorm = std::min(best_failed_gnorm, r.gnorm);
      continue;
    }
    if (r.value < best.value) {
      best.x_star.x = std::move(r.x);
      best.value = r.value;
      best.grad_norm = r.gnorm;
      best.iterations = r.iterations;
      best.start = static_cast<int>(k);
    }
  }
  if (!std::isfinite(best.value)) {
    std::ostringstream os;
    os << "minimize_full_rate: no start converged (best gradient norm " << best_failed_gnorm << ", tol "
       << opt.grad_tol << ", jmax " << jmax << ")";
    throw NumericalFailure(os.str());
  }
  return best;
}

PressureGap gap_at(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax) {
  FullRateMinimum raw = minimize_impl(p, hyl, mu, jmax, std::nullopt, {}, {});
  FullRateMinimum with = minimize_impl(p, hyl, mu, jmax, x1_quadratic_addon(hyl.b * p.beta), {}, {raw.x_star.x});
  PressureGap g;
  g.gap = -(with.value - raw.value) / p.beta;
  g.x1_star = raw.x_star.x[0];
  g.lower_bound = -0.5 * hyl.b * g.x1_star * g.x1_star;
  g.min_rate = raw.value;
  g.min_with_addon = with.value;
  g.jmax_used = jmax;
  g.grad_norm = std::max(raw.grad_norm, with.grad_norm);
  return g;
}

}  // namespace

FullRateMinimum minimize_full_rate(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax,
                                   const std::optional<RateAddon>& addon, const MinimizeOptions& opt) {
  return minimize_impl(p, hyl, mu, jmax, addon, opt, {});
}

double calibrated_p_tilde(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax) {
  return -minimize_full_rate(p, hyl, mu, jmax).value;
}

PressureGap pressure_gap(const ModelParams& p, const HYLParams& hyl, double mu, std::size_t jmax, bool auto_double,
                         double stability_tol) {
  PressureGap cur = gap_at(p, hyl, mu, jmax);
  if (!auto_double) return cur;
  for (std::size_t J = 2 * jmax; J <= 64 * jmax; J *= 2) {
    PressureGap next = gap_at(p, hyl, mu, J);
    bool stable = std::fabs(next.gap - cur.gap) <= stability_tol;
    cur = next;
    if (stable) return cur;
  }
  throw NumericalFailure("pressure_gap: value did not stabilise under jmax doubling");
}

}  // namespace loopsoup
