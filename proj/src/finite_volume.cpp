#include "loopsoup/finite_volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> log_intensities(const FiniteVolumeModel& m, std::int64_t upto) {
  std::vector<double> l(static_cast<std::size_t>(upto) + 1, kNegInf);
  for (std::int64_t j = 1; j <= upto; ++j) l[j] = log_intensity(m, j);
  return l;
}

// n·P(n) = Σ_{j ∈ [1, jmax]} jλ_j P(n − j), in log form.
std::vector<double> compound_poisson(const FiniteVolumeModel& m, std::int64_t N_max, std::int64_t jmax, double log_p0) {
  if (N_max < 0) throw DomainError("pmf: N_max must be >= 0");
  std::vector<double> ll = log_intensities(m, std::min(jmax, N_max));
  std::vector<double> lp(static_cast<std::size_t>(N_max) + 1, kNegInf);
  lp[0] = log_p0;
  for (std::int64_t n = 1; n <= N_max; ++n) {
    LogSum acc;
    std::int64_t top = std::min(n, jmax);
    for (std::int64_t j = 1; j <= top; ++j) acc.add(std::log(static_cast<double>(j)) + ll[j] + lp[n - j]);
    lp[n] = acc.value() - std::log(static_cast<double>(n));
  }
  return lp;
}

double log_long_term(double log_lambda, std::int64_t k, std::int64_t n, double coupling) {
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return nd * log_lambda - std::lgamma(nd + 1.0) + coupling * kd * kd * nd * nd;
}

std::vector<double> long_dp(const FiniteVolumeModel& m, std::int64_t M, double coupling) {
  std::vector<double> w(static_cast<std::size_t>(M) + 1, kNegInf);
  w[0] = 0.0;
  for (std::int64_t k = std::max<std::int64_t>(m.q, 1); k <= M; ++k) {
    double ll = log_intensity(m, k);
    // Descending x keeps w[x − k·n] at its value before length k was added.
    for (std::int64_t x = M; x >= k; --x) {
      LogSum acc;
      acc.add(w[x]);
      for (std::int64_t n = 1; k * n <= x; ++n) {
        double prev = w[x - k * n];
        if (prev == kNegInf) continue;
        acc.add(prev + log_long_term(ll, k, n, coupling));
      }
      w[x] = acc.value();
    }
  }
  return w;
}

struct Enumerator {
  const FiniteVolumeModel& m;
  double coupling;
  std::int64_t cap;
  std::int64_t visited = 0;
  std::vector<double> ll;

  // Multisets of parts in [q, k_max] summing to `rest`, largest part chosen first.
  void go(std::int64_t rest, std::int64_t k_max, double acc_log, LogSum& out) {
    if (rest == 0) {
      if (++visited > cap) throw CombinatorialBlowup("long-loop enumeration exceeded the configuration cap");
      out.add(acc_log);
      return;
    }
    for (std::int64_t k = std::min(k_max, rest); k >= m.q; --k) {
      for (std::int64_t n = 1; k * n <= rest; ++n)
        go(rest - k * n, k - 1, acc_log + log_long_term(ll[k], k, n, coupling), out);
    }
  }
};

}  // namespace

void LogSum::add(double t) {
  if (t == kNegInf) return;
  if (t > max_) {
    sum_ = (max_ == kNegInf ? 0.0 : sum_ * std::exp(max_ - t)) + 1.0;
    max_ = t;
  } else {
    sum_ += std::exp(t - max_);
  }
}

double LogSum::value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

void FiniteVolumeModel::validate() const {
  params.validate();
  if (!(V > 0.0)) throw DomainError("FiniteVolumeModel: V must be > 0");
  if (q < 1) throw DomainError("FiniteVolumeModel: q must be >= 1");
  if (!std::isfinite(mu)) throw DomainError("FiniteVolumeModel: mu must be finite");
  if (!(hyl.b >= 0.0)) throw DomainError("FiniteVolumeModel: b must be >= 0");
}

std::vector<std::string> FiniteVolumeModel::warnings() const {
  std::vector<std::string> w;
  double as = a_scale(params, V);
  std::ostringstream os;
  if (static_cast<double>(q) <= as) {
    os << "q = " << q << " is not above the fluctuation scale a_scale(V) = " << as;
    w.push_back(os.str());
  }
  if (static_cast<double>(q) > V) {
    std::ostringstream o2;
    o2 << "q = " << q << " exceeds the volume V = " << V;
    w.push_back(o2.str());
  }
  return w;
}

std::int64_t FiniteVolumeModel::default_q(double V) {
  return static_cast<std::int64_t>(std::ceil(std::pow(V, 0.75)));
}

std::int64_t CycleCounts::N() const {
  std::int64_t s = 0;
  for (auto [j, n] : counts) s += j * n;
  return s;
}

std::int64_t CycleCounts::N_short(std::int64_t q) const {
  std::int64_t s = 0;
  for (auto [j, n] : counts)
    if (j < q) s += j * n;
  return s;
}

std::int64_t CycleCounts::N_long(std::int64_t q) const { return N() - N_short(q); }

std::int64_t CycleCounts::largest() const {
  for (auto it = counts.rbegin(); it != counts.rend(); ++it)
    if (it->second > 0) return it->first;
  return 0;
}

void CycleCounts::validate() const {
  for (auto [j, n] : counts)
    if (j < 1 || n < 0) throw DomainError("CycleCounts: lengths must be >= 1 and counts >= 0");
}

double log_intensity(const FiniteVolumeModel& m, std::int64_t j) {
  if (j < 1) throw DomainError("intensity: j must be >= 1");
  double jd = static_cast<double>(j);
  return std::log(m.V) + std::log(bridge_return_weight(m.params.d, m.params.beta, j)) + m.params.beta * m.mu * jd -
         std::log(jd);
}

double intensity(const FiniteVolumeModel& m, std::int64_t j) { return std::exp(log_intensity(m, j)); }

double total_intensity(const FiniteVolumeModel& m) {
  m.validate();
  if (!(m.mu <= 0.0)) throw DomainError("finite-volume laws need summable intensities (mu <= 0)");
  return m.V * pressure(m.params, m.mu);
}

double long_intensity(const FiniteVolumeModel& m) {
  m.validate();
  double shorts = 0.0;
  for (std::int64_t j = 1; j < m.q; ++j) shorts += intensity(m, j);
  return total_intensity(m) - shorts;
}

std::vector<double> free_canonical_log_pmf(const FiniteVolumeModel& m, std::int64_t N_max) {
  m.validate();
  return compound_poisson(m, N_max, N_max, -total_intensity(m));
}

std::vector<double> free_canonical_pmf(const FiniteVolumeModel& m, std::int64_t N_max) {
  auto lp = free_canonical_log_pmf(m, N_max);
  for (double& v : lp) v = std::exp(v);
  return lp;
}

std::vector<double> short_log_pmf(const FiniteVolumeModel& m, std::int64_t N_max) {
  m.validate();
  double shorts = 0.0;
  for (std::int64_t j = 1; j < m.q; ++j) shorts += intensity(m, j);
  return compound_poisson(m, N_max, m.q - 1, -shorts);
}

std::vector<double> long_sector_log_weights(const FiniteVolumeModel& m, std::int64_t M, double coupling,
                                            LongSectorMethod method, std::int64_t cap) {
  m.validate();
  if (M < 0) throw DomainError("long_sector_log_weights: M must be >= 0");
  std::vector<double> w;
  if (method == LongSectorMethod::dynamic_programming) {
    w = long_dp(m, M, coupling);
  } else {
    Enumerator e{m, coupling, cap, 0, log_intensities(m, M)};
    w.assign(static_cast<std::size_t>(M) + 1, kNegInf);
    for (std::int64_t x = 0; x <= M; ++x) {
      LogSum acc;
      e.go(x, x, 0.0, acc);
      w[x] = acc.value();
    }
  }
  double tail = long_intensity(m);
  for (double& v : w)
    if (v != kNegInf) v -= tail;
  return w;
}

double long_mass_pmf(const FiniteVolumeModel& m, std::int64_t x, LongSectorMethod method, std::int64_t cap) {
  if (x < 0) throw DomainError("long_mass_pmf: x must be >= 0");
  if (method == LongSectorMethod::enumeration) {
    m.validate();
    Enumerator e{m, 0.0, cap, 0, log_intensities(m, x)};
    LogSum acc;
    e.go(x, x, 0.0, acc);
    return std::exp(acc.value() - long_intensity(m));
  }
  return std::exp(long_sector_log_weights(m, x, 0.0, method, cap)[x]);
}

CanonicalPartition canonical_hyl_partition(const FiniteVolumeModel& m, std::int64_t N, LongSectorMethod method,
                                           std::int64_t cap) {
  m.validate();
  if (N < 0) throw DomainError("canonical_hyl_partition: N must be >= 0");
  const double coupling = m.hyl.b * m.params.beta / (2.0 * m.V);
  auto lw = long_sector_log_weights(m, N, coupling, method, cap);
  auto ls = short_log_pmf(m, N);
  CanonicalPartition cp;
  LogSum z;
  for (std::int64_t x = 0; x <= N; ++x) {
    if (lw[x] == kNegInf) continue;
    double t = lw[x] + ls[N - x];
    cp.long_spectrum.emplace_back(x, t);
    z.add(t);
  }
  cp.log_Z = z.value();
  cp.log_free_pmf = free_canonical_log_pmf(m, N)[N];
  cp.log_Z_canonical = cp.log_Z - cp.log_free_pmf;
  return cp;
}

double long_loop_density_exact(const FiniteVolumeModel& m, std::int64_t N) {
  CanonicalPartition cp = canonical_hyl_partition(m, N);
  double num = 0.0, den = 0.0;
  for (auto [x, lw] : cp.long_spectrum) {
    double w = std::exp(lw - cp.log_Z);
    num += static_cast<double>(x) * w;
    den += w;
  }
  return num / den / m.V;
}

double log_partition_asymptotic(const FiniteVolumeModel& m, double rho) {
  m.validate();
  const ModelParams& p = m.params;
  if (!(rho > critical_density(p))) throw DomainError("log_partition_asymptotic: rho must exceed rho_c");
  CondensateSolution s = solve_rho_bar(p, m.hyl, rho);
  if (!(s.rho_bar > 0.0)) throw DomainError("log_partition_asymptotic: no condensate at this density");
  double x = rho - s.rho_bar;  // = ρ_c − ρ_S
  double rp = density_prime(p, mu_of_rho(p, x));
  double beta = p.beta, V = m.V, dd = static_cast<double>(p.d);
  return 0.5 * std::log1p(m.hyl.b * rp) + s.S_1 * V + std::log(beta * V * p.cd()) -
         (dd / 2.0 + 1.0) * std::log(beta * s.rho_bar * V);
}

ShortSectorCheck short_sector_check(const FiniteVolumeModel& m, std::int64_t y, double eps) {
  m.validate();
  if (y < 0) throw DomainError("short_sector_check: y must be >= 0");
  if (static_cast<double>(y) > (critical_density(m.params) - eps) * m.V)
    throw DomainError("short_sector_check: y must be <= (rho_c - eps) V");
  double ls = short_log_pmf(m, y)[y];
  double lf = free_canonical_log_pmf(m, y)[y];
  return {std::exp(ls), std::exp(lf), std::exp(ls - lf)};
}

std::vector<double> joint_log_partition(const FiniteVolumeModel& m, std::int64_t N_max) {
  m.validate();
  const double coupling = m.hyl.b * m.params.beta / (2.0 * m.V);
  auto lw = long_sector_log_weights(m, N_max, coupling);
  auto ls = short_log_pmf(m, N_max);
  std::vector<double> out(static_cast<std::size_t>(N_max) + 1, kNegInf);
  for (std::int64_t n = 0; n <= N_max; ++n) {
    LogSum z;
    for (std::int64_t x = 0; x <= n; ++x)
      if (lw[x] != kNegInf) z.add(lw[x] + ls[n - x]);
    out[n] = z.value();
  }
  return out;
}

DensityMoments grand_canonical_density_exact(const FiniteVolumeModel& m, double mu_gc, std::int64_t N_max) {
  if (m.mu != 0.0) throw DomainError("grand_canonical_density_exact: model intensities must use mu = 0");
  auto lz = joint_log_partition(m, N_max);
  const double beta = m.params.beta;
  std::vector<double> lp(lz.size());
  LogSum norm;
  for (std::size_t n = 0; n < lz.size(); ++n) {
    double nd = static_cast<double>(n);
    lp[n] = lz[n] + beta * mu_gc * nd - beta * m.hyl.a * nd * nd / (2.0 * m.V);
    norm.add(lp[n]);
  }
  double ln = norm.value();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < lp.size(); ++n) {
    double w = std::exp(lp[n] - ln);
    double r = static_cast<double>(n) / m.V;
    m1 += w * r;
    m2 += w * r * r;
  }
  return {m1, std::sqrt(std::max(m2 - m1 * m1, 0.0))};
}

}  // namespace loopsoup
