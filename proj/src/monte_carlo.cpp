#include "loopsoup/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "loopsoup/errors.hpp"

namespace loopsoup {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t sum_of(const std::vector<std::int64_t>& v) {
  std::int64_t s = 0;
  for (auto e : v) s += e;
  return s;
}

// Net occupation changes of a move, as (length, delta) pairs.
std::vector<std::pair<std::int64_t, std::int64_t>> deltas(const MoveChange& c) {
  std::vector<std::pair<std::int64_t, std::int64_t>> d;
  auto bump = [&](std::int64_t j, std::int64_t by) {
    for (auto& e : d)
      if (e.first == j) {
        e.second += by;
        return;
      }
    d.emplace_back(j, by);
  };
  for (auto j : c.removed) bump(j, -1);
  for (auto j : c.added) bump(j, +1);
  return d;
}

MoveType classify(const MoveChange& c) {
  auto r = c.removed.size(), a = c.added.size();
  bool same_mass = sum_of(c.removed) == sum_of(c.added);
  if (r == 1 && a == 2 && same_mass) return MoveType::split;
  if (r == 2 && a == 1 && same_mass) return MoveType::merge;
  if (r == 2 && a == 2 && same_mass) return MoveType::reslice;
  if (r == 0 && a == 1) return MoveType::insert;
  if (r == 1 && a == 0) return MoveType::remove;
  if (r == 1 && a == 1 && c.removed[0] != c.added[0]) return MoveType::resize;
  return MoveType::none;
}

MoveChange reversed(const MoveChange& c) {
  MoveChange r;
  r.removed = c.added;
  r.added = c.removed;
  r.type = classify(r);
  return r;
}

}  // namespace

std::string to_string(Interaction i) {
  switch (i) {
    case Interaction::free: return "free";
    case Interaction::pmf: return "pmf";
    case Interaction::hyl: return "hyl";
  }
  return "?";
}

std::string to_string(MoveType t) {
  switch (t) {
    case MoveType::none: return "none";
    case MoveType::split: return "split";
    case MoveType::merge: return "merge";
    case MoveType::reslice: return "reslice";
    case MoveType::insert: return "insert";
    case MoveType::remove: return "delete";
    case MoveType::resize: return "resize";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (n_chains < 1) throw ConfigError("SamplerConfig: n_chains must be >= 1");
  if (sweeps < 1) throw ConfigError("SamplerConfig: sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw ConfigError("SamplerConfig: need 0 <= burn_in < sweeps");
  const auto& w = move_weights;
  if (w.split < 0 || w.merge < 0 || w.reslice < 0 || std::fabs(w.split + w.merge + w.reslice - 1.0) > 1e-12)
    throw ConfigError("SamplerConfig: move weights must be non-negative and sum to 1");
  if (!(exchange_probability > 0.0 && exchange_probability < 1.0))
    throw ConfigError("SamplerConfig: exchange_probability must lie in (0, 1)");
  if (steps_per_sweep < 0 || insert_jmax < 0) throw ConfigError("SamplerConfig: negative step or length settings");
}

// ---- CycleState ----

CycleState::CycleState(const CycleCounts& c, std::int64_t q) : q_(q) {
  c.validate();
  for (auto [j, n] : c.counts)
    for (std::int64_t k = 0; k < n; ++k) add(j);
}

std::int64_t CycleState::largest() const {
  for (std::int64_t j = static_cast<std::int64_t>(counts_.size()) - 1; j >= 1; --j)
    if (counts_[j] > 0) return j;
  return 0;
}

CycleCounts CycleState::counts() const {
  CycleCounts c;
  for (std::size_t j = 1; j < counts_.size(); ++j)
    if (counts_[j] > 0) c.counts[static_cast<std::int64_t>(j)] = counts_[j];
  return c;
}

void CycleState::remove_at(std::int64_t idx) {
  std::int64_t j = loops_[idx];
  loops_[idx] = loops_.back();
  loops_.pop_back();
  --counts_[j];
  N_ -= j;
  if (j >= q_) long_mass_ -= j;
}

void CycleState::add(std::int64_t j) {
  if (j >= static_cast<std::int64_t>(counts_.size())) counts_.resize(static_cast<std::size_t>(j) * 2 + 2, 0);
  loops_.push_back(j);
  ++counts_[j];
  N_ += j;
  if (j >= q_) long_mass_ += j;
}

// ---- ProposalKernel ----

ProposalKernel::ProposalKernel(const FiniteVolumeModel& m, Ensemble e, Interaction inter, const SamplerConfig& cfg)
    : m_(m), ens_(e), inter_(inter), w_(cfg.move_weights), p_exchange_(cfg.exchange_probability) {
  m_.validate();
  cfg.validate();
  if (e == Ensemble::grand_canonical) {
    if (inter == Interaction::free && m.mu > 0.0)
      throw ConfigError("free grand-canonical sampling needs mu <= 0");
    if (inter == Interaction::pmf && !(m.hyl.a > 0.0))
      throw ConfigError("pmf grand-canonical sampling needs a > 0");
    if (inter == Interaction::hyl && !(m.hyl.a > m.hyl.b && m.hyl.b >= 0.0))
      throw ConfigError("hyl grand-canonical sampling needs a > b");
  } else {
    p_exchange_ = 0.0;
  }
  double mean_step = std::max(1.0, std::sqrt(m.V));
  geo_p_ = 1.0 / mean_step;
  jmax_ = cfg.insert_jmax > 0 ? cfg.insert_jmax : static_cast<std::int64_t>(std::ceil(m.V));

  std::int64_t cache = std::max<std::int64_t>(jmax_, static_cast<std::int64_t>(8.0 * m.V)) + 1;
  log_lambda_cache_.resize(static_cast<std::size_t>(cache) + 1, kNegInf);
  for (std::int64_t j = 1; j <= cache; ++j) log_lambda_cache_[j] = log_intensity(m_, j);

  if (ens_ == Ensemble::grand_canonical) {
    // Insert lengths follow λ_j at min(μ, 0), normalised on 1..jmax.
    double shift = m.params.beta * std::max(m.mu, 0.0);
    insert_logp_.assign(static_cast<std::size_t>(jmax_) + 1, kNegInf);
    LogSum norm;
    for (std::int64_t j = 1; j <= jmax_; ++j) {
      insert_logp_[j] = log_lambda_cache_[j] - shift * static_cast<double>(j);
      norm.add(insert_logp_[j]);
    }
    double ln = norm.value();
    insert_cdf_.assign(static_cast<std::size_t>(jmax_) + 1, 0.0);
    double acc = 0.0;
    for (std::int64_t j = 1; j <= jmax_; ++j) {
      insert_logp_[j] -= ln;
      acc += std::exp(insert_logp_[j]);
      insert_cdf_[j] = acc;
    }
    for (auto& v : insert_cdf_) v /= acc;
  }
}

double ProposalKernel::log_lambda(std::int64_t j) const {
  if (j < static_cast<std::int64_t>(log_lambda_cache_.size())) return log_lambda_cache_[j];
  return log_intensity(m_, j);
}

double ProposalKernel::step_probability(std::int64_t s) const {
  if (s < 1) return 0.0;
  double geo = geo_p_ * std::pow(1.0 - geo_p_, static_cast<double>(s - 1));
  return 0.5 * (s == 1 ? 1.0 : 0.0) + 0.5 * geo;
}

double ProposalKernel::log_target(const CycleCounts& c) const {
  const double beta = m_.params.beta;
  double lp = 0.0;
  double N = 0.0;
  for (auto [j, n] : c.counts) {
    double nd = static_cast<double>(n), jd = static_cast<double>(j);
    lp += nd * log_lambda(j) - std::lgamma(nd + 1.0);
    if (inter_ == Interaction::hyl && j >= m_.q) lp += m_.hyl.b * beta / (2.0 * m_.V) * jd * jd * nd * nd;
    N += jd * nd;
  }
  if (ens_ == Ensemble::grand_canonical && inter_ != Interaction::free)
    lp -= m_.hyl.a * beta / (2.0 * m_.V) * N * N;
  return lp;
}

double ProposalKernel::delta_log_target(const CycleState& s, const MoveChange& c) const {
  const double beta = m_.params.beta;
  const double coupling = inter_ == Interaction::hyl ? m_.hyl.b * beta / (2.0 * m_.V) : 0.0;
  double d = 0.0;
  for (auto [j, dn] : deltas(c)) {
    if (dn == 0) continue;
    double n0 = static_cast<double>(s.n(j)), n1 = n0 + static_cast<double>(dn), jd = static_cast<double>(j);
    d += static_cast<double>(dn) * log_lambda(j) - (std::lgamma(n1 + 1.0) - std::lgamma(n0 + 1.0));
    if (j >= m_.q) d += coupling * jd * jd * (n1 * n1 - n0 * n0);
  }
  if (ens_ == Ensemble::grand_canonical && inter_ != Interaction::free) {
    double N0 = static_cast<double>(s.N());
    double N1 = N0 + static_cast<double>(sum_of(c.added) - sum_of(c.removed));
    d -= m_.hyl.a * beta / (2.0 * m_.V) * (N1 * N1 - N0 * N0);
  }
  return d;
}

template <class CountFn>
double ProposalKernel::prob_impl(CountFn n, std::int64_t K, const MoveChange& c) const {
  const double wc = 1.0 - p_exchange_;
  const double Kd = static_cast<double>(K);
  switch (classify(c)) {
    case MoveType::split: {
      std::int64_t j = c.removed[0], j1 = c.added[0], j2 = c.added[1];
      if (K < 1 || j < 2 || n(j) < 1) return 0.0;
      double ways = (j1 != j2) ? 2.0 : 1.0;
      return wc * w_.split * static_cast<double>(n(j)) / Kd * ways / static_cast<double>(j - 1);
    }
    case MoveType::merge: {
      std::int64_t a = c.removed[0], b = c.removed[1];
      if (K < 2) return 0.0;
      double na = static_cast<double>(n(a)), nb = static_cast<double>(n(b));
      double pairs = (a != b) ? na * nb : na * (na - 1.0) / 2.0;
      return wc * w_.merge * pairs / (Kd * (Kd - 1.0) / 2.0);
    }
    case MoveType::reslice: {
      if (K < 2) return 0.0;
      std::int64_t a = c.removed[0], b = c.removed[1], x = c.added[0], y = c.added[1];
      std::vector<std::pair<std::int64_t, std::int64_t>> from{{a, b}}, to{{x, y}};
      if (a != b) from.emplace_back(b, a);
      if (x != y) to.emplace_back(y, x);
      double total = 0.0;
      for (auto [A, B] : from) {
        double nA = static_cast<double>(n(A)), nB = static_cast<double>(n(B));
        double ordered = (A != B) ? nA * nB : nA * (nA - 1.0);
        for (auto [An, Bn] : to) {
          std::int64_t s = A - An;
          if (s >= 1 && Bn - B == s) total += ordered / (Kd * (Kd - 1.0)) * step_probability(s);
        }
      }
      return wc * w_.reslice * total;
    }
    case MoveType::insert: {
      if (ens_ != Ensemble::grand_canonical) return 0.0;
      std::int64_t j = c.added[0];
      if (j < 1 || j > jmax_) return 0.0;
      return p_exchange_ / 3.0 * std::exp(insert_logp_[j]);
    }
    case MoveType::remove: {
      if (ens_ != Ensemble::grand_canonical || K < 1) return 0.0;
      return p_exchange_ / 3.0 * static_cast<double>(n(c.removed[0])) / Kd;
    }
    case MoveType::resize: {
      if (ens_ != Ensemble::grand_canonical || K < 1) return 0.0;
      std::int64_t j = c.removed[0], jn = c.added[0];
      if (jn < 1) return 0.0;
      return p_exchange_ / 3.0 * static_cast<double>(n(j)) / Kd * 0.5 * step_probability(std::llabs(jn - j));
    }
    case MoveType::none:
      return 0.0;
  }
  return 0.0;
}

double ProposalKernel::proposal_probability(const CycleState& s, const MoveChange& c) const {
  return prob_impl([&](std::int64_t j) { return s.n(j); }, s.K(), c);
}

double ProposalKernel::proposal_probability(const CycleCounts& s, const MoveChange& c) const {
  return proposal_probability(CycleState(s, m_.q), c);
}

double ProposalKernel::log_acceptance(const CycleState& s, const MoveChange& c) const {
  double fwd = proposal_probability(s, c);
  if (!(fwd > 0.0)) return kNegInf;
  auto dl = deltas(c);
  auto n_after = [&](std::int64_t j) {
    std::int64_t v = s.n(j);
    for (auto [len, dn] : dl)
      if (len == j) v += dn;
    return v;
  };
  std::int64_t K_after = s.K() + static_cast<std::int64_t>(c.added.size()) - static_cast<std::int64_t>(c.removed.size());
  double bwd = prob_impl(n_after, K_after, reversed(c));
  if (!(bwd > 0.0)) return kNegInf;
  return delta_log_target(s, c) + std::log(bwd) - std::log(fwd);
}

double ProposalKernel::log_acceptance(const CycleCounts& s, const MoveChange& c) const {
  return log_acceptance(CycleState(s, m_.q), c);
}

double ProposalKernel::energy(const CycleState& s) const {
  double e = 0.0;
  if (inter_ == Interaction::hyl) {
    for (std::int64_t j = m_.q; j <= s.largest(); ++j) {
      double jd = static_cast<double>(j), nd = static_cast<double>(s.n(j));
      e -= m_.hyl.b / (2.0 * m_.V) * jd * jd * nd * nd;
    }
  }
  if (ens_ == Ensemble::grand_canonical && inter_ != Interaction::free) {
    double N = static_cast<double>(s.N());
    e += m_.hyl.a / (2.0 * m_.V) * N * N;
  }
  return e;
}

MoveChange ProposalKernel::draw(const CycleState& s, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::int64_t K = s.K();
  auto pick = [&](std::int64_t n) { return std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng); };
  MoveChange c;

  if (ens_ == Ensemble::grand_canonical && U(rng) < p_exchange_) {
    double v = U(rng);
    if (v < 1.0 / 3.0) {
      double u = U(rng);
      auto it = std::lower_bound(insert_cdf_.begin() + 1, insert_cdf_.end(), u);
      std::int64_t j = std::min<std::int64_t>(static_cast<std::int64_t>(it - insert_cdf_.begin()), jmax_);
      c.type = MoveType::insert;
      c.added = {j};
    } else if (v < 2.0 / 3.0) {
      c.type = MoveType::remove;
      if (K == 0) return c;
      std::int64_t i = pick(K);
      c.removed = {s.loop(i)};
      c.removed_idx = {i};
    } else {
      // shift one loop's length by ±s; lets a macroscopic loop follow N quickly
      c.type = MoveType::resize;
      if (K == 0) return c;
      std::int64_t i = pick(K);
      std::int64_t step = 1;
      if (U(rng) >= 0.5) step = 1 + std::geometric_distribution<std::int64_t>(geo_p_)(rng);
      std::int64_t j = s.loop(i), jn = U(rng) < 0.5 ? j - step : j + step;
      if (jn < 1) return c;
      c.removed = {j};
      c.added = {jn};
      c.removed_idx = {i};
    }
    return c;
  }

  double u = U(rng);
  if (u < w_.split) {
    c.type = MoveType::split;
    if (K == 0) return c;
    std::int64_t i = pick(K);
    std::int64_t j = s.loop(i);
    if (j < 2) return c;
    std::int64_t j1 = 1 + pick(j - 1);
    c.removed = {j};
    c.added = {j1, j - j1};
    c.removed_idx = {i};
  } else if (u < w_.split + w_.merge) {
    c.type = MoveType::merge;
    if (K < 2) return c;
    std::int64_t i1 = pick(K), i2 = pick(K - 1);
    if (i2 >= i1) ++i2;
    c.removed = {s.loop(i1), s.loop(i2)};
    c.added = {s.loop(i1) + s.loop(i2)};
    c.removed_idx = {i1, i2};
  } else {
    c.type = MoveType::reslice;
    if (K < 2) return c;
    std::int64_t i1 = pick(K), i2 = pick(K - 1);
    if (i2 >= i1) ++i2;
    std::int64_t step = 1;
    if (U(rng) >= 0.5) step = 1 + std::geometric_distribution<std::int64_t>(geo_p_)(rng);
    std::int64_t A = s.loop(i1), B = s.loop(i2);
    if (step >= A) return c;
    std::int64_t An = A - step, Bn = B + step;
    if (An == B) return c;  // same multiset
    c.removed = {A, B};
    c.added = {An, Bn};
    c.removed_idx = {i1, i2};
  }
  return c;
}

MoveChange change_between(const CycleCounts& x, const CycleCounts& y) {
  MoveChange c;
  auto it = x.counts.begin();
  auto jt = y.counts.begin();
  auto emit = [](std::vector<std::int64_t>& v, std::int64_t j, std::int64_t n) {
    for (std::int64_t k = 0; k < n; ++k) v.push_back(j);
  };
  while (it != x.counts.end() || jt != y.counts.end()) {
    if (jt == y.counts.end() || (it != x.counts.end() && it->first < jt->first)) {
      emit(c.removed, it->first, it->second);
      ++it;
    } else if (it == x.counts.end() || jt->first < it->first) {
      emit(c.added, jt->first, jt->second);
      ++jt;
    } else {
      if (it->second > jt->second) emit(c.removed, it->first, it->second - jt->second);
      else emit(c.added, it->first, jt->second - it->second);
      ++it;
      ++jt;
    }
  }
  c.type = classify(c);
  return c;
}

std::vector<CycleCounts> partitions_of(std::int64_t N) {
  std::vector<CycleCounts> out;
  std::vector<std::int64_t> parts;
  std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t rest, std::int64_t cap) {
    if (rest == 0) {
      CycleCounts c;
      for (auto p : parts) ++c.counts[p];
      out.push_back(std::move(c));
      return;
    }
    for (std::int64_t p = std::min(rest, cap); p >= 1; --p) {
      parts.push_back(p);
      rec(rest - p, p);
      parts.pop_back();
    }
  };
  rec(N, N);
  return out;
}

// ---- Chain ----

Chain::Chain(const ProposalKernel& k, CycleState init, std::uint64_t seed) : k_(k), s_(std::move(init)), rng_(seed) {}

void Chain::step() {
  MoveChange c = k_.draw(s_, rng_);
  auto& stat = acc_[to_string(c.type)];
  ++stat.second;
  if (c.removed.empty() && c.added.empty()) return;
  double la = k_.log_acceptance(s_, c);
  if (la < 0.0) {
    if (la == kNegInf) return;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (!(std::log(u) < la)) return;
  }
  ++stat.first;
  auto idx = c.removed_idx;
  std::sort(idx.rbegin(), idx.rend());
  for (auto i : idx) s_.remove_at(i);
  for (auto j : c.added) s_.add(j);
}

void Chain::sweep(std::int64_t steps) {
  for (std::int64_t i = 0; i < steps; ++i) step();
}

// ---- drivers ----

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  // splitmix64 of (seed, chain)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(chain) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct ChainOutput {
  std::vector<double> series;
  std::vector<TraceRow> trace;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acceptance;
};

using Observable = double (*)(const CycleState&, double V);

ChainOutput run_chain(const ProposalKernel& k, const CycleState& init, const SamplerConfig& cfg, int chain,
                      std::int64_t steps, Observable obs, bool want_trace, const SampleVisitor* visit) {
  ChainOutput out;
  Chain ch(k, init, chain_seed(cfg.seed, chain));
  const double V = k.model().V;
  for (std::int64_t sw = 0; sw < cfg.sweeps; ++sw) {
    ch.sweep(steps);
    if (sw < cfg.burn_in) continue;
    const CycleState& s = ch.state();
    if (visit) (*visit)(chain, sw, s);
    if (obs) out.series.push_back(obs(s, V));
    if (want_trace) out.trace.push_back({chain, sw, s.N(), s.long_mass(), s.largest(), k.energy(s)});
  }
  out.acceptance = ch.acceptance();
  return out;
}

EstimateReport run_all(const ProposalKernel& k, const CycleState& init, const SamplerConfig& cfg,
                       std::int64_t steps, Observable obs, std::vector<TraceRow>* trace) {
  std::vector<ChainOutput> outs(static_cast<std::size_t>(cfg.n_chains));
  std::vector<std::thread> workers;
  for (int c = 0; c < cfg.n_chains; ++c)
    workers.emplace_back([&, c] { outs[c] = run_chain(k, init, cfg, c, steps, obs, trace != nullptr, nullptr); });
  for (auto& w : workers) w.join();

  std::vector<std::vector<double>> series;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acc;
  for (auto& o : outs) {
    series.push_back(std::move(o.series));
    for (auto& [name, v] : o.acceptance) {
      acc[name].first += v.first;
      acc[name].second += v.second;
    }
    if (trace) trace->insert(trace->end(), o.trace.begin(), o.trace.end());
  }
  EstimateReport r = summarize_series(series);
  for (auto& [name, v] : acc)
    if (name != "none" && v.second > 0) r.acceptance_rates[name] = static_cast<double>(v.first) / v.second;
  return r;
}

CycleState canonical_start(std::int64_t N, std::int64_t q) {
  CycleCounts c;
  c.counts[N] = 1;
  return CycleState(c, q);
}

double long_density(const CycleState& s, double V) { return static_cast<double>(s.long_mass()) / V; }
double particle_density(const CycleState& s, double V) { return static_cast<double>(s.N()) / V; }

std::int64_t gc_steps(const FiniteVolumeModel& m, const SamplerConfig& cfg) {
  return cfg.steps_per_sweep > 0 ? cfg.steps_per_sweep : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(m.V / 4.0)));
}

}  // namespace

EstimateReport summarize_series(const std::vector<std::vector<double>>& series) {
  EstimateReport r;
  r.n_chains = static_cast<int>(series.size());
  double mean_sum = 0.0, var_se = 0.0;
  std::vector<double> pooled;
  for (const auto& s : series) {
    std::int64_t n = static_cast<std::int64_t>(s.size());
    if (n == 0) throw ConfigError("summarize_series: empty chain");
    double m = 0.0;
    for (double v : s) m += v;
    m /= static_cast<double>(n);
    mean_sum += m;
    std::int64_t B = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))));
    std::int64_t nb = n / B;
    if (nb >= 2) {
      double bm_mean = 0.0;
      std::vector<double> bm(static_cast<std::size_t>(nb));
      for (std::int64_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::int64_t i = b * B; i < (b + 1) * B; ++i) acc += s[i];
        bm[b] = acc / static_cast<double>(B);
        bm_mean += bm[b];
      }
      bm_mean /= static_cast<double>(nb);
      double v = 0.0;
      for (double x : bm) v += (x - bm_mean) * (x - bm_mean);
      v /= static_cast<double>(nb - 1);
      var_se += v / static_cast<double>(nb);
    }
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  const double C = static_cast<double>(series.size());
  r.mean = mean_sum / C;
  r.std_error = std::sqrt(var_se) / C;
  r.samples = static_cast<std::int64_t>(pooled.size());

  double pm = 0.0;
  for (double v : pooled) pm += v;
  pm /= static_cast<double>(pooled.size());
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : pooled) {
    double d = v - pm;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(pooled.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    double skew = m3 / std::pow(m2, 1.5);
    double kurt = m4 / (m2 * m2);
    r.bimodality_coefficient = (skew * skew + 1.0) / kurt;
  }
  if (r.std_error > 0.0) r.ess = std::min(n, m2 / (r.std_error * r.std_error));
  else r.ess = n;
  return r;
}

void sample_canonical_hyl(const FiniteVolumeModel& m, std::int64_t N, const SamplerConfig& cfg,
                          const SampleVisitor& visit) {
  if (N < 1) throw ConfigError("sample_canonical_hyl: N must be >= 1");
  ProposalKernel k(m, Ensemble::canonical, Interaction::hyl, cfg);
  std::int64_t steps = cfg.steps_per_sweep > 0 ? cfg.steps_per_sweep : N;
  for (int c = 0; c < cfg.n_chains; ++c) run_chain(k, canonical_start(N, m.q), cfg, c, steps, nullptr, false, &visit);
}

void sample_grand_canonical(const FiniteVolumeModel& m, const SamplerConfig& cfg, Interaction inter,
                            const SampleVisitor& visit) {
  ProposalKernel k(m, Ensemble::grand_canonical, inter, cfg);
  for (int c = 0; c < cfg.n_chains; ++c) run_chain(k, CycleState({}, m.q), cfg, c, gc_steps(m, cfg), nullptr, false, &visit);
}

EstimateReport estimate_long_density(const FiniteVolumeModel& m, std::int64_t N, const SamplerConfig& cfg,
                                     std::vector<TraceRow>* trace) {
  if (N < 1) throw ConfigError("estimate_long_density: N must be >= 1");
  ProposalKernel k(m, Ensemble::canonical, Interaction::hyl, cfg);
  std::int64_t steps = cfg.steps_per_sweep > 0 ? cfg.steps_per_sweep : N;
  return run_all(k, canonical_start(N, m.q), cfg, steps, &long_density, trace);
}

EstimateReport estimate_gc_density(const FiniteVolumeModel& m, const SamplerConfig& cfg, Interaction inter,
                                   std::vector<TraceRow>* trace) {
  ProposalKernel k(m, Ensemble::grand_canonical, inter, cfg);
  return run_all(k, CycleState({}, m.q), cfg, gc_steps(m, cfg), &particle_density, trace);
}

}  // namespace loopsoup
