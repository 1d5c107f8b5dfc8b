#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hvlab/core.hpp"
#include "hvlab/models.hpp"
#include "hvlab/parallel.hpp"
#include "hvlab/rng.hpp"

namespace hvlab {

using Table = std::array<std::array<double, 2>, 2>;
using CountTable = std::array<std::array<std::uint64_t, 2>, 2>;

/// Joint outcome statistics indexed [alpha][beta] with index 0 = +1, 1 = -1.
///
/// Monte Carlo tables carry sample counts and binomial standard errors.
/// Quadrature tables carry lattice-cell counts (n = grid^d) and zero errors.
/// Analytic tables have no counts at all (n = 0, exact = true).
struct JointStats {
  CountTable counts{};
  std::uint64_t n = 0;
  Table probs{};
  Table std_error{};
  bool exact = false;

  double p(Outcome alpha, Outcome beta) const { return probs[alpha.index()][beta.index()]; }

  static JointStats from_counts(const CountTable& counts, bool exact) {
    JointStats j;
    j.counts = counts;
    j.exact = exact;
    for (const auto& row : counts) {
      for (auto c : row) j.n += c;
    }
    if (j.n == 0) throw Error("empty counts");
    const double n = static_cast<double>(j.n);
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double p = static_cast<double>(counts[i][k]) / n;
        j.probs[i][k] = p;
        j.std_error[i][k] = exact ? 0.0 : std::sqrt(p * (1.0 - p) / n);
      }
    }
    return j;
  }

  static JointStats from_probs(const Table& probs) {
    JointStats j;
    j.probs = probs;
    j.exact = true;
    return j;
  }
};

struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;  // 0 for exact results
};

inline double singlet_joint_oracle(Outcome alpha, Outcome beta, const Setting& a, const Setting& b) {
  return (1.0 - alpha * beta * dot(a, b)) / 4.0;
}

inline JointStats singlet_joint_table(const Setting& a, const Setting& b) {
  Table t{};
  for (Outcome x : {Outcome::plus(), Outcome::minus()}) {
    for (Outcome y : {Outcome::plus(), Outcome::minus()}) t[x.index()][y.index()] = singlet_joint_oracle(x, y, a, b);
  }
  return JointStats::from_probs(t);
}

namespace detail {

inline void fill_point(const CounterRng& rng, std::size_t d, std::uint64_t i, HiddenPoint& out) {
  for (std::size_t j = 0; j < d; ++j) out.set(j, rng.uniform(i * d + j));
}

}  // namespace detail

/// Point i of the sample sequence for `seed`; coordinate j uses counter i*d + j.
inline HiddenPoint lambda_at(std::size_t d, std::uint64_t i, SeedSpec seed) {
  HiddenPoint p = HiddenPoint::zeros(d);
  detail::fill_point(CounterRng(seed), d, i, p);
  return p;
}

inline std::vector<HiddenPoint> sample_lambda(std::size_t d, std::uint64_t n, SeedSpec seed) {
  if (n == 0) throw Error("sample count must be positive");
  const CounterRng rng(seed);
  std::vector<HiddenPoint> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    HiddenPoint p = HiddenPoint::zeros(d);
    detail::fill_point(rng, d, i, p);
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

// Count of equal outcomes minus count of opposite outcomes.
inline std::int64_t agreement(const CountTable& c) {
  return static_cast<std::int64_t>(c[0][0] + c[1][1]) - static_cast<std::int64_t>(c[0][1] + c[1][0]);
}

inline CountTable add(CountTable a, const CountTable& b) {
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) a[i][k] += b[i][k];
  }
  return a;
}

}  // namespace detail

/// Monte Carlo joint table. The sample sequence depends only on `seed`, so
/// the result is identical for every worker count.
inline JointStats estimate_joint(const OrderedModel& m, TimeOrdering o, QuantumState s, const Setting& a,
                                 const Setting& b, std::uint64_t n, SeedSpec seed, unsigned workers = 1) {
  if (n == 0) throw Error("sample count must be positive");
  const CounterRng rng(seed);
  const std::size_t d = m.lambda_dim();
  auto parts = run_chunks(n, workers, [&](std::uint64_t begin, std::uint64_t end) {
    CountTable counts{};
    HiddenPoint lambda = HiddenPoint::zeros(d);
    for (std::uint64_t i = begin; i < end; ++i) {
      detail::fill_point(rng, d, i, lambda);
      const OutcomePair r = eval_pair(m, o, s, a, b, lambda);
      ++counts[r.alpha.index()][r.beta.index()];
    }
    return counts;
  });
  CountTable total{};
  for (const auto& p : parts) total = detail::add(total, p);
  return JointStats::from_counts(total, false);
}

inline constexpr std::size_t kMaxQuadratureDim = 3;

/// Calls `visit(lambda)` at every midpoint of a grid^d lattice over [0,1]^d,
/// restricted to flattened lattice indices [begin, end).
template <typename Visit>
void for_each_midpoint(std::size_t d, std::uint64_t grid, std::uint64_t begin, std::uint64_t end, Visit visit) {
  HiddenPoint lambda = HiddenPoint::zeros(d);
  const double h = 1.0 / static_cast<double>(grid);
  for (std::uint64_t i = begin; i < end; ++i) {
    std::uint64_t rest = i;
    for (std::size_t j = 0; j < d; ++j) {
      lambda.set(j, (static_cast<double>(rest % grid) + 0.5) * h);
      rest /= grid;
    }
    visit(lambda);
  }
}

inline std::uint64_t lattice_size(std::size_t d, std::uint64_t grid) {
  std::uint64_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) cells *= grid;
  return cells;
}

/// Midpoint-rule integration of the outcome indicators over [0,1]^d.
inline JointStats exact_joint(const OrderedModel& m, TimeOrdering o, QuantumState s, const Setting& a,
                              const Setting& b, std::uint64_t grid, unsigned workers = 1) {
  const std::size_t d = m.lambda_dim();
  if (d > kMaxQuadratureDim) throw Error("lambda dimension too large for quadrature; use Monte Carlo");
  if (grid < 2) throw Error("grid must be at least 2");
  const std::uint64_t cells = lattice_size(d, grid);
  auto parts = run_chunks(cells, workers, [&](std::uint64_t begin, std::uint64_t end) {
    CountTable counts{};
    for_each_midpoint(d, grid, begin, end, [&](const HiddenPoint& lambda) {
      const OutcomePair r = eval_pair(m, o, s, a, b, lambda);
      ++counts[r.alpha.index()][r.beta.index()];
    });
    return counts;
  });
  CountTable total{};
  for (const auto& p : parts) total = detail::add(total, p);
  return JointStats::from_counts(total, true);
}

inline CorrelationEstimate correlator(const JointStats& j) {
  if (!j.exact && j.n == 0) throw Error("correlator of an empty table");
  double e = 0.0;
  if (j.n > 0) {
    e = static_cast<double>(detail::agreement(j.counts)) / static_cast<double>(j.n);
  } else {
    const auto& p = j.probs;
    e = p[0][0] + p[1][1] - p[0][1] - p[1][0];
  }
  e = std::clamp(e, -1.0, 1.0);
  CorrelationEstimate out;
  out.value = e;
  if (!j.exact) {
    out.n = j.n;
    out.std_error = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(j.n));
  }
  return out;
}

enum class Estimator { MonteCarlo, Exact };

inline const char* to_string(Estimator e) { return e == Estimator::Exact ? "exact" : "mc"; }

inline Estimator parse_estimator(const std::string& s) {
  if (s == "mc" || s == "MC") return Estimator::MonteCarlo;
  if (s == "exact" || s == "Exact") return Estimator::Exact;
  throw Error("unknown mode '" + s + "'");
}

struct EstimatorConfig {
  Estimator mode = Estimator::MonteCarlo;
  std::uint64_t n = 1'000'000;
  std::uint64_t grid = 2000;
  SeedSpec seed{};
  unsigned workers = 1;
};

inline JointStats joint(const OrderedModel& m, TimeOrdering o, QuantumState s, const Setting& a, const Setting& b,
                        const EstimatorConfig& cfg) {
  return cfg.mode == Estimator::Exact ? exact_joint(m, o, s, a, b, cfg.grid, cfg.workers)
                                      : estimate_joint(m, o, s, a, b, cfg.n, cfg.seed, cfg.workers);
}

struct ChshEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;  // samples; 0 for exact
  // Correlators for (a,b), (a,b'), (a',b), (a',b').
  std::array<CorrelationEstimate, 4> terms{};
};

/// S = E(a,b) + E(a,b') + E(a',b) - E(a',b').
///
/// Every term is evaluated on the same hidden-variable points, so the Monte
/// Carlo error bar is the standard error of the per-point CHSH expression.
inline ChshEstimate chsh(const OrderedModel& m, TimeOrdering o, QuantumState s, const ChshSettings& settings,
                         const EstimatorConfig& cfg) {
  const auto pairs = settings.pairs();
  constexpr std::array<int, 4> sign{1, 1, 1, -1};
  ChshEstimate out;
  // S is formed from integer agreement counts and divided once, so algebraic
  // identities between terms hold exactly.
  if (cfg.mode == Estimator::Exact) {
    std::int64_t total = 0;
    std::uint64_t cells = 0;
    for (int k = 0; k < 4; ++k) {
      const JointStats j = exact_joint(m, o, s, pairs[k].a, pairs[k].b, cfg.grid, cfg.workers);
      out.terms[k] = correlator(j);
      total += sign[k] * detail::agreement(j.counts);
      cells = j.n;
    }
    out.value = static_cast<double>(total) / static_cast<double>(cells);
    return out;
  }
  if (cfg.n == 0) throw Error("sample count must be positive");
  struct Partial {
    std::array<CountTable, 4> counts{};
    std::int64_t sum_sq = 0;
  };
  const CounterRng rng(cfg.seed);
  const std::size_t d = m.lambda_dim();
  auto parts = run_chunks(cfg.n, cfg.workers, [&](std::uint64_t begin, std::uint64_t end) {
    Partial p;
    HiddenPoint lambda = HiddenPoint::zeros(d);
    for (std::uint64_t i = begin; i < end; ++i) {
      detail::fill_point(rng, d, i, lambda);
      int point_s = 0;
      for (int k = 0; k < 4; ++k) {
        const OutcomePair r = eval_pair(m, o, s, pairs[k].a, pairs[k].b, lambda);
        ++p.counts[k][r.alpha.index()][r.beta.index()];
        point_s += sign[k] * (r.alpha * r.beta);
      }
      p.sum_sq += point_s * point_s;
    }
    return p;
  });
  Partial total;
  for (const auto& p : parts) {
    for (int k = 0; k < 4; ++k) total.counts[k] = detail::add(total.counts[k], p.counts[k]);
    total.sum_sq += p.sum_sq;
  }
  std::int64_t agree = 0;
  for (int k = 0; k < 4; ++k) {
    out.terms[k] = correlator(JointStats::from_counts(total.counts[k], false));
    agree += sign[k] * detail::agreement(total.counts[k]);
  }
  out.value = static_cast<double>(agree) / static_cast<double>(cfg.n);
  const double n = static_cast<double>(cfg.n);
  const double variance = std::max(0.0, static_cast<double>(total.sum_sq) / n - out.value * out.value);
  out.std_error = std::sqrt(variance / n);
  out.n = cfg.n;
  return out;
}

}  // namespace hvlab
