#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hvlab/core.hpp"
#include "hvlab/models.hpp"
#include "hvlab/parallel.hpp"
#include "hvlab/stats.hpp"

namespace hvlab {

enum class Party { Alice, Bob };

inline const char* to_string(Party p) { return p == Party::Alice ? "Alice" : "Bob"; }

/// A probe where one party's outcome depends on the time ordering.
/// `first_value` is that party's outcome when measuring first, `second_value`
/// when measuring second.
struct CovarianceWitness {
  std::uint64_t probe = 0;  // index into the (setting pair, lambda) probe list
  HiddenPoint lambda;
  Setting a;
  Setting b;
  Party side = Party::Alice;
  Outcome first_value = Outcome::plus();
  Outcome second_value = Outcome::plus();
};

struct CovarianceReport {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::vector<CovarianceWitness> witnesses;
  double violation_fraction = 0.0;
};

inline constexpr std::size_t kDefaultWitnessCap = 32;

namespace detail {

inline std::vector<CovarianceWitness> probe_violations(const OrderedModel& m, QuantumState s, std::uint64_t probe,
                                                       const Setting& a, const Setting& b, const HiddenPoint& lambda) {
  std::vector<CovarianceWitness> out;
  const Outcome alice_first = m.first(TimeOrdering::AB, s, a, lambda);
  const Outcome alice_second = m.second(TimeOrdering::BA, s, a, b, lambda);
  if (alice_first != alice_second) out.push_back({probe, lambda, a, b, Party::Alice, alice_first, alice_second});
  const Outcome bob_first = m.first(TimeOrdering::BA, s, b, lambda);
  const Outcome bob_second = m.second(TimeOrdering::AB, s, a, b, lambda);
  if (bob_first != bob_second) out.push_back({probe, lambda, a, b, Party::Bob, bob_first, bob_second});
  return out;
}

}  // namespace detail

/// Pointwise check that each party's outcome is the same function in both
/// orderings: F_AB(a) = S_BA(a,b) for Alice and F_BA(b) = S_AB(a,b) for Bob.
///
/// Probes are the Cartesian product of `settings` and `lambdas`, indexed
/// probe = pair_index * lambdas.size() + lambda_index. A probe counts once
/// towards `violations` even if both sides fail. Witnesses are kept in probe
/// order, Alice before Bob, up to `witness_cap`.
inline CovarianceReport check_covariance(const OrderedModel& m, QuantumState s, const std::vector<SettingPair>& settings,
                                         const std::vector<HiddenPoint>& lambdas,
                                         std::size_t witness_cap = kDefaultWitnessCap, unsigned workers = 1) {
  for (const auto& l : lambdas) {
    if (l.dim() != m.lambda_dim()) throw Error("lambda dimension");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(settings.size()) * lambdas.size();
  struct Partial {
    std::uint64_t violations = 0;
    std::vector<CovarianceWitness> witnesses;
  };
  auto parts = run_chunks(total, workers, [&](std::uint64_t begin, std::uint64_t end) {
    Partial p;
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto& pair = settings[i / lambdas.size()];
      auto found = detail::probe_violations(m, s, i, pair.a, pair.b, lambdas[i % lambdas.size()]);
      if (found.empty()) continue;
      ++p.violations;
      for (auto& w : found) {
        if (p.witnesses.size() < witness_cap) p.witnesses.push_back(std::move(w));
      }
    }
    return p;
  });
  CovarianceReport report;
  report.checked = total;
  for (auto& p : parts) {
    report.violations += p.violations;
    for (auto& w : p.witnesses) {
      if (report.witnesses.size() < witness_cap) report.witnesses.push_back(std::move(w));
    }
  }
  report.violation_fraction = total == 0 ? 0.0 : static_cast<double>(report.violations) / static_cast<double>(total);
  return report;
}

/// Bell-local model: each party's response depends on its own setting only.
class LocalModelView {
 public:
  LocalModelView(ModelPtr model, QuantumState state) : model_(std::move(model)), state_(state) {}

  /// F_AB(a, lambda).
  Outcome responds_alice(const Setting& a, const HiddenPoint& lambda) const {
    return model_->first(TimeOrdering::AB, state_, a, lambda);
  }
  /// F_BA(b, lambda).
  Outcome responds_bob(const Setting& b, const HiddenPoint& lambda) const {
    return model_->first(TimeOrdering::BA, state_, b, lambda);
  }

  std::size_t lambda_dim() const { return model_->lambda_dim(); }
  const ModelPtr& source() const { return model_; }

 private:
  ModelPtr model_;
  QuantumState state_;
};

/// Wraps a local view as an ordered model whose responses ignore ordering.
inline ModelPtr as_ordered_model(const LocalModelView& view) {
  auto v = std::make_shared<LocalModelView>(view);
  return std::make_shared<FunctionModel>(
      "local-view(" + view.source()->name() + ")", view.lambda_dim(),
      [v](TimeOrdering o, QuantumState, const Setting& x, const HiddenPoint& l) {
        return o == TimeOrdering::AB ? v->responds_alice(x, l) : v->responds_bob(x, l);
      },
      [v](TimeOrdering o, QuantumState, const Setting& a, const Setting& b, const HiddenPoint& l) {
        return o == TimeOrdering::AB ? v->responds_bob(b, l) : v->responds_alice(a, l);
      });
}

class NotCovariantError : public Error {
 public:
  NotCovariantError(CovarianceWitness witness, CovarianceReport report)
      : Error("model is not covariant on probe set"), witness_(std::move(witness)), report_(std::move(report)) {}
  const CovarianceWitness& witness() const { return witness_; }
  const CovarianceReport& report() const { return report_; }

 private:
  CovarianceWitness witness_;
  CovarianceReport report_;
};

/// Covariance forces S_BA(a,b) = F_AB(a) and S_AB(a,b) = F_BA(b), so the
/// first-mover functions alone already define a local model. Throws
/// NotCovariantError carrying the first witness if any probe disagrees.
inline LocalModelView reduce_to_local(const ModelPtr& m, QuantumState s, const std::vector<SettingPair>& settings,
                                      const std::vector<HiddenPoint>& lambdas, unsigned workers = 1) {
  CovarianceReport report = check_covariance(*m, s, settings, lambdas, kDefaultWitnessCap, workers);
  if (report.violations > 0) {
    CovarianceWitness first = report.witnesses.front();
    throw NotCovariantError(std::move(first), std::move(report));
  }
  return LocalModelView(m, s);
}

/// Max over cells of |P_AB - P_BA| from quadrature in both orderings.
inline double frame_consistency(const OrderedModel& m, QuantumState s, const Setting& a, const Setting& b,
                                std::uint64_t grid, unsigned workers = 1) {
  const JointStats ab = exact_joint(m, TimeOrdering::AB, s, a, b, grid, workers);
  const JointStats ba = exact_joint(m, TimeOrdering::BA, s, a, b, grid, workers);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(ab.probs[i][k] - ba.probs[i][k]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Finite scenario: two settings per side, one hidden-variable atom.

/// Deterministic four-function strategy over setting indices x, y in {0, 1}.
/// Tables are indexed [x] for f_ab, [y] for f_ba and [x][y] for s_ab, s_ba.
struct FiniteStrategy {
  std::array<Outcome, 2> f_ab{Outcome::plus(), Outcome::plus()};
  std::array<std::array<Outcome, 2>, 2> s_ab{{{Outcome::plus(), Outcome::plus()}, {Outcome::plus(), Outcome::plus()}}};
  std::array<Outcome, 2> f_ba{Outcome::plus(), Outcome::plus()};
  std::array<std::array<Outcome, 2>, 2> s_ba{{{Outcome::plus(), Outcome::plus()}, {Outcome::plus(), Outcome::plus()}}};

  static constexpr std::uint32_t kCount = 4096;

  /// Bit layout of `id` (set bit = -1): f_ab in bits 0-1 (x), s_ab in bits
  /// 2-5 (2x+y), f_ba in bits 6-7 (y), s_ba in bits 8-11 (2x+y).
  static FiniteStrategy decode(std::uint32_t id) {
    if (id >= kCount) throw Error("strategy id out of range");
    auto bit = [id](int k) { return Outcome::from_bool(((id >> k) & 1u) == 0); };
    FiniteStrategy st;
    for (int x = 0; x < 2; ++x) {
      st.f_ab[x] = bit(x);
      st.f_ba[x] = bit(6 + x);
      for (int y = 0; y < 2; ++y) {
        st.s_ab[x][y] = bit(2 + 2 * x + y);
        st.s_ba[x][y] = bit(8 + 2 * x + y);
      }
    }
    return st;
  }

  std::uint32_t encode() const {
    std::uint32_t id = 0;
    auto put = [&id](int k, Outcome o) { id |= (o.is_plus() ? 0u : 1u) << k; };
    for (int x = 0; x < 2; ++x) {
      put(x, f_ab[x]);
      put(6 + x, f_ba[x]);
      for (int y = 0; y < 2; ++y) {
        put(2 + 2 * x + y, s_ab[x][y]);
        put(8 + 2 * x + y, s_ba[x][y]);
      }
    }
    return id;
  }

  /// Outcomes (alpha, beta) for settings (x, y) in the given frame.
  OutcomePair outcomes(TimeOrdering o, int x, int y) const {
    if (o == TimeOrdering::AB) return {f_ab[x], s_ab[x][y]};
    return {s_ba[x][y], f_ba[y]};
  }

  /// Products alpha*beta per (x, y); with one atom these are the correlators.
  std::array<std::array<int, 2>, 2> correlations(TimeOrdering o) const {
    std::array<std::array<int, 2>, 2> e{};
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const OutcomePair r = outcomes(o, x, y);
        e[x][y] = r.alpha * r.beta;
      }
    }
    return e;
  }

  int chsh(TimeOrdering o) const {
    const auto e = correlations(o);
    return e[0][0] + e[0][1] + e[1][0] - e[1][1];
  }

  bool covariant() const {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        if (s_ba[x][y] != f_ab[x] || s_ab[x][y] != f_ba[y]) return false;
      }
    }
    return true;
  }

  /// The unique covariant strategy with the given first-mover functions.
  static FiniteStrategy forced_extension(std::array<Outcome, 2> f_ab, std::array<Outcome, 2> f_ba) {
    FiniteStrategy st;
    st.f_ab = f_ab;
    st.f_ba = f_ba;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        st.s_ab[x][y] = f_ba[y];
        st.s_ba[x][y] = f_ab[x];
      }
    }
    return st;
  }
};

struct StrategyRecord {
  std::uint32_t id = 0;
  bool covariant = false;
  int s_ab = 0;
  int s_ba = 0;
};

struct EnumerationSummary {
  std::uint32_t total = 0;
  std::uint32_t covariant = 0;
  int max_abs_s = 0;            // AB frame, all strategies
  int max_abs_s_covariant = 0;  // AB frame, covariant strategies
  int max_abs_s_ba = 0;         // BA frame, all strategies
  bool covariant_frames_agree = true;
  std::vector<StrategyRecord> strategies;  // ordered by id
  std::string convexity_note;
};

/// Exhaustive scan of all 4096 deterministic strategies of the 2x2 scenario.
inline EnumerationSummary enumerate_finite(unsigned atoms = 1) {
  if (atoms != 1) throw Error("only single-atom enumeration is supported");
  EnumerationSummary out;
  out.strategies.reserve(FiniteStrategy::kCount);
  for (std::uint32_t id = 0; id < FiniteStrategy::kCount; ++id) {
    const FiniteStrategy st = FiniteStrategy::decode(id);
    StrategyRecord rec{id, st.covariant(), st.chsh(TimeOrdering::AB), st.chsh(TimeOrdering::BA)};
    ++out.total;
    out.max_abs_s = std::max(out.max_abs_s, std::abs(rec.s_ab));
    out.max_abs_s_ba = std::max(out.max_abs_s_ba, std::abs(rec.s_ba));
    if (rec.covariant) {
      ++out.covariant;
      out.max_abs_s_covariant = std::max(out.max_abs_s_covariant, std::abs(rec.s_ab));
      if (st.correlations(TimeOrdering::AB) != st.correlations(TimeOrdering::BA)) out.covariant_frames_agree = false;
    }
    out.strategies.push_back(rec);
  }
  out.convexity_note =
      "CHSH is linear in the strategy weights, so any mixture over hidden-variable atoms is bounded by the "
      "deterministic maxima: " +
      std::to_string(out.max_abs_s_covariant) + " for covariant strategies, " + std::to_string(out.max_abs_s) +
      " overall.";
  return out;
}

}  // namespace hvlab
