#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>

#include "hvlab/core.hpp"

namespace hvlab {

/// Deterministic hidden-variable model with separate response functions per
/// time ordering.
///
/// In ordering AB, `first` receives Alice's setting and returns her outcome;
/// `second` returns Bob's outcome. In ordering BA, `first` receives Bob's
/// setting and returns his outcome; `second` returns Alice's. `second`
/// always takes the settings in (Alice, Bob) order. Both must be pure.
class OrderedModel {
 public:
  virtual ~OrderedModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t lambda_dim() const = 0;
  virtual Outcome first(TimeOrdering ordering, QuantumState state, const Setting& setting_first,
                        const HiddenPoint& lambda) const = 0;
  virtual Outcome second(TimeOrdering ordering, QuantumState state, const Setting& a,
                         const Setting& b, const HiddenPoint& lambda) const = 0;
};

using ModelPtr = std::shared_ptr<const OrderedModel>;

struct OutcomePair {
  Outcome alpha;
  Outcome beta;
  friend bool operator==(const OutcomePair&, const OutcomePair&) = default;
};

inline OutcomePair eval_pair(const OrderedModel& m, TimeOrdering o, QuantumState s,
                             const Setting& a, const Setting& b, const HiddenPoint& lambda) {
  if (lambda.dim() != m.lambda_dim()) throw Error("lambda dimension");
  if (o == TimeOrdering::AB) {
    const Outcome alpha = m.first(o, s, a, lambda);
    return {alpha, m.second(o, s, a, b, lambda)};
  }
  const Outcome beta = m.first(o, s, b, lambda);
  return {m.second(o, s, a, b, lambda), beta};
}

/// Model assembled from callables; handy for ad-hoc and user-supplied rules.
class FunctionModel final : public OrderedModel {
 public:
  using FirstFn = std::function<Outcome(TimeOrdering, QuantumState, const Setting&, const HiddenPoint&)>;
  using SecondFn = std::function<Outcome(TimeOrdering, QuantumState, const Setting&, const Setting&,
                                         const HiddenPoint&)>;

  FunctionModel(std::string name, std::size_t dim, FirstFn first, SecondFn second)
      : name_(std::move(name)), dim_(dim), first_(std::move(first)), second_(std::move(second)) {}

  std::string name() const override { return name_; }
  std::size_t lambda_dim() const override { return dim_; }
  Outcome first(TimeOrdering o, QuantumState s, const Setting& x, const HiddenPoint& l) const override {
    return first_(o, s, x, l);
  }
  Outcome second(TimeOrdering o, QuantumState s, const Setting& a, const Setting& b,
                 const HiddenPoint& l) const override {
    return second_(o, s, a, b, l);
  }

 private:
  std::string name_;
  std::size_t dim_;
  FirstFn first_;
  SecondFn second_;
};

/// Nonlocal singlet model over lambda = (r_A, r_B) in the unit square.
///
/// AB: Alice gets +1 iff r_A <= 1/2; Bob gets +1 iff r_B <= (1 - a.b)/2 when
/// Alice's coordinate was below 1/2, and iff r_B <= (1 + a.b)/2 otherwise.
/// BA mirrors the roles (A <-> B, r_A <-> r_B), so both frames reproduce the
/// singlet statistics while disagreeing pointwise about Alice's outcome.
class GisinSingletModel final : public OrderedModel {
 public:
  std::string name() const override { return "gisin-singlet"; }
  std::size_t lambda_dim() const override { return 2; }

  Outcome first(TimeOrdering o, QuantumState, const Setting&, const HiddenPoint& l) const override {
    return Outcome::from_bool(own(o, l) <= 0.5);
  }

  Outcome second(TimeOrdering o, QuantumState, const Setting& a, const Setting& b,
                 const HiddenPoint& l) const override {
    const double c = dot(a, b);
    const double threshold = own(o, l) <= 0.5 ? (1.0 - c) / 2.0 : (1.0 + c) / 2.0;
    return Outcome::from_bool(other(o, l) <= threshold);
  }

 private:
  // Coordinate owned by whoever measures first, and the remaining one.
  static double own(TimeOrdering o, const HiddenPoint& l) { return o == TimeOrdering::AB ? l[0] : l[1]; }
  static double other(TimeOrdering o, const HiddenPoint& l) { return o == TimeOrdering::AB ? l[1] : l[0]; }
};

/// Maps (u, v) in the unit square to a uniformly distributed unit vector.
inline std::array<double, 3> sphere_point(double u, double v) {
  const double cos_theta = 2.0 * u - 1.0;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * std::numbers::pi * v;
  return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

/// Bell-local reference model: Alice answers sign(a.n), Bob -sign(b.n) for a
/// shared random direction n. sign(0) is +1.
class LocalSphereModel final : public OrderedModel {
 public:
  std::string name() const override { return "local-sphere"; }
  std::size_t lambda_dim() const override { return 2; }

  static Outcome alice(const Setting& a, const HiddenPoint& l) {
    return Outcome::from_bool(projection(a, l) >= 0.0);
  }
  static Outcome bob(const Setting& b, const HiddenPoint& l) {
    return -Outcome::from_bool(projection(b, l) >= 0.0);
  }

  Outcome first(TimeOrdering o, QuantumState, const Setting& x, const HiddenPoint& l) const override {
    return o == TimeOrdering::AB ? alice(x, l) : bob(x, l);
  }
  Outcome second(TimeOrdering o, QuantumState, const Setting& a, const Setting& b,
                 const HiddenPoint& l) const override {
    return o == TimeOrdering::AB ? bob(b, l) : alice(a, l);
  }

 private:
  static double projection(const Setting& s, const HiddenPoint& l) {
    const auto n = sphere_point(l[0], l[1]);
    return s.x() * n[0] + s.y() * n[1] + s.z() * n[2];
  }
};

/// Probabilistic response rule. `p_first` is P(first outcome = +1),
/// `p_second` is P(second outcome = +1 | first outcome).
struct StochasticResponse {
  using FirstProb = std::function<double(TimeOrdering, QuantumState, const Setting&, const HiddenPoint&)>;
  using SecondProb = std::function<double(TimeOrdering, QuantumState, const Setting&, const Setting&,
                                          Outcome, const HiddenPoint&)>;

  std::string name;
  std::size_t lambda_dim = 0;
  FirstProb p_first;
  SecondProb p_second;
};

/// How the two appended uniform coordinates are assigned to outcomes.
enum class Wiring {
  // u1 drives whoever measures first, u2 the second party.
  ByPosition,
  // u1 always drives Alice and u2 always drives Bob, in either ordering.
  ByParty,
};

/// Deterministic model obtained by appending two uniform coordinates to the
/// stochastic rule's hidden variable and thresholding against its probabilities.
class DeterminizedModel final : public OrderedModel {
 public:
  DeterminizedModel(StochasticResponse sr, Wiring wiring) : sr_(std::move(sr)), wiring_(wiring) {}

  std::string name() const override { return sr_.name; }
  std::size_t lambda_dim() const override { return sr_.lambda_dim + 2; }
  Wiring wiring() const { return wiring_; }

  Outcome first(TimeOrdering o, QuantumState s, const Setting& x, const HiddenPoint& l) const override {
    const HiddenPoint inner = head(l);
    return Outcome::from_bool(l[first_coord(o)] <= check(sr_.p_first(o, s, x, inner)));
  }

  Outcome second(TimeOrdering o, QuantumState s, const Setting& a, const Setting& b,
                 const HiddenPoint& l) const override {
    const HiddenPoint inner = head(l);
    const Setting& x = o == TimeOrdering::AB ? a : b;
    const Outcome f = Outcome::from_bool(l[first_coord(o)] <= check(sr_.p_first(o, s, x, inner)));
    return Outcome::from_bool(l[second_coord(o)] <= check(sr_.p_second(o, s, a, b, f, inner)));
  }

 private:
  std::size_t first_coord(TimeOrdering o) const {
    const std::size_t u1 = sr_.lambda_dim;
    if (wiring_ == Wiring::ByPosition || o == TimeOrdering::AB) return u1;
    return u1 + 1;
  }
  std::size_t second_coord(TimeOrdering o) const { return first_coord(o) == sr_.lambda_dim ? sr_.lambda_dim + 1 : sr_.lambda_dim; }

  HiddenPoint head(const HiddenPoint& l) const {
    if (sr_.lambda_dim == 0) return HiddenPoint{};
    return HiddenPoint(std::vector<double>(l.coords().begin(), l.coords().begin() + static_cast<std::ptrdiff_t>(sr_.lambda_dim)));
  }

  static double check(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("response probability outside [0,1]");
    return p;
  }

  StochasticResponse sr_;
  Wiring wiring_;
};

inline ModelPtr make_gisin_singlet() { return std::make_shared<GisinSingletModel>(); }
inline ModelPtr make_local_sphere() { return std::make_shared<LocalSphereModel>(); }

inline ModelPtr determinize(StochasticResponse sr, Wiring wiring = Wiring::ByPosition) {
  return std::make_shared<DeterminizedModel>(std::move(sr), wiring);
}

/// Singlet rule: first outcome fair coin, second +1 with probability (1 - f a.b)/2.
inline StochasticResponse stochastic_singlet() {
  return StochasticResponse{
      "determinized-singlet", 0,
      [](TimeOrdering, QuantumState, const Setting&, const HiddenPoint&) { return 0.5; },
      [](TimeOrdering, QuantumState, const Setting& a, const Setting& b, Outcome f, const HiddenPoint&) {
        return (1.0 - f.value() * dot(a, b)) / 2.0;
      }};
}

/// Independent fair coins on both sides.
inline StochasticResponse stochastic_uniform() {
  return StochasticResponse{
      "determinized-uniform", 0,
      [](TimeOrdering, QuantumState, const Setting&, const HiddenPoint&) { return 0.5; },
      [](TimeOrdering, QuantumState, const Setting&, const Setting&, Outcome, const HiddenPoint&) {
        return 0.5;
      }};
}

/// Names accepted by `model_by_name`.
inline std::vector<std::string> model_names() {
  return {"gisin-singlet", "local-sphere", "determinized-singlet", "determinized-uniform"};
}

inline ModelPtr model_by_name(const std::string& name) {
  if (name == "gisin-singlet") return make_gisin_singlet();
  if (name == "local-sphere") return make_local_sphere();
  if (name == "determinized-singlet") return determinize(stochastic_singlet(), Wiring::ByParty);
  if (name == "determinized-uniform") return determinize(stochastic_uniform(), Wiring::ByParty);
  throw Error("unknown model '" + name + "'");
}

}  // namespace hvlab
