#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvlab {

/// Domain error raised by every module; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit 3-vector giving a spin measurement direction.
class Setting {
 public:
  static constexpr double kUnitTolerance = 1e-9;
  static constexpr double kNormalizeTolerance = 1e-6;

  Setting() = default;  // (0, 0, 1)

  // Normalizes inputs within 1e-6 of unit norm, rejects anything further off.
  Setting(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormalizeTolerance) {
      throw Error("setting is not a unit vector");
    }
    if (std::abs(norm - 1.0) > 0.0) {
      x /= norm;
      y /= norm;
      z /= norm;
    }
    v_ = {x, y, z};
  }

  /// Builds a setting from any nonzero direction.
  static Setting direction(double x, double y, double z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("zero or non-finite direction");
    return Setting(x / norm, y / norm, z / norm);
  }

  double x() const { return v_[0]; }
  double y() const { return v_[1]; }
  double z() const { return v_[2]; }
  const std::array<double, 3>& components() const { return v_; }

  Setting operator-() const { return Setting(-v_[0], -v_[1], -v_[2]); }
  friend bool operator==(const Setting&, const Setting&) = default;

 private:
  std::array<double, 3> v_{0.0, 0.0, 1.0};
};

/// A measurement result, +1 or -1. Any other value is unrepresentable.
class Outcome {
 public:
  static constexpr Outcome plus() { return Outcome(true); }
  static constexpr Outcome minus() { return Outcome(false); }
  static constexpr Outcome from_bool(bool is_plus) { return Outcome(is_plus); }

  static Outcome from_int(int v) {
    if (v == 1) return plus();
    if (v == -1) return minus();
    throw Error("outcome must be +1 or -1");
  }

  constexpr int value() const { return plus_ ? 1 : -1; }
  constexpr bool is_plus() const { return plus_; }
  // Table index: 0 for +1, 1 for -1.
  constexpr int index() const { return plus_ ? 0 : 1; }

  constexpr Outcome operator-() const { return Outcome(!plus_); }
  friend constexpr bool operator==(Outcome, Outcome) = default;
  friend constexpr int operator*(Outcome a, Outcome b) { return a.value() * b.value(); }

 private:
  constexpr explicit Outcome(bool p) : plus_(p) {}
  bool plus_;
};

/// Which party measures first in a given frame.
enum class TimeOrdering { AB, BA };

inline const char* to_string(TimeOrdering o) { return o == TimeOrdering::AB ? "AB" : "BA"; }

inline TimeOrdering parse_ordering(const std::string& s) {
  if (s == "AB" || s == "ab") return TimeOrdering::AB;
  if (s == "BA" || s == "ba") return TimeOrdering::BA;
  throw Error("unknown ordering '" + s + "'");
}

/// Only the two-qubit singlet is representable.
enum class QuantumState { Singlet };

/// Point of the hidden-variable space [0,1]^d.
class HiddenPoint {
 public:
  HiddenPoint() = default;
  explicit HiddenPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_) {
      if (!(c >= 0.0 && c <= 1.0)) throw Error("hidden coordinate outside [0,1]");
    }
  }
  HiddenPoint(std::initializer_list<double> coords) : HiddenPoint(std::vector<double>(coords)) {}

  static HiddenPoint zeros(std::size_t dim) {
    HiddenPoint p;
    p.coords_.assign(dim, 0.0);
    return p;
  }

  void set(std::size_t i, double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error("hidden coordinate outside [0,1]");
    coords_.at(i) = c;
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  friend bool operator==(const HiddenPoint&, const HiddenPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Inner product clamped to [-1, 1].
inline double dot(const Setting& a, const Setting& b) {
  const double d = a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  return std::clamp(d, -1.0, 1.0);
}

struct SettingPair {
  Setting a;
  Setting b;
};

/// The four CHSH settings (a, a', b, b').
struct ChshSettings {
  Setting a;
  Setting a_prime;
  Setting b;
  Setting b_prime;

  /// (a,b), (a,b'), (a',b), (a',b') in CHSH sign order +,+,+,-.
  std::array<SettingPair, 4> pairs() const {
    return {SettingPair{a, b}, SettingPair{a, b_prime}, SettingPair{a_prime, b},
            SettingPair{a_prime, b_prime}};
  }
};

/// Settings reaching 2*sqrt(2) for E(a,b) = -a.b.
inline ChshSettings tsirelson_settings() {
  constexpr double h = 1.0 / std::numbers::sqrt2;
  return ChshSettings{Setting(1.0, 0.0, 0.0), Setting(0.0, 0.0, 1.0), Setting(-h, 0.0, -h),
                      Setting(-h, 0.0, h)};
}

/// Golden-angle spiral over the sphere; deterministic in n.
inline std::vector<Setting> setting_grid(std::size_t n) {
  if (n == 0) throw Error("empty grid");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Setting> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    out.push_back(Setting::direction(r * std::cos(phi), r * std::sin(phi), z));
  }
  return out;
}

}  // namespace hvlab
