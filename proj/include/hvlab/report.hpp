#pragma once

// CSV and JSON encodings of results. Reals are written locale-independently
// with 17 significant digits.

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hvlab/covariance.hpp"
#include "hvlab/stats.hpp"

namespace hvlab {

inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// One row of a joint-table output.
struct JointRecord {
  TimeOrdering ordering = TimeOrdering::AB;
  Setting a;
  Setting b;
  JointStats stats;
  CorrelationEstimate correlation;
  std::uint64_t n_or_grid = 0;
  std::uint64_t seed = 0;
};

inline const std::vector<std::string>& joint_csv_columns() {
  static const std::vector<std::string> cols{"ordering", "ax", "ay", "az", "bx", "by", "bz", "ppp",
                                             "ppm", "pmp", "pmm", "E", "stderr", "n_or_grid", "seed"};
  return cols;
}

inline std::string joint_csv(const std::vector<JointRecord>& records) {
  std::ostringstream out;
  const auto& cols = joint_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    const auto& p = r.stats.probs;
    out << to_string(r.ordering);
    for (double v : {r.a.x(), r.a.y(), r.a.z(), r.b.x(), r.b.y(), r.b.z(), p[0][0], p[0][1], p[1][0], p[1][1],
                     r.correlation.value, r.correlation.std_error}) {
      out << ',' << format_real(v);
    }
    out << ',' << r.n_or_grid << ',' << r.seed << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const Setting& s) { return {s.x(), s.y(), s.z()}; }

inline nlohmann::ordered_json joint_json(const std::vector<JointRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    const auto& p = r.stats.probs;
    nlohmann::ordered_json j;
    j["ordering"] = to_string(r.ordering);
    j["ax"] = r.a.x();
    j["ay"] = r.a.y();
    j["az"] = r.a.z();
    j["bx"] = r.b.x();
    j["by"] = r.b.y();
    j["bz"] = r.b.z();
    j["ppp"] = p[0][0];
    j["ppm"] = p[0][1];
    j["pmp"] = p[1][0];
    j["pmm"] = p[1][1];
    j["E"] = r.correlation.value;
    j["stderr"] = r.correlation.std_error;
    j["n_or_grid"] = r.n_or_grid;
    j["seed"] = r.seed;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::ordered_json to_json(const CovarianceWitness& w) {
  nlohmann::ordered_json j;
  j["probe"] = w.probe;
  j["lambda"] = w.lambda.coords();
  j["a"] = to_json(w.a);
  j["b"] = to_json(w.b);
  j["side"] = to_string(w.side);
  j["first_value"] = w.first_value.value();
  j["second_value"] = w.second_value.value();
  return j;
}

inline nlohmann::ordered_json to_json(const CovarianceReport& r) {
  nlohmann::ordered_json j;
  j["checked"] = r.checked;
  j["violations"] = r.violations;
  j["violation_fraction"] = r.violation_fraction;
  auto w = nlohmann::ordered_json::array();
  for (const auto& x : r.witnesses) w.push_back(to_json(x));
  j["witnesses"] = std::move(w);
  return j;
}

inline nlohmann::ordered_json to_json(const EnumerationSummary& s) {
  nlohmann::ordered_json j;
  j["total"] = s.total;
  j["covariant"] = s.covariant;
  j["max_S"] = s.max_abs_s;
  j["max_S_covariant"] = s.max_abs_s_covariant;
  j["max_S_BA"] = s.max_abs_s_ba;
  j["covariant_frames_agree"] = s.covariant_frames_agree;
  j["convexity_note"] = s.convexity_note;
  return j;
}

inline std::string summary_line(const EnumerationSummary& s) {
  return "total=" + std::to_string(s.total) + " covariant=" + std::to_string(s.covariant) +
         " max_S=" + std::to_string(s.max_abs_s) + " max_S_covariant=" + std::to_string(s.max_abs_s_covariant);
}

inline std::string strategies_csv(const EnumerationSummary& s) {
  std::ostringstream out;
  out << "strategy_id,covariant,S_AB,S_BA\n";
  for (const auto& r : s.strategies) out << r.id << ',' << (r.covariant ? 1 : 0) << ',' << r.s_ab << ',' << r.s_ba << '\n';
  return out.str();
}

}  // namespace hvlab
