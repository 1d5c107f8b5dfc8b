// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hvlab/cli.hpp"
#include "hvlab/hvlab.hpp"

using namespace hvlab;

namespace {

constexpr auto AB = TimeOrdering::AB;
constexpr auto BA = TimeOrdering::BA;
constexpr auto kSinglet = QuantumState::Singlet;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<SettingPair> grid_pairs(std::size_t n) {
  const auto g = setting_grid(n);
  std::vector<SettingPair> out;
  for (const auto& a : g) {
    for (const auto& b : g) out.push_back({a, b});
  }
  return out;
}

std::vector<SettingPair> tsirelson_pairs() {
  const auto p = tsirelson_settings().pairs();
  return {p.begin(), p.end()};
}

int run_cli_inproc(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const unsigned kWorkers = default_workers();

// 1. Quantum statistics reproduction.
void quantum_statistics(Check& c) {
  const auto m = make_gisin_singlet();
  double worst_cell = 0, worst_e = 0;
  for (const auto& p : grid_pairs(5)) {
    const auto j = exact_joint(*m, AB, kSinglet, p.a, p.b, 2000, kWorkers);
    for (Outcome x : {Outcome::plus(), Outcome::minus()}) {
      for (Outcome y : {Outcome::plus(), Outcome::minus()}) {
        worst_cell = std::max(worst_cell, std::abs(j.p(x, y) - singlet_joint_oracle(x, y, p.a, p.b)));
      }
    }
    worst_e = std::max(worst_e, std::abs(correlator(j).value + dot(p.a, p.b)));
  }
  c.detail << "25 pairs, max cell err " << worst_cell << ", max E err " << worst_e;
  c.expect(worst_cell <= 2e-3, "cell error <= 2e-3");
  c.expect(worst_e <= 2e-3, "correlator error <= 2e-3");
}

// 2. Tsirelson value through the chsh subcommand.
void tsirelson_value(Check& c) {
  std::string out;
  const int exact_code = run_cli_inproc(
      {"chsh", "--model", "gisin-singlet", "--settings", "tsirelson", "--mode", "exact", "--grid", "2000"}, &out);
  const double exact = nlohmann::json::parse(out)["result"]["S"].get<double>();
  const int mc_code = run_cli_inproc({"chsh", "--model", "gisin-singlet", "--settings", "tsirelson", "--mode", "mc",
                                      "--n", "1000000", "--seed", "2026"},
                                     &out);
  const double mc = nlohmann::json::parse(out)["result"]["S"].get<double>();
  c.detail << "exact S = " << exact << ", MC S = " << mc;
  c.expect(exact_code == 0 && mc_code == 0, "exit code 0");
  c.expect(std::abs(exact - kTsirelson) <= 5e-3, "exact within 5e-3");
  c.expect(std::abs(mc - kTsirelson) <= 1e-2, "MC within 1e-2");
}

CovarianceReport gisin_probe_report() {
  return check_covariance(*make_gisin_singlet(), kSinglet, tsirelson_pairs(), sample_lambda(2, 2500, SeedSpec{7, 0}),
                          kDefaultWitnessCap, kWorkers);
}

// 3. Covariance failure.
void covariance_failure(Check& c) {
  const auto report = gisin_probe_report();
  c.detail << report.checked << " probes, " << report.witnesses.size() << " witnesses, fraction "
           << report.violation_fraction;
  c.expect(report.checked == 10'000, "10^4 probes");
  c.expect(!report.witnesses.empty(), "at least one witness");
  c.expect(report.violation_fraction > 0.05, "fraction > 0.05");

  // Hand witness: lambda = (0.3, 0.4), a.b = 0.9. Alice first: 0.3 <= 1/2 -> +1.
  // Alice second (BA): r_B = 0.4 <= 1/2, so +1 iff r_A <= (1 - 0.9)/2 = 0.05 -> -1.
  const Setting a(1, 0, 0), b(0.9, std::sqrt(1 - 0.81), 0);
  const auto hand = check_covariance(*make_gisin_singlet(), kSinglet, {{a, b}}, {HiddenPoint{0.3, 0.4}});
  const bool witness_ok = !hand.witnesses.empty() && hand.witnesses[0].side == Party::Alice &&
                          hand.witnesses[0].first_value == Outcome::plus() &&
                          hand.witnesses[0].second_value == Outcome::minus();
  c.expect(witness_ok, "hand witness (0.3, 0.4) Alice +1 vs -1");
}

// 4. Statistical frame independence next to pointwise failure.
void frame_independence(Check& c) {
  const auto m = make_gisin_singlet();
  const auto pairs = grid_pairs(5);
  double worst = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& p = pairs[i * 2 + 1];
    worst = std::max(worst, frame_consistency(*m, kSinglet, p.a, p.b, 2000, kWorkers));
  }
  const auto report = gisin_probe_report();
  c.detail << "10 pairs, max |P_AB - P_BA| = " << worst << ", pointwise violation fraction "
           << report.violation_fraction;
  c.expect(worst <= 2e-3, "frame consistency <= 2e-3");
  c.expect(!report.witnesses.empty() && report.violation_fraction > 0.05, "covariance failure still holds");
}

// 5. Finite no-go.
void finite_no_go(Check& c) {
  const auto s = enumerate_finite();
  bool tables_agree = true;
  for (const auto& r : s.strategies) {
    if (!r.covariant) continue;
    const auto st = FiniteStrategy::decode(r.id);
    tables_agree = tables_agree && st.correlations(AB) == st.correlations(BA);
  }
  c.detail << summary_line(s);
  c.expect(s.total == 4096, "total 4096");
  c.expect(s.covariant == 16, "covariant 16");
  c.expect(s.max_abs_s == 4, "max |S| 4");
  c.expect(s.max_abs_s_covariant == 2, "covariant max |S| 2");
  c.expect(tables_agree && s.covariant_frames_agree, "covariant AB/BA tables identical");
  c.expect(static_cast<double>(s.max_abs_s_covariant) < kTsirelson, "covariant bound below 2*sqrt(2)");
}

// 6. Reduction soundness.
void reduction(Check& c) {
  const auto sphere = make_local_sphere();
  const auto pairs = grid_pairs(4);
  const auto lambdas = sample_lambda(2, 1000, SeedSpec{17, 0});
  bool reduced = false, reproduces = true;
  try {
    const auto view = reduce_to_local(sphere, kSinglet, pairs, lambdas, kWorkers);
    reduced = true;
    const auto local = as_ordered_model(view);
    for (const auto& p : pairs) {
      long long sum_view = 0, sum_model = 0;
      for (const auto& l : lambdas) {
        const auto v = eval_pair(*local, AB, kSinglet, p.a, p.b, l);
        for (auto o : {AB, BA}) reproduces = reproduces && v == eval_pair(*sphere, o, kSinglet, p.a, p.b, l);
        sum_view += v.alpha * v.beta;
        const auto orig = eval_pair(*sphere, AB, kSinglet, p.a, p.b, l);
        sum_model += orig.alpha * orig.beta;
      }
      reproduces = reproduces && sum_view == sum_model;
    }
  } catch (const Error&) {
  }
  bool gisin_fails = false;
  try {
    reduce_to_local(make_gisin_singlet(), kSinglet, tsirelson_pairs(), sample_lambda(2, 2500, SeedSpec{7, 0}));
  } catch (const NotCovariantError& e) {
    gisin_fails = e.report().violations > 0;
  }
  std::string out;
  const int code = run_cli_inproc({"reduce", "--model", "gisin-singlet", "--probes", "10000", "--seed", "7"}, &out);
  const bool has_witness = nlohmann::json::parse(out)["result"].contains("witness");
  c.detail << "local-sphere reduced=" << reduced << " exact=" << reproduces << ", gisin CLI exit " << code;
  c.expect(reduced && reproduces, "local-sphere reduces and reproduces correlators exactly");
  c.expect(gisin_fails, "gisin reduction fails with witness");
  c.expect(code == 2 && has_witness, "CLI exit code 2 with witness");
}

// 7. Determinization.
void determinization(Check& c) {
  const auto det = model_by_name("determinized-singlet");
  const auto gisin = make_gisin_singlet();
  double worst_z = 0;
  for (const auto& p : tsirelson_pairs()) {
    for (auto o : {AB, BA}) {
      const auto mc = estimate_joint(*det, o, kSinglet, p.a, p.b, 1'000'000, SeedSpec{1234, 0}, kWorkers);
      const auto ref = exact_joint(*gisin, o, kSinglet, p.a, p.b, 2000, kWorkers);
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) worst_z = std::max(worst_z, std::abs(mc.probs[i][k] - ref.probs[i][k]) / mc.std_error[i][k]);
      }
    }
  }
  c.detail << "max deviation " << worst_z << " standard errors";
  c.expect(worst_z <= 4.0, "within 4 standard errors");
}

// 8. Frame ordering.
void frame_ordering(Check& c) {
  const Event a(0, -1), b(0, 1);
  c.expect(time_order(a, b, Boost(-0.5)) == AB, "v=-0.5 -> AB");
  c.expect(time_order(a, b, Boost(0.5)) == BA, "v=+0.5 -> BA");
  bool simultaneous = false;
  try {
    time_order(a, b, Boost(0.0));
  } catch (const Error& e) {
    simultaneous = std::string(e.what()).find("simultaneous") != std::string::npos;
  }
  c.expect(simultaneous, "v=0 -> simultaneity error");
  double worst = 0;
  const Event events[] = {Event(0, -1), Event(0, 1), Event(2, 0.5), Event(-1.5, 3)};
  for (double v : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    for (const auto& e1 : events) {
      for (const auto& e2 : events) {
        worst = std::max(worst, std::abs(interval(boost_event(e1, Boost(v)), boost_event(e2, Boost(v))) - interval(e1, e2)));
      }
    }
  }
  c.detail << "max interval drift " << worst;
  c.expect(worst <= 1e-9, "interval preserved within 1e-9");
}

// 9. Byte-identical CLI outputs across runs and worker counts.
void reproducibility(Check& c) {
  const auto dir = std::filesystem::temp_directory_path() / "hvlab_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> commands{
      {"tomography", "--model", "gisin-singlet", "--settings", "grid:3", "--n", "200000", "--seed", "42", "--format", "csv"},
      {"tomography", "--model", "local-sphere", "--mode", "exact", "--grid", "300", "--format", "json"},
      {"chsh", "--model", "determinized-singlet", "--n", "200000", "--seed", "9"},
      {"check-covariance", "--model", "gisin-singlet", "--probes", "5000", "--seed", "3"},
      {"reduce", "--model", "gisin-singlet", "--probes", "2000", "--seed", "7"},
      {"reduce", "--model", "local-sphere", "--probes", "500", "--n", "100000", "--seed", "7"},
      {"enumerate", "--format", "csv"},
      {"frame-order", "--events", "0,-1;0,1", "--velocities", "-0.9,-0.5,0,0.5,0.9", "--format", "csv"}};
  int identical = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "1", "4"}) {
      const auto file = dir / ("run" + std::to_string(i) + "_" + std::to_string(outputs.size()));
      std::string cmd = HVLAB_CLI_PATH;
      for (const auto& a : commands[i]) cmd += " '" + a + "'";
      cmd += " --workers " + std::string(workers) + " --output " + file.string() + " > " + file.string() + ".stdout";
      const int status = std::system(cmd.c_str());
      (void)status;
      outputs.push_back(read_file(file) + "\n--stdout--\n" + read_file(file.string() + ".stdout"));
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
    identical += same;
    c.expect(same, "identical output for '" + commands[i][0] + "' #" + std::to_string(i));
  }
  std::filesystem::remove_all(dir);
  c.detail << identical << "/" << commands.size() << " commands byte-identical (runs x2, workers 1 and 4)";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&)> body;
    double time_limit_s;  // <= 0: no limit
  };
  const std::vector<Criterion> criteria{
      {"1 quantum statistics reproduction", quantum_statistics, 30.0},
      {"2 tsirelson value", tsirelson_value, 30.0},
      {"3 covariance failure", covariance_failure, 5.0},
      {"4 frame independence despite non-covariance", frame_independence, 0.0},
      {"5 finite no-go", finite_no_go, 1.0},
      {"6 reduction soundness", reduction, 0.0},
      {"7 determinization", determinization, 0.0},
      {"8 frame ordering", frame_ordering, 0.0},
      {"9 reproducibility", reproducibility, 0.0},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.time_limit_s > 0 && secs >= cr.time_limit_s) {
      check.ok = false;
      check.detail << " [runtime over " << cr.time_limit_s << " s]";
    }
    failures += !check.ok;
    std::cout << (check.ok ? "PASS" : "FAIL") << "  " << cr.name << " (" << secs << " s): " << check.detail.str()
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
