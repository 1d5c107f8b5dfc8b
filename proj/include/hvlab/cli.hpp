#pragma once

// Batch command-line front end. Configuration comes from defaults, then an
// optional JSON file (--config), then explicit flags.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hvlab/hvlab.hpp"

namespace hvlab::cli {

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::string model = "gisin-singlet";
  std::string ordering = "AB";
  std::string settings = "tsirelson";
  std::string mode = "mc";
  std::uint64_t n = 1'000'000;
  std::uint64_t grid = 2000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::uint64_t probes = 10'000;
  std::uint64_t witness_cap = kDefaultWitnessCap;
  std::string events = "0,-1;0,1";
  std::string velocities = "-0.5,0,0.5";
  std::string format = "json";
  std::string output;  // empty: standard output
  unsigned workers = 0;  // 0: available parallelism

  /// Resolved configuration embedded in outputs. Output path and worker
  /// count are left out: neither changes any result.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["model"] = model;
    j["ordering"] = ordering;
    j["settings"] = settings;
    j["mode"] = mode;
    j["n"] = n;
    j["grid"] = grid;
    j["seed"] = seed;
    j["stream"] = stream;
    j["probes"] = probes;
    j["witness_cap"] = witness_cap;
    j["events"] = events;
    j["velocities"] = velocities;
    j["format"] = format;
    return j;
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

inline double parse_real(const std::string& s) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) throw UsageError("not a number: '" + s + "'");
  return v;
}

inline std::vector<double> parse_reals(const std::string& s, char sep = ',') {
  std::vector<double> out;
  for (const auto& p : split(s, sep)) out.push_back(parse_real(p));
  return out;
}

inline Setting parse_setting(const std::string& s) {
  const auto v = parse_reals(s);
  if (v.size() != 3) throw UsageError("setting needs three components: '" + s + "'");
  try {
    return Setting::direction(v[0], v[1], v[2]);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

}  // namespace detail

/// "tsirelson", "grid:N" (all N*N ordered pairs of the sphere grid), or
/// explicit pairs "ax,ay,az/bx,by,bz;...".
inline std::vector<SettingPair> parse_setting_pairs(const std::string& spec) {
  if (spec == "tsirelson") {
    const auto p = tsirelson_settings().pairs();
    return {p.begin(), p.end()};
  }
  if (spec.rfind("grid:", 0) == 0) {
    const double n = detail::parse_real(spec.substr(5));
    if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n))) throw UsageError("empty grid");
    const auto g = setting_grid(static_cast<std::size_t>(n));
    std::vector<SettingPair> out;
    for (const auto& a : g) {
      for (const auto& b : g) out.push_back({a, b});
    }
    return out;
  }
  std::vector<SettingPair> out;
  for (const auto& item : detail::split(spec, ';')) {
    const auto ab = detail::split(item, '/');
    if (ab.size() != 2) throw UsageError("setting pair must look like 'ax,ay,az/bx,by,bz': '" + item + "'");
    out.push_back({detail::parse_setting(ab[0]), detail::parse_setting(ab[1])});
  }
  if (out.empty()) throw UsageError("no settings given");
  return out;
}

/// "tsirelson" or four vectors "a;a';b;b'".
inline ChshSettings parse_chsh_settings(const std::string& spec) {
  if (spec == "tsirelson") return tsirelson_settings();
  const auto parts = detail::split(spec, ';');
  if (parts.size() != 4) throw UsageError("chsh settings must be 'tsirelson' or four vectors a;a';b;b'");
  return {detail::parse_setting(parts[0]), detail::parse_setting(parts[1]), detail::parse_setting(parts[2]),
          detail::parse_setting(parts[3])};
}

inline std::pair<Event, Event> parse_events(const std::string& spec) {
  const auto parts = detail::split(spec, ';');
  if (parts.size() != 2) throw UsageError("events must look like 'tA,xA;tB,xB'");
  std::array<Event, 2> ev;
  for (int i = 0; i < 2; ++i) {
    const auto v = detail::parse_reals(parts[i]);
    if (v.size() != 2) throw UsageError("event needs t,x: '" + parts[i] + "'");
    try {
      ev[i] = Event(v[0], v[1]);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return {ev[0], ev[1]};
}

/// Overlays keys present in a JSON config object.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto take = [&j](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
  };
  static const std::vector<std::string> known{"model", "ordering", "settings", "mode", "n", "grid", "seed", "stream",
                                              "probes", "witness_cap", "events", "velocities", "format", "output",
                                              "workers"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw UsageError("unknown config key '" + item.key() + "'");
    }
  }
  take("model", cfg.model);
  take("ordering", cfg.ordering);
  take("settings", cfg.settings);
  take("mode", cfg.mode);
  take("n", cfg.n);
  take("grid", cfg.grid);
  take("seed", cfg.seed);
  take("stream", cfg.stream);
  take("probes", cfg.probes);
  take("witness_cap", cfg.witness_cap);
  take("events", cfg.events);
  take("velocities", cfg.velocities);
  take("format", cfg.format);
  take("output", cfg.output);
  take("workers", cfg.workers);
}

namespace detail {

struct Resolved {
  ModelPtr model;
  TimeOrdering ordering = TimeOrdering::AB;
  EstimatorConfig estimator;
  Format format = Format::Json;
};

inline Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  try {
    r.model = model_by_name(cfg.model);
    r.ordering = parse_ordering(cfg.ordering);
    r.estimator.mode = parse_estimator(cfg.mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (cfg.n < 1) throw UsageError("n must be at least 1");
  if (cfg.grid < 2) throw UsageError("grid must be at least 2");
  if (cfg.format == "csv") {
    r.format = Format::Csv;
  } else if (cfg.format != "json") {
    throw UsageError("format must be csv or json");
  }
  r.estimator.n = cfg.n;
  r.estimator.grid = cfg.grid;
  r.estimator.seed = SeedSpec{cfg.seed, cfg.stream};
  r.estimator.workers = cfg.workers == 0 ? default_workers() : cfg.workers;
  return r;
}

inline std::string json_document(const RunConfig& cfg, nlohmann::ordered_json result) {
  nlohmann::ordered_json doc;
  doc["config"] = cfg.to_json();
  doc["result"] = std::move(result);
  return doc.dump(2) + "\n";
}

inline std::string csv_document(const RunConfig& cfg, const std::string& body) {
  return "# config: " + cfg.to_json().dump() + "\n" + body;
}

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw UsageError("cannot open output file '" + cfg.output + "'");
  file << text;
}

inline std::vector<JointRecord> joint_records(const OrderedModel& m, TimeOrdering o, const std::vector<SettingPair>& pairs,
                                              const EstimatorConfig& est) {
  std::vector<JointRecord> records;
  for (const auto& p : pairs) {
    JointRecord rec;
    rec.ordering = o;
    rec.a = p.a;
    rec.b = p.b;
    rec.stats = joint(m, o, QuantumState::Singlet, p.a, p.b, est);
    rec.correlation = correlator(rec.stats);
    rec.n_or_grid = est.mode == Estimator::Exact ? est.grid : est.n;
    rec.seed = est.seed.seed;
    records.push_back(rec);
  }
  return records;
}

inline std::string render_joint(const RunConfig& cfg, const Resolved& r, const std::vector<JointRecord>& records,
                                nlohmann::ordered_json extra = {}) {
  if (r.format == Format::Csv) return csv_document(cfg, joint_csv(records));
  nlohmann::ordered_json result = extra.is_null() ? nlohmann::ordered_json::object() : std::move(extra);
  result["tables"] = joint_json(records);
  return json_document(cfg, std::move(result));
}

inline int cmd_tomography(const RunConfig& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const auto pairs = parse_setting_pairs(cfg.settings);
  emit(cfg, render_joint(cfg, r, joint_records(*r.model, r.ordering, pairs, r.estimator)), out);
  return 0;
}

inline int cmd_chsh(const RunConfig& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const ChshSettings settings = parse_chsh_settings(cfg.settings);
  const ChshEstimate s = chsh(*r.model, r.ordering, QuantumState::Singlet, settings, r.estimator);
  const std::uint64_t n_or_grid = r.estimator.mode == Estimator::Exact ? r.estimator.grid : r.estimator.n;
  std::string text;
  if (r.format == Format::Csv) {
    std::ostringstream csv;
    csv << "ordering,mode,S,stderr,E_ab,E_abp,E_apb,E_apbp,n_or_grid,seed\n";
    csv << to_string(r.ordering) << ',' << to_string(r.estimator.mode) << ',' << format_real(s.value) << ','
        << format_real(s.std_error);
    for (const auto& t : s.terms) csv << ',' << format_real(t.value);
    csv << ',' << n_or_grid << ',' << cfg.seed << '\n';
    text = csv_document(cfg, csv.str());
  } else {
    nlohmann::ordered_json j;
    j["S"] = s.value;
    j["stderr"] = s.std_error;
    j["mode"] = to_string(r.estimator.mode);
    j["n_or_grid"] = n_or_grid;
    auto terms = nlohmann::ordered_json::array();
    for (const auto& t : s.terms) terms.push_back({{"E", t.value}, {"stderr", t.std_error}});
    j["terms"] = std::move(terms);
    j["local_bound"] = 2;
    j["tsirelson_bound"] = 2.0 * std::numbers::sqrt2;
    text = json_document(cfg, std::move(j));
  }
  emit(cfg, text, out);
  return 0;
}

inline std::vector<HiddenPoint> probe_lambdas(const RunConfig& cfg, const Resolved& r) {
  if (cfg.probes < 1) throw UsageError("probes must be at least 1");
  return sample_lambda(r.model->lambda_dim(), cfg.probes, r.estimator.seed);
}

inline int cmd_check_covariance(const RunConfig& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const auto pairs = parse_setting_pairs(cfg.settings);
  const auto lambdas = probe_lambdas(cfg, r);
  const CovarianceReport report = check_covariance(*r.model, QuantumState::Singlet, pairs, lambdas,
                                                   static_cast<std::size_t>(cfg.witness_cap), r.estimator.workers);
  emit(cfg, json_document(cfg, to_json(report)), out);
  return 0;
}

inline int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  const Resolved r = resolve(cfg);
  const auto pairs = parse_setting_pairs(cfg.settings);
  const auto lambdas = probe_lambdas(cfg, r);
  try {
    const LocalModelView view = reduce_to_local(r.model, QuantumState::Singlet, pairs, lambdas, r.estimator.workers);
    const ModelPtr local = as_ordered_model(view);
    nlohmann::ordered_json extra;
    extra["reduced"] = true;
    extra["local_model"] = local->name();
    emit(cfg, render_joint(cfg, r, joint_records(*local, r.ordering, pairs, r.estimator), std::move(extra)), out);
    return 0;
  } catch (const NotCovariantError& e) {
    nlohmann::ordered_json j;
    j["reduced"] = false;
    j["error"] = e.what();
    j["witness"] = to_json(e.witness());
    j["checked"] = e.report().checked;
    j["violations"] = e.report().violations;
    j["violation_fraction"] = e.report().violation_fraction;
    emit(cfg, json_document(cfg, std::move(j)), out);
    return 2;
  }
}

inline int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
  Format format = Format::Json;
  if (cfg.format == "csv") {
    format = Format::Csv;
  } else if (cfg.format != "json") {
    throw UsageError("format must be csv or json");
  }
  const EnumerationSummary s = enumerate_finite();
  out << summary_line(s) << '\n';
  if (!cfg.output.empty()) {
    emit(cfg, format == Format::Csv ? csv_document(cfg, strategies_csv(s)) : json_document(cfg, to_json(s)), out);
  }
  return 0;
}

inline int cmd_frame_order(const RunConfig& cfg, std::ostream& out) {
  const auto [ea, eb] = parse_events(cfg.events);
  const auto velocities = detail::parse_reals(cfg.velocities);
  if (velocities.empty()) throw UsageError("no velocities given");
  std::vector<Boost> boosts;
  for (double v : velocities) {
    try {
      boosts.emplace_back(v);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  Format format = cfg.format == "csv" ? Format::Csv : Format::Json;
  if (cfg.format != "csv" && cfg.format != "json") throw UsageError("format must be csv or json");

  const bool spacelike = is_spacelike(ea, eb);
  std::ostringstream csv;
  csv << "v,tA,xA,tB,xB,ordering\n";
  auto rows = nlohmann::ordered_json::array();
  for (const auto& boost : boosts) {
    const Event pa = boost_event(ea, boost);
    const Event pb = boost_event(eb, boost);
    std::string ordering;
    try {
      ordering = to_string(time_order(ea, eb, boost));
    } catch (const Error&) {
      ordering = "simultaneous";
    }
    csv << format_real(boost.velocity()) << ',' << format_real(pa.t) << ',' << format_real(pa.x) << ','
        << format_real(pb.t) << ',' << format_real(pb.x) << ',' << ordering << '\n';
    rows.push_back({{"v", boost.velocity()}, {"tA", pa.t}, {"xA", pa.x}, {"tB", pb.t}, {"xB", pb.x},
                    {"ordering", ordering}});
  }
  if (format == Format::Csv) {
    emit(cfg, csv_document(cfg, csv.str()), out);
  } else {
    nlohmann::ordered_json j;
    j["spacelike"] = spacelike;
    j["interval"] = interval(ea, eb);
    if (spacelike) j["simultaneity_velocity"] = simultaneity_velocity(ea, eb);
    j["rows"] = std::move(rows);
    emit(cfg, json_document(cfg, std::move(j)), out);
  }
  return 0;
}

}  // namespace detail

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors and 2 on domain errors.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hidden-variable model laboratory for Bell experiments under frame changes", "hvlab"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
    sub->add_option("--model", flags.model, "Model name (" + [] {
      std::string s;
      for (const auto& n : model_names()) s += (s.empty() ? "" : ", ") + n;
      return s;
    }() + ")");
    sub->add_option("--ordering", flags.ordering, "Time ordering AB or BA");
    sub->add_option("--settings", flags.settings, "tsirelson, grid:N, or explicit 'ax,ay,az/bx,by,bz;...'");
    sub->add_option("--mode", flags.mode, "Estimator: mc or exact");
    sub->add_option("--n", flags.n, "Monte Carlo samples");
    sub->add_option("--grid", flags.grid, "Quadrature points per dimension");
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--stream", flags.stream, "Random stream index");
    sub->add_option("--probes", flags.probes, "Hidden-variable probes for covariance checks");
    sub->add_option("--witness-cap", flags.witness_cap, "Maximum witnesses reported");
    sub->add_option("--events", flags.events, "Alice and Bob events 'tA,xA;tB,xB'");
    sub->add_option("--velocities", flags.velocities, "Comma-separated boost velocities");
    sub->add_option("--format", flags.format, "Output format: csv or json");
    sub->add_option("--output,-o", flags.output, "Output file (default: standard output)");
    sub->add_option("--workers", flags.workers, "Worker threads (0: available parallelism)");
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"tomography", "Joint outcome tables for the configured setting pairs"},
      {"chsh", "CHSH value with error bar"},
      {"check-covariance", "Pointwise frame-independence check as JSON"},
      {"reduce", "Reduce a covariant model to a local one, or report a witness"},
      {"enumerate", "Exhaustive 2x2 deterministic strategy scan"},
      {"frame-order", "Time ordering of two events across boosts"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  cfg.command = sub->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot read config file '" + config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("invalid config JSON: ") + e.what());
      }
      apply_json(cfg, j);
    }
    auto given = [sub](const char* name) { return sub->get_option(name)->count() > 0; };
    if (given("--model")) cfg.model = flags.model;
    if (given("--ordering")) cfg.ordering = flags.ordering;
    if (given("--settings")) cfg.settings = flags.settings;
    if (given("--mode")) cfg.mode = flags.mode;
    if (given("--n")) cfg.n = flags.n;
    if (given("--grid")) cfg.grid = flags.grid;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--stream")) cfg.stream = flags.stream;
    if (given("--probes")) cfg.probes = flags.probes;
    if (given("--witness-cap")) cfg.witness_cap = flags.witness_cap;
    if (given("--events")) cfg.events = flags.events;
    if (given("--velocities")) cfg.velocities = flags.velocities;
    if (given("--format")) cfg.format = flags.format;
    if (given("--output")) cfg.output = flags.output;
    if (given("--workers")) cfg.workers = flags.workers;

    const std::string& c = cfg.command;
    if (c == "tomography") return detail::cmd_tomography(cfg, out);
    if (c == "chsh") return detail::cmd_chsh(cfg, out);
    if (c == "check-covariance") return detail::cmd_check_covariance(cfg, out);
    if (c == "reduce") return detail::cmd_reduce(cfg, out);
    if (c == "enumerate") return detail::cmd_enumerate(cfg, out);
    return detail::cmd_frame_order(cfg, out);
  } catch (const UsageError& e) {
    err << "hvlab: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "hvlab: " << e.what() << '\n';
    return 2;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hvlab::cli
