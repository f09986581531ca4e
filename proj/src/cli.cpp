#include "logsob/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "logsob/concentration.hpp"
#include "logsob/criteria.hpp"
#include "logsob/functionals.hpp"
#include "logsob/lemma_lab.hpp"
#include "logsob/measure.hpp"

namespace logsob {

using ojson = nlohmann::ordered_json;

#define LOGSOB_CONFIG_FIELDS(X)                                              \
  X(family) X(alpha) X(beta) X(table) X(epsilon) X(big_m) X(b_const)          \
  X(intervals) X(grading_levels) X(target_rel_error) X(truncation_offset)     \
  X(grid_max) X(grid_points) X(form) X(refinement) X(a_restricted) X(kappa)   \
  X(lam) X(c_h) X(cap) X(n) X(trials) X(clamp) X(statistic) X(lam_grid)       \
  X(a_const) X(samples) X(seed) X(threads) X(output_dir)

void to_json(ojson& j, const RunConfig& cfg) {
  j = ojson::object();
#define LOGSOB_TO(f) j[#f] = cfg.f;
  LOGSOB_CONFIG_FIELDS(LOGSOB_TO)
#undef LOGSOB_TO
}

void from_json(const ojson& j, RunConfig& cfg) {
#define LOGSOB_FROM(f) \
  if (j.contains(#f)) j.at(#f).get_to(cfg.f);
  LOGSOB_CONFIG_FIELDS(LOGSOB_FROM)
#undef LOGSOB_FROM
}

std::string config_to_json(const RunConfig& cfg) {
  ojson j(cfg);
  return j.dump(2) + "\n";
}

namespace {

RunConfig config_from_object(const ojson& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const ojson defaults(RunConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    const auto& want = defaults.at(key);
    const bool ok = want.is_number() ? value.is_number()
                                     : want.type() == value.type();
    if (!ok) throw ConfigError("config key '" + key + "' has the wrong type");
    if (want.is_number_unsigned() && value.is_number_integer() && !value.is_number_unsigned()) {
      throw ConfigError("config key '" + key + "' must be non-negative");
    }
    if (want.is_number_integer() && value.is_number_float()) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
  }
  try {
    return j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

}  // namespace

RunConfig config_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_object(j);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + std::string(assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  ojson value = ojson::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  ojson j(cfg);
  j[key] = value;
  cfg = config_from_object(j);
}

std::string config_hash(const RunConfig& cfg) {
  ojson j(cfg);
  j.erase("threads");
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "check-h", "transform", "normalize", "criteria",
      "lsi-scan", "concentration", "lemmas", "sample"};
  return names;
}

namespace {

ojson num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Context {
  const RunConfig& cfg;
  std::string sub;
  std::string hash;
  unsigned threads;
};

unsigned resolve_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("LOGSOB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return default_thread_count();
}

Potential make_potential(const RunConfig& cfg) {
  if (cfg.family == "power") return make_builtin(Family::power, cfg.alpha);
  if (cfg.family == "power_log") return make_builtin(Family::power_log, cfg.alpha, cfg.beta);
  if (cfg.family == "tabulated") {
    if (cfg.table.empty()) throw ConfigError("family 'tabulated' needs a table path");
    return load_tabulated(cfg.table);
  }
  throw ConfigError("unknown family '" + cfg.family + "'");
}

// M alone, for the criteria that do not involve epsilon.
double big_m_param(const RunConfig& cfg, const Potential& p) {
  const double m = cfg.big_m > 0.0 ? cfg.big_m : default_lemma_params(p).big_m;
  if (!(m > 0.0)) throw ConfigError("big_m is required for this potential");
  return m;
}

LemmaParams lemma_params(const RunConfig& cfg, const Potential& p) {
  LemmaParams lp = default_lemma_params(p);
  if (cfg.epsilon > 0.0) lp.epsilon = cfg.epsilon;
  if (cfg.big_m > 0.0) lp.big_m = cfg.big_m;
  if (p.family() != Family::custom && !(lp.epsilon > 0.0)) {
    // x Phi' / Phi is constant 1 or 2 on the boundary of the family
    throw PreconditionError("hypothesis (H) fails for every epsilon > 0 on " + p.name());
  }
  if (!(lp.epsilon > 0.0) || !(lp.big_m > 0.0)) {
    throw ConfigError("epsilon and big_m are required for this potential");
  }
  lp.lam = cfg.lam;
  lp.c_h = cfg.c_h;
  lp.cap = cfg.cap;
  return lp;
}

LogConcaveMeasure make_measure(const RunConfig& cfg, const Potential& p) {
  QuadratureSpec q;
  q.intervals = cfg.intervals;
  q.grading_levels = cfg.grading_levels;
  q.target_rel_error = cfg.target_rel_error;
  q.truncation_offset = cfg.truncation_offset;
  return normalize(p, q);
}

ojson header(const Context& ctx, const Potential& p) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = ctx.sub;
  j["config_hash"] = ctx.hash;
  j["seed"] = ctx.cfg.seed;
  j["potential"] = p.name();
  return j;
}

std::string csv_header(const Context& ctx) {
  std::ostringstream os;
  os << "# logsob " << ctx.sub << " schema_version=" << kSchemaVersion
     << " config_hash=" << ctx.hash << " seed=" << ctx.cfg.seed << "\n";
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

// JSON goes to `out`; the CSV goes to output_dir when set, else to `out`
// when there is no JSON report.
void emit(const Context& ctx, std::ostream& out, const ojson* report,
          const std::string* csv) {
  const std::string json_text = report ? report->dump(2) + "\n" : std::string();
  if (!ctx.cfg.output_dir.empty()) {
    const std::filesystem::path dir(ctx.cfg.output_dir);
    std::filesystem::create_directories(dir);
    if (report) write_file(dir / (ctx.sub + ".json"), json_text);
    if (csv) write_file(dir / (ctx.sub + ".csv"), *csv);
  } else if (!report && csv) {
    out << *csv;
  }
  out << json_text;
}

ojson to_json(const HypothesisReport& r) {
  ojson j;
  j["epsilon"] = num(r.epsilon);
  j["big_m"] = num(r.big_m);
  j["passed"] = r.passed;
  j["ratio_min"] = num(r.ratio_min);
  j["ratio_max"] = num(r.ratio_max);
  j["growth_m1"] = num(r.growth_m1);
  j["growth_m2"] = num(r.growth_m2);
  j["grid"] = r.grid.describe();
  j["reason"] = r.reason;
  return j;
}

ojson to_json(const CriterionReport& r) {
  ojson j;
  j["kind"] = to_string(r.kind);
  j["value"] = num(r.value);
  j["bracket_low"] = num(r.bracket_low);
  j["bracket_high"] = num(r.bracket_high);
  j["maximizer_x"] = num(r.maximizer_x);
  j["grid_spec"] = r.grid_spec;
  j["finite"] = r.finite;
  j["applicable"] = r.applicable;
  j["trend"] = to_string(r.trend);
  j["trend_slope"] = num(r.trend_slope);
  if (r.zero_interval) {
    j["zero_interval"] = {num(r.zero_interval->first), num(r.zero_interval->second)};
  } else {
    j["zero_interval"] = nullptr;
  }
  ojson extra = ojson::object();
  for (const auto& [k, v] : r.extra) extra[k] = num(v);
  j["extra"] = extra;
  return j;
}

ojson to_json(const LemmaVerdict& v) {
  ojson j;
  j["lemma"] = v.lemma;
  j["passed"] = v.passed;
  j["grid_spec"] = v.grid_spec;
  ojson cs = ojson::array();
  for (const auto& c : v.found_constants) {
    ojson cj;
    cj["name"] = c.name;
    cj["value"] = num(c.value);
    cj["candidate"] = c.candidate ? num(*c.candidate) : ojson(nullptr);
    cs.push_back(cj);
  }
  j["found_constants"] = cs;
  ojson vp = ojson::array();
  for (const double x : v.violation_points) vp.push_back(num(x));
  j["violation_points"] = vp;
  j["note"] = v.note;
  return j;
}

int cmd_check_h(const Context& ctx, std::ostream& out) {
  const auto p = make_potential(ctx.cfg);
  const auto lp = lemma_params(ctx.cfg, p);
  const auto rep = check_hypothesis_H(p, lp.epsilon, lp.big_m);
  ojson j = header(ctx, p);
  j["report"] = to_json(rep);
  emit(ctx, out, &j, nullptr);
  return rep.passed ? 0 : 1;
}

int cmd_transform(const Context& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  if (cfg.grid_points < 2 || !(cfg.grid_max > 0.0)) {
    throw ConfigError("transform needs grid_points >= 2 and grid_max > 0");
  }
  const auto p = make_potential(cfg);
  LegendreEngine e(p);
  const HFunction hf = build_H(e, cfg.b_const);
  std::string csv = csv_header(ctx);
  {
    std::ostringstream os;
    os << "# B=" << g17(hf.b_const()) << " D=" << g17(hf.d_const()) << "\n";
    csv += os.str();
  }
  csv += "x,phi,dphi,phi_star,H\n";
  for (const double x : linspace(0.0, cfg.grid_max, cfg.grid_points)) {
    csv += g17(x) + "," + g17(p(x)) + "," + g17(p.derivative(x)) + "," +
           g17(e.legendre(x)) + "," + g17(hf(x)) + "\n";
  }
  emit(ctx, out, nullptr, &csv);
  return 0;
}

int cmd_normalize(const Context& ctx, std::ostream& out) {
  const auto p = make_potential(ctx.cfg);
  const auto m = make_measure(ctx.cfg, p);
  ojson j = header(ctx, p);
  j["z_norm"] = num(m.z_norm());
  j["trunc"] = num(m.trunc());
  j["intervals"] = m.quad().intervals;
  j["subdivisions"] = m.quad().subdivisions;
  j["grading_levels"] = m.quad().grading_levels;
  j["truncation_offset"] = num(m.quad().truncation_offset);
  j["z_doubling_change"] = num(m.z_doubling_change());
  j["truncated_mass_estimate"] = num(m.truncated_mass_estimate());
  j["nodes"] = m.nodes().size();
  j["second_moment"] = num(m.expect([](double x) { return x * x; }));
  ojson q;
  for (const double u : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    q[g17(u)] = num(m.inverse_cdf(u));
  }
  j["quantiles"] = q;
  emit(ctx, out, &j, nullptr);
  return 0;
}

int cmd_criteria(const Context& ctx, std::ostream& out) {
  const auto p = make_potential(ctx.cfg);
  const double big_m = big_m_param(ctx.cfg, p);
  const auto m = make_measure(ctx.cfg, p);
  const auto dens = [&m](double x) { return m.density(x); };
  std::vector<CriterionReport> reps;
  reps.push_back(hardy_constant(dens, dens, Side::right, m.trunc()));
  reps.push_back(barthe_roberto(m, big_m));
  reps.push_back(muckenhoupt_poincare(m));
  reps.push_back(bakry_emery(p));
  ojson j = header(ctx, p);
  j["big_m"] = num(big_m);
  ojson arr = ojson::array();
  bool ok = true;
  for (const auto& r : reps) {
    arr.push_back(to_json(r));
    if (r.applicable && !r.finite) ok = false;
  }
  j["reports"] = arr;
  j["passed"] = ok;
  emit(ctx, out, &j, nullptr);
  return ok ? 0 : 1;
}

int cmd_lsi_scan(const Context& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  if (cfg.refinement < 0 || cfg.refinement > 4) throw ConfigError("refinement must be in 0..4");
  const auto p = make_potential(cfg);
  const auto m = make_measure(cfg, p);
  LegendreEngine e(p);
  const HFunction hf = build_H(e, cfg.b_const);
  ScanOptions opts;
  opts.form = form_from_string(cfg.form);
  opts.a_const = cfg.a_restricted;
  opts.kappa = cfg.kappa;
  opts.threads = ctx.threads;
  const auto rep = estimate_best_constant(m, hf, default_family(cfg.refinement), opts);

  ojson j = header(ctx, p);
  j["family"] = rep.family;
  j["form"] = to_string(rep.form);
  j["a_const"] = num(rep.a_const);
  j["b_const"] = num(rep.b_const);
  j["d_const"] = num(rep.d_const);
  j["kappa"] = num(rep.kappa);
  j["best_ratio"] = num(rep.best_ratio);
  j["at_index"] = rep.at_index ? ojson(*rep.at_index) : ojson(nullptr);
  j["at_function"] = rep.at_function;
  j["members"] = rep.members.size();
  j["counterexamples"] = rep.counterexamples;
  const bool ok = std::isfinite(rep.best_ratio) && rep.counterexamples.empty();
  j["passed"] = ok;

  std::string csv = csv_header(ctx);
  csv += "index,function,numerator,denominator,ratio,skipped,violated\n";
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& r = rep.members[i];
    csv += std::to_string(i) + ",\"" + r.function + "\"," + g17(r.numerator) + "," +
           g17(r.denominator) + "," + g17(r.ratio) + "," + (r.skipped ? "1" : "0") + "," +
           (r.violated ? "1" : "0") + "\n";
  }
  emit(ctx, out, &j, &csv);
  return ok ? 0 : 1;
}

int cmd_concentration(const Context& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  if (!(cfg.clamp > 0.0)) throw ConfigError("clamp must be > 0");
  if (cfg.lam_grid.empty()) throw ConfigError("lam_grid must not be empty");
  const Statistic stat = statistic_from_string(cfg.statistic);
  const auto p = make_potential(cfg);
  const auto m = make_measure(cfg, p);
  LegendreEngine e(p);
  const HFunction hf = build_H(e, cfg.b_const);
  double a = cfg.a_const;
  if (!(a > 0.0)) {
    ScanOptions opts;
    opts.threads = ctx.threads;
    a = estimate_best_constant(m, hf, tilt_family(), opts).best_ratio;
  }
  const double c = cfg.clamp;
  const ScalarMap f = [c](double x) { return std::clamp(x, -c, c); };
  const double zeta = 1.0;
  const auto rows = empirical_deviation(m, f, cfg.n, cfg.lam_grid, cfg.trials, cfg.seed,
                                        stat, ctx.threads);

  std::string csv = csv_header(ctx);
  csv += "lam,empirical,stderr,bound,raw_bound,t_star,gaussian,dominated\n";
  bool ok = true;
  for (const auto& r : rows) {
    const auto tb = tail_bound_detail(a, hf, r.lam, cfg.n, zeta, stat);
    const bool dom = r.empirical <= tb.capped + 3.0 * r.stderr_;
    ok = ok && dom;
    csv += g17(r.lam) + "," + g17(r.empirical) + "," + g17(r.stderr_) + "," +
           g17(tb.capped) + "," + g17(tb.raw) + "," + g17(tb.t_star) + "," +
           (tb.gaussian ? "1" : "0") + "," + (dom ? "1" : "0") + "\n";
  }
  ojson j = header(ctx, p);
  j["a_const"] = num(a);
  j["b_const"] = num(hf.b_const());
  j["d_const"] = num(hf.d_const());
  j["n"] = cfg.n;
  j["trials"] = cfg.trials;
  j["statistic"] = to_string(stat);
  j["lipschitz"] = num(zeta);
  j["regime_split"] = num(regime_split(a, hf, cfg.n, zeta, stat));
  j["regime_split_detected"] = num(detect_regime_split(a, hf, cfg.n, zeta, stat, cfg.lam_grid));
  j["dominated"] = ok;
  emit(ctx, out, &j, &csv);
  return ok ? 0 : 1;
}

int cmd_lemmas(const Context& ctx, std::ostream& out) {
  const auto p = make_potential(ctx.cfg);
  const auto lp = lemma_params(ctx.cfg, p);
  const auto verdicts = run_lemma_battery(p, lp);
  ojson j = header(ctx, p);
  j["epsilon"] = num(lp.epsilon);
  j["big_m"] = num(lp.big_m);
  j["lam"] = num(lp.lam);
  ojson arr = ojson::array();
  bool ok = true;
  for (const auto& v : verdicts) {
    arr.push_back(to_json(v));
    ok = ok && v.passed;
  }
  j["verdicts"] = arr;
  j["passed"] = ok;
  emit(ctx, out, &j, nullptr);
  return ok ? 0 : 1;
}

int cmd_sample(const Context& ctx, std::ostream& out) {
  const auto p = make_potential(ctx.cfg);
  const auto m = make_measure(ctx.cfg, p);
  const auto xs = m.sample(ctx.cfg.samples, ctx.cfg.seed);
  std::string csv = csv_header(ctx);
  csv += "index,x\n";
  for (std::size_t i = 0; i < xs.size(); ++i) csv += std::to_string(i) + "," + g17(xs[i]) + "\n";
  emit(ctx, out, nullptr, &csv);
  return 0;
}

void error_line(std::ostream& err, const std::string& kind, const std::string& msg) {
  ojson j;
  j["error"] = kind;
  j["message"] = msg;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out,
        std::ostream& err) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end()) {
    error_line(err, "usage", "unknown subcommand '" + subcommand + "'");
    return 2;
  }
  try {
    const Context ctx{cfg, subcommand, config_hash(cfg), resolve_threads(cfg)};
    if (subcommand == "check-h") return cmd_check_h(ctx, out);
    if (subcommand == "transform") return cmd_transform(ctx, out);
    if (subcommand == "normalize") return cmd_normalize(ctx, out);
    if (subcommand == "criteria") return cmd_criteria(ctx, out);
    if (subcommand == "lsi-scan") return cmd_lsi_scan(ctx, out);
    if (subcommand == "concentration") return cmd_concentration(ctx, out);
    if (subcommand == "lemmas") return cmd_lemmas(ctx, out);
    return cmd_sample(ctx, out);
  } catch (const ConfigError& e) {
    error_line(err, "config", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    error_line(err, "precondition", e.what());
    return 2;
  } catch (const NumericalError& e) {
    error_line(err, "numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    error_line(err, "internal", e.what());
    return 3;
  }
}

}  // namespace logsob
