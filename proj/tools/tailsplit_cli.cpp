// Command-line front end over the C API.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailsplit/tailsplit.h"

using Json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Carries a C API failure up to main.
struct ApiError : std::runtime_error {
  ts_status status;
  ApiError(ts_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ts_status s) {
  if (s != TS_OK) throw ApiError(s, std::string(ts_status_string(s)) + ": " + ts_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ModelPtr = std::unique_ptr<ts_tail_model, Deleter<ts_tail_model, ts_tail_model_free>>;
using MixPtr = std::unique_ptr<ts_mixing_law, Deleter<ts_mixing_law, ts_mixing_law_free>>;
using RegimePtr = std::unique_ptr<ts_regime, Deleter<ts_regime, ts_regime_free>>;
using SamplePtr = std::unique_ptr<ts_sample_set, Deleter<ts_sample_set, ts_sample_set_free>>;
using ReportPtr = std::unique_ptr<ts_report, Deleter<ts_report, ts_report_free>>;

Json defaults() {
  return {
      {"model", {{"alpha", 2.0}, {"x_min", 1.0}}},
      {"mixing", "degenerate:1"},
      {"regime", {{"name", "gt1-fixed-s"}, {"p", 0.5}, {"p_exponent", 0.5}}},
      {"s", {0}},
      {"grids", {{"t", {100.0}}, {"u", {0.0}}, {"v", {0.0}}, {"w", {0.0}}}},
      {"n", 10000},
      {"seed", 1},
      {"variant", "consistent"},
      {"threads", 0},
      {"means", false},
      {"lepage", {{"enabled", false}, {"K", 10000}, {"tail", "mean_correct"}, {"kmax", 4},
                  {"allow_high_moments", false}}},
      {"moments", {{"kind", "ratio"}, {"k", 4}, {"gamma", nullptr}}},
      {"corr", {{"gamma_min", 1.01}, {"gamma_max", 1000.0}, {"points", 60}}},
      {"output", {{"path", ""}, {"format", ""}}},
  };
}

// ---- output

std::string fmt_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using Cell = std::variant<double, std::string, std::int64_t>;

std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return fmt_number(*d);
  if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

Json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return std::isfinite(*d) ? Json(*d) : Json(fmt_number(*d));
  if (auto i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // extra comment lines
  Json extra = Json::object();     // extra top-level keys in JSON output
};

void emit(const Table& table, const Json& config, const std::string& format, std::ostream& os) {
  if (format == "json") {
    Json doc = {{"config", config}};
    for (auto it = table.extra.begin(); it != table.extra.end(); ++it) doc[it.key()] = it.value();
    if (!table.notes.empty()) doc["notes"] = table.notes;
    Json rows = Json::array();
    for (const auto& r : table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < r.size(); ++i) obj[table.columns[i]] = cell_json(r[i]);
      rows.push_back(obj);
    }
    doc["rows"] = rows;
    os << doc.dump(2) << "\n";
    return;
  }
  os << "# config: " << config.dump() << "\n";
  for (const auto& n : table.notes) os << "# " << n << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_field(table.columns[i]);
  os << "\n";
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << "\n";
  }
}

// ---- handles from the resolved config

ModelPtr make_model(const Json& cfg) {
  ts_tail_model* m = nullptr;
  check(ts_tail_model_from_json(cfg.at("model").dump().c_str(), &m));
  return ModelPtr(m);
}

MixPtr make_mix(const Json& cfg) {
  const Json& j = cfg.at("mixing");
  const std::string text = j.is_string() ? j.get<std::string>() : j.dump();
  ts_mixing_law* m = nullptr;
  check(ts_mixing_law_parse(text.c_str(), &m));
  return MixPtr(m);
}

RegimePtr make_regime(const Json& cfg) {
  const Json& r = cfg.at("regime");
  const auto& s = cfg.at("s");
  ts_regime* out = nullptr;
  check(ts_regime_create(r.at("name").get<std::string>().c_str(), s.empty() ? 0u : s[0].get<unsigned>(),
                         r.at("p").get<double>(), r.at("p_exponent").get<double>(), &out));
  return RegimePtr(out);
}

ts_variant variant_of(const Json& cfg) {
  const auto v = cfg.at("variant").get<std::string>();
  if (v == "consistent") return TS_VARIANT_CONSISTENT;
  if (v == "literal") return TS_VARIANT_LITERAL;
  throw UsageError("--variant must be consistent or literal");
}

std::vector<double> grid(const Json& cfg, const char* name) {
  auto v = cfg.at("grids").at(name).get<std::vector<double>>();
  if (v.empty()) throw UsageError(std::string("grid '") + name + "' is empty");
  return v;
}

struct Query {
  double u, v, w;
};

std::vector<Query> queries(const Json& cfg) {
  std::vector<Query> out;
  for (double u : grid(cfg, "u"))
    for (double v : grid(cfg, "v"))
      for (double w : grid(cfg, "w")) out.push_back({u, v, w});
  return out;
}

std::string regime_normalization(const ts_regime* r) {
  size_t needed = 0;
  check(ts_normalization(r, nullptr, 0, &needed));
  std::string s(needed, '\0');
  check(ts_normalization(r, s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

// ---- subcommands

Table run_lt_exact(const Json& cfg) {
  auto model = make_model(cfg);
  auto mix = make_mix(cfg);
  const auto s_list = cfg.at("s").get<std::vector<unsigned>>();
  Table t;
  if (cfg.at("means").get<bool>()) {
    t.columns = {"t", "s", "E_lambda", "E_xi", "E_sigma", "E_S"};
    for (double h : grid(cfg, "t")) {
      for (unsigned s : s_list) {
        ts_component_means cm{};
        check(ts_component_means_eval(model.get(), mix.get(), h, s, &cm));
        t.rows.push_back({h, std::int64_t{s}, cm.lambda, cm.xi, cm.sigma, cm.total});
      }
    }
    return t;
  }
  t.columns = {"t", "s", "u", "v", "w", "value", "abs_err"};
  for (double h : grid(cfg, "t")) {
    for (unsigned s : s_list) {
      for (const auto& q : queries(cfg)) {
        double value = 0.0, err = 0.0;
        check(ts_lt_exact(model.get(), mix.get(), h, s, q.u, q.v, q.w, &value, &err));
        t.rows.push_back({h, std::int64_t{s}, q.u, q.v, q.w, value, err});
      }
    }
  }
  return t;
}

Table run_lt_limit(const Json& cfg) {
  auto model = make_model(cfg);
  auto mix = make_mix(cfg);
  auto regime = make_regime(cfg);
  const auto variant = variant_of(cfg);
  const std::string name = cfg.at("regime").at("name").get<std::string>();
  Table t;
  t.columns = {"regime", "u", "v", "w", "value"};
  for (const auto& q : queries(cfg)) {
    double value = 0.0;
    check(ts_lt_limit(regime.get(), model.get(), mix.get(), q.u, q.v, q.w, variant, &value));
    t.rows.push_back({name, q.u, q.v, q.w, value});
  }
  const Json norm = Json::parse(regime_normalization(regime.get()));
  t.extra["regime"] = name;
  t.extra["normalizers"] = norm;
  if (t.rows.size() == 1) t.extra["value"] = std::get<double>(t.rows[0][4]);
  t.notes.push_back("normalizers: " + norm.dump());
  return t;
}

double moments_gamma(const Json& cfg) {
  const Json& g = cfg.at("moments").at("gamma");
  if (!g.is_null()) return g.get<double>();
  return 1.0 / cfg.at("model").at("alpha").get<double>();
}

Table run_moments(const Json& cfg) {
  const auto& mc = cfg.at("moments");
  const std::string kind = mc.at("kind").get<std::string>();
  const auto s_list = cfg.at("s").get<std::vector<unsigned>>();
  Table t;
  if (kind == "ratio") {
    const double gamma = moments_gamma(cfg);
    const unsigned k = mc.at("k").get<unsigned>();
    if (k < 1) throw UsageError("--k must be at least 1");
    t.columns = {"s", "gamma", "mean", "variance"};
    for (unsigned i = 1; i <= k; ++i) t.columns.push_back("moment_" + std::to_string(i));
    for (unsigned s : s_list) {
      std::vector<Cell> row{std::int64_t{s}, gamma};
      double mean = 0.0, var = 0.0;
      check(ts_ratio_moment(s, 1, gamma, &mean));
      check(ts_ratio_variance(s, gamma, &var));
      row.push_back(mean);
      row.push_back(var);
      for (unsigned i = 1; i <= k; ++i) {
        double m = 0.0;
        check(ts_ratio_moment(s, i, gamma, &m));
        row.push_back(m);
      }
      t.rows.push_back(row);
    }
    return t;
  }
  if (kind == "t-infinity") {
    const double alpha = cfg.at("model").at("alpha").get<double>();
    double mean = 0.0, var = 0.0;
    check(ts_t_infinity_moments(alpha, &mean, &var));
    t.columns = {"alpha", "mean", "variance"};
    t.rows.push_back({alpha, mean, var});
    return t;
  }
  t.columns = {"kind", "s", "value"};
  for (unsigned s : s_list) {
    double value = 0.0;
    if (kind == "sum-over-max") {
      auto model = make_model(cfg);
      auto mix = make_mix(cfg);
      check(ts_sum_over_max_mean(s, model.get(), mix.get(), variant_of(cfg), &value));
    } else if (kind == "max-over-sum") {
      auto model = make_model(cfg);
      auto mix = make_mix(cfg);
      check(ts_max_over_sum_mean(model.get(), mix.get(), s, &value));
    } else if (kind == "xi-plus-sigma") {
      auto mix = make_mix(cfg);
      check(ts_mean_xi_plus_sigma(s, moments_gamma(cfg), mix.get(), &value));
    } else if (kind == "centered-ratio") {
      check(ts_centered_ratio_mean(s, moments_gamma(cfg), &value));
    } else {
      throw UsageError("unknown moments kind '" + kind + "'");
    }
    t.rows.push_back({kind, std::int64_t{s}, value});
  }
  return t;
}

ts_lepage_tail lepage_tail(const Json& cfg) {
  const auto v = cfg.at("lepage").at("tail").get<std::string>();
  if (v == "mean_correct") return TS_LEPAGE_MEAN_CORRECT;
  if (v == "drop") return TS_LEPAGE_DROP;
  throw UsageError("--tail must be drop or mean_correct");
}

Table run_simulate(const Json& cfg) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const std::size_t n = cfg.at("n").get<std::size_t>();
  Table t;
  if (cfg.at("lepage").at("enabled").get<bool>()) {
    const auto& lp = cfg.at("lepage");
    const double alpha = cfg.at("model").at("alpha").get<double>();
    const std::size_t K = lp.at("K").get<std::size_t>();
    const unsigned kmax = lp.at("kmax").get<unsigned>();
    const int allow = lp.at("allow_high_moments").get<bool>() ? 1 : 0;
    t.columns = {"statistic", "s", "value", "std_error"};
    for (unsigned s : cfg.at("s").get<std::vector<unsigned>>()) {
      ts_ratio_stats r{};
      check(ts_simulate_ratio(alpha, s, K, lepage_tail(cfg), n, seed, kmax, allow, &r));
      const std::int64_t si = s;
      t.rows.push_back({std::string("ratio_mean"), si, r.mean.value, r.mean.std_error});
      t.rows.push_back({std::string("ratio_variance"), si, r.variance.value, r.variance.std_error});
      for (unsigned k = 0; k < r.kmax; ++k)
        t.rows.push_back({"ratio_moment_" + std::to_string(k + 1), si, r.raw_moments[k].value,
                          r.raw_moments[k].std_error});
    }
    ts_t_infinity_stats ti{};
    check(ts_simulate_t_infinity(alpha, K, lepage_tail(cfg), n, seed, &ti));
    t.rows.push_back({std::string("t_mean"), std::int64_t{-1}, ti.mean.value, ti.mean.std_error});
    t.rows.push_back({std::string("t_variance"), std::int64_t{-1}, ti.variance.value, ti.variance.std_error});
    t.rows.push_back({std::string("corr_r0sq_t"), std::int64_t{-1}, ti.correlation_with_r0_squared.value,
                      ti.correlation_with_r0_squared.std_error});
    return t;
  }
  auto model = make_model(cfg);
  auto mix = make_mix(cfg);
  auto regime = make_regime(cfg);
  const double horizon = grid(cfg, "t").front();
  ts_sample_set* raw = nullptr;
  check(ts_simulate_paths(regime.get(), model.get(), mix.get(), horizon, n, seed, 1, &raw));
  SamplePtr set(raw);
  double redraw = 0.0;
  check(ts_sample_set_redraw_rate(set.get(), &redraw));
  t.notes.push_back("redraw_rate: " + fmt_number(redraw));
  for (size_t i = 0; i < ts_sample_set_warning_count(set.get()); ++i) {
    const std::string w = ts_sample_set_warning(set.get(), i);
    t.notes.push_back("warning: " + w);
    std::cerr << "warning: " << w << "\n";
  }
  t.columns = {"lambda", "xi", "sigma"};
  double triple[3];
  for (size_t i = 0; i < ts_sample_set_size(set.get()); ++i) {
    check(ts_sample_set_get(set.get(), i, triple));
    t.rows.push_back({triple[0], triple[1], triple[2]});
  }
  return t;
}

Table run_converge(const Json& cfg) {
  auto model = make_model(cfg);
  auto mix = make_mix(cfg);
  auto regime = make_regime(cfg);
  const auto ts = grid(cfg, "t");
  std::vector<double> qs;
  for (const auto& q : queries(cfg)) qs.insert(qs.end(), {q.u, q.v, q.w});
  ts_report* raw = nullptr;
  check(ts_convergence_report(regime.get(), model.get(), mix.get(), ts.data(), ts.size(), qs.data(), qs.size() / 3,
                              cfg.at("n").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>(),
                              variant_of(cfg), &raw));
  ReportPtr rep(raw);
  Table t;
  int flagged = 0, nonincreasing = 0;
  check(ts_report_flags(rep.get(), &flagged, &nonincreasing));
  Json horizons = Json::array();
  for (size_t i = 0; i < ts_report_horizon_count(rep.get()); ++i) {
    ts_horizon h{};
    check(ts_report_horizon_get(rep.get(), i, &h));
    t.notes.push_back("horizon t=" + fmt_number(h.t) + " median_gap=" + fmt_number(h.median_gap) +
                      " median_stderr=" + fmt_number(h.median_std_error) + " redraw_rate=" + fmt_number(h.redraw_rate));
    horizons.push_back({{"t", h.t}, {"median_gap", h.median_gap}, {"median_stderr", h.median_std_error},
                        {"redraw_rate", h.redraw_rate}});
  }
  t.notes.push_back(std::string("flagged: ") + (flagged ? "true" : "false") +
                    " strictly_nonincreasing: " + (nonincreasing ? "true" : "false"));
  for (size_t i = 0; i < ts_report_warning_count(rep.get()); ++i) {
    const std::string w = ts_report_warning(rep.get(), i);
    t.notes.push_back("warning: " + w);
    std::cerr << "warning: " << w << "\n";
  }
  t.extra["horizons"] = horizons;
  t.extra["flagged"] = flagged != 0;
  t.columns = {"t", "u", "v", "w", "empirical", "stderr", "limit", "gap"};
  for (size_t i = 0; i < ts_report_row_count(rep.get()); ++i) {
    ts_report_row r{};
    check(ts_report_row_get(rep.get(), i, &r));
    t.rows.push_back({r.t, r.u, r.v, r.w, r.empirical, r.std_error, r.limit, r.gap});
  }
  return t;
}

Table run_corr(const Json& cfg) {
  const auto& c = cfg.at("corr");
  const double lo = c.at("gamma_min").get<double>();
  const double hi = c.at("gamma_max").get<double>();
  const unsigned points = c.at("points").get<unsigned>();
  if (!(lo > 1.0 && hi >= lo) || points < 1) throw UsageError("corr needs 1 < gamma_min <= gamma_max and points >= 1");
  Table t;
  t.columns = {"gamma", "alpha", "rho", "covariance", "mean_r2_t"};
  for (unsigned i = 0; i < points; ++i) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const double g = lo * std::pow(hi / lo, frac);
    ts_correlation r{};
    check(ts_correlation_r0sq_tinf(g, &r));
    t.rows.push_back({g, 1.0 / g, r.rho, r.covariance, r.mean_r2_t});
  }
  t.notes.push_back("rho tends to -6/sqrt(43) = " + fmt_number(-6.0 / std::sqrt(43.0)) + " as gamma grows");
  return t;
}

int run_check(const Json& cfg, std::ostream& os, const std::string& format) {
  size_t needed = 0;
  int ok = 0;
  std::string buf(1 << 16, '\0');
  ts_status st = ts_run_identity_suite(buf.data(), buf.size(), &needed, &ok);
  if (st == TS_ERR_INVALID_ARGUMENT && needed > buf.size()) {
    buf.assign(needed, '\0');
    st = ts_run_identity_suite(buf.data(), buf.size(), &needed, &ok);
  }
  check(st);
  buf.resize(needed - 1);
  const Json results = Json::parse(buf);
  if (format == "json") {
    os << Json({{"config", cfg}, {"all_passed", ok != 0}, {"results", results}}).dump(2) << "\n";
  } else {
    for (const auto& r : results)
      os << (r.at("passed").get<bool>() ? "PASS " : "FAIL ") << r.at("name").get<std::string>() << ": "
         << r.at("detail").get<std::string>() << "\n";
  }
  return ok ? kExitOk : kExitCheckFailed;
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split heavy-tailed aggregate claims into top claims, the next largest claim and the rest."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string config_path, output_path, format, variant, mixing, regime_name, kind, tail;
  bool dump_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, x_min, rho, p, p_exponent, gamma, gamma_min, gamma_max;
  std::optional<std::size_t> n, K;
  std::optional<unsigned> k, kmax, threads, points;
  std::vector<unsigned> s_list;
  std::vector<double> t_grid, u_grid, v_grid, w_grid;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_flag("--dump-config", dump_config, "Print the resolved configuration and exit");
  app.add_option("--seed", seed, "Master seed (overrides SEED)");
  app.add_option("--output,-o", output_path, "Output file (default stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--variant", variant, "Closed-form variant: consistent or literal")
      ->check(CLI::IsMember({"consistent", "literal"}));
  app.add_option("--threads", threads, "Worker threads for simulation (0 = all cores)");
  app.add_option("--alpha", alpha, "Tail exponent");
  app.add_option("--x-min", x_min, "Lower end of the claim support");
  app.add_option("--rho", rho, "Log-power exponent of the slowly varying factor");
  app.add_option("--mixing", mixing, "degenerate:T, gamma:A,B, discrete:V@P,... or JSON");
  app.add_option("--regime", regime_name, "Limit regime, e.g. gt1-fixed-s");
  app.add_option("--s", s_list, "Number of top claims split off (comma list)")->delimiter(',');
  app.add_option("--p", p, "Fixed proportion for fixed-p regimes");
  app.add_option("--p-exponent", p_exponent, "e in p(t) = t^-e for vanishing regimes");
  app.add_option("--t", t_grid, "Horizons (comma list)")->delimiter(',');
  app.add_option("--u", u_grid, "Top-sum transform arguments (comma list)")->delimiter(',');
  app.add_option("--v", v_grid, "Next-largest transform arguments (comma list)")->delimiter(',');
  app.add_option("--w", w_grid, "Small-sum transform arguments (comma list)")->delimiter(',');
  app.add_option("--n", n, "Sample size (paths, LePage draws, or paths per horizon)");

  auto* lt_exact = app.add_subcommand("lt-exact", "Exact finite-horizon joint transform");
  bool means = false;
  lt_exact->add_flag("--means", means, "Print component means instead");
  app.add_subcommand("lt-limit", "Limit transform for a regime");
  auto* moments = app.add_subcommand("moments", "Closed-form moments of the limit variables");
  moments->add_option("--kind", kind, "ratio, t-infinity, sum-over-max, max-over-sum, xi-plus-sigma, centered-ratio");
  moments->add_option("--gamma", gamma, "Tail index 1/alpha (defaults to 1/alpha)");
  moments->add_option("--k", k, "Highest ratio moment");
  auto* simulate = app.add_subcommand("simulate", "Simulate normalized paths or LePage ratio statistics");
  bool lepage = false, allow_high = false;
  simulate->add_flag("--lepage", lepage, "Use the LePage series instead of paths");
  simulate->add_option("--K", K, "LePage truncation depth");
  simulate->add_option("--tail", tail, "drop or mean_correct")->check(CLI::IsMember({"drop", "mean_correct"}));
  simulate->add_option("--kmax", kmax, "Highest raw ratio moment");
  simulate->add_flag("--allow-high-moments", allow_high, "Permit kmax above 4");
  app.add_subcommand("converge", "Convergence report of simulated transforms to the limit");
  auto* corr = app.add_subcommand("corr", "Correlation of R_(0)^2 and T over a gamma grid (plot data)");
  corr->add_option("--gamma-min", gamma_min, "Smallest gamma");
  corr->add_option("--gamma-max", gamma_max, "Largest gamma");
  corr->add_option("--points", points, "Number of log-spaced points");
  app.add_subcommand("check", "Run the built-in identity suite");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Json cfg = defaults();
    if (!config_path.empty()) cfg.merge_patch(load_config_file(config_path));
    if (const char* env = std::getenv("SEED"); env != nullptr && !seed) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        cfg["seed"] = static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw UsageError(std::string("SEED must be an unsigned integer, got '") + env + "'");
      }
    }
    if (seed) cfg["seed"] = *seed;
    if (alpha) cfg["model"]["alpha"] = *alpha;
    if (x_min) cfg["model"]["x_min"] = *x_min;
    if (rho) cfg["model"]["sv"] = {{"kind", "log_power"}, {"rho", *rho}};
    if (!mixing.empty()) cfg["mixing"] = mixing;
    if (!regime_name.empty()) cfg["regime"]["name"] = regime_name;
    if (p) cfg["regime"]["p"] = *p;
    if (p_exponent) cfg["regime"]["p_exponent"] = *p_exponent;
    if (!s_list.empty()) cfg["s"] = s_list;
    if (!t_grid.empty()) cfg["grids"]["t"] = t_grid;
    if (!u_grid.empty()) cfg["grids"]["u"] = u_grid;
    if (!v_grid.empty()) cfg["grids"]["v"] = v_grid;
    if (!w_grid.empty()) cfg["grids"]["w"] = w_grid;
    if (n) cfg["n"] = *n;
    if (threads) cfg["threads"] = *threads;
    if (!variant.empty()) cfg["variant"] = variant;
    if (means) cfg["means"] = true;
    if (!kind.empty()) cfg["moments"]["kind"] = kind;
    if (gamma) cfg["moments"]["gamma"] = *gamma;
    if (k) cfg["moments"]["k"] = *k;
    if (lepage) cfg["lepage"]["enabled"] = true;
    if (K) cfg["lepage"]["K"] = *K;
    if (!tail.empty()) cfg["lepage"]["tail"] = tail;
    if (kmax) cfg["lepage"]["kmax"] = *kmax;
    if (allow_high) cfg["lepage"]["allow_high_moments"] = true;
    if (gamma_min) cfg["corr"]["gamma_min"] = *gamma_min;
    if (gamma_max) cfg["corr"]["gamma_max"] = *gamma_max;
    if (points) cfg["corr"]["points"] = *points;
    if (!output_path.empty()) cfg["output"]["path"] = output_path;
    if (!format.empty()) cfg["output"]["format"] = format;
    cfg["command"] = command;

    std::string fmt = cfg.at("output").at("format").get<std::string>();
    if (fmt.empty()) fmt = command == "lt-limit" ? "json" : (command == "check" ? "text" : "csv");
    cfg["output"]["format"] = fmt;

    if (dump_config) {
      std::cout << cfg.dump(2) << "\n";
      return kExitOk;
    }
    ts_set_threads(cfg.at("threads").get<unsigned>());

    // Validate the model, mixing law and regime together before any compute.
    if (command == "lt-limit" || command == "converge" || (command == "simulate" && !cfg["lepage"]["enabled"])) {
      auto model = make_model(cfg);
      auto mix = make_mix(cfg);
      auto regime = make_regime(cfg);
      double unused = 0.0;
      check(ts_lt_limit(regime.get(), model.get(), mix.get(), 0, 0, 0, variant_of(cfg), &unused));
    }

    const std::string path = cfg.at("output").at("path").get<std::string>();
    std::ofstream file;
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + path + "'");
    }
    std::ostream& os = path.empty() ? std::cout : file;

    if (command == "check") return run_check(cfg, os, fmt);
    Table table;
    if (command == "lt-exact") table = run_lt_exact(cfg);
    else if (command == "lt-limit") table = run_lt_limit(cfg);
    else if (command == "moments") table = run_moments(cfg);
    else if (command == "simulate") table = run_simulate(cfg);
    else if (command == "converge") table = run_converge(cfg);
    else if (command == "corr") table = run_corr(cfg);
    emit(table, cfg, fmt == "json" ? "json" : "csv", os);
    return kExitOk;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.status == TS_ERR_NUMERICAL) {
      double est = 0.0, bound = 0.0;
      ts_last_numerical_estimate(&est, &bound);
      std::cerr << "best estimate " << fmt_number(est) << " with error bound " << fmt_number(bound) << "\n";
      return kExitNumerical;
    }
    return e.status == TS_ERR_INTERNAL ? kExitNumerical : kExitValidation;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed configuration: " << e.what() << "\n";
    return kExitValidation;
  }
}
