#include "kinlab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "kinlab/acceptance.hpp"
#include "kinlab/endpoint_lab.hpp"
#include "kinlab/error.hpp"
#include "kinlab/exponents.hpp"
#include "kinlab/mixed_norms.hpp"
#include "kinlab/multilinear_lab.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/transport.hpp"

namespace kinlab::commands {

namespace {

const char* kModule = "cli";

using report::Cell;
using report::Table;

Json common(int d) {
  return Json{{"d", d}, {"seed", 1}, {"workers", 1}, {"format", "csv"}};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw MalformedInput(kModule, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw MalformedInput(kModule, "not a number: '" + s + "'");
  return v;
}

/// Exponent given as an exact rational or "inf".
ExtRational exponent(const Json& cfg, const char* key) { return ExtRational::parse(cfg.at(key).get<std::string>()); }

class Timer {
 public:
  void mark(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    timings_[phase] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  Json timings() const {
    Json t = timings_;
    t["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return t;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
  Json timings_ = Json::object();
};

struct Context {
  const std::string& command;
  const Json& cfg;
  const std::filesystem::path& dir;
  std::string hash;
  Outcome outcome;
  Timer timer;

  int d() const { return cfg.at("d").get<int>(); }
  int workers() const { return std::max(1, cfg.at("workers").get<int>()); }
  std::uint64_t seed() const { return cfg.at("seed").get<std::uint64_t>(); }
  report::Format format() const { return report::parse_format(cfg.at("format").get<std::string>()); }

  void table(const std::string& stem, const Table& t) {
    const auto path = report::write_table(dir / stem, t, format(), hash);
    outcome.outputs.push_back(path.filename().string());
  }
  void json(const std::string& name, Json body) {
    report::write_json(dir / name, std::move(body), hash);
    outcome.outputs.push_back(name);
  }
};

Json fit_json(const GrowthFit& f, const std::string& abscissa) {
  return Json{{"model", model_name(f.model)},
              {"abscissa", abscissa},
              {"coefficients", {{"c0", f.c0}, {"c1", f.c1}}},
              {"stderr", {{"c0", f.c0_stderr}, {"c1", f.c1_stderr}}},
              {"c1_ci95", {f.c1_ci_lo, f.c1_ci_hi}},
              {"r_squared", f.r_squared}};
}

Cell opt_cell(bool present, double v) { return present ? Cell{v} : Cell{std::string()}; }

// ---------------------------------------------------------------------------

void cmd_exponents(Context& c) {
  const auto e = exponents::ExponentTuple::make(exponent(c.cfg, "q"), exponent(c.cfg, "p"), exponent(c.cfg, "r"),
                                                exponent(c.cfg, "a"));
  const auto verdict = exponents::check_admissible(e, c.d());
  Json body{{"d", c.d()}, {"tuple", e.str()}, {"status", exponents::status_name(verdict.status)}};
  Json violated = Json::array();
  for (auto v : verdict.violated) violated.push_back(exponents::condition_id(v));
  body["violated"] = violated;
  if (exponents::in_reduced_family(e, c.d())) {
    const auto dual = exponents::dualize_reduced(e, c.d());
    body["dual"] = {{"q", dual.q.str()}, {"p", dual.p.str()}, {"a", dual.a.str()}};
  }
  c.json("exponents.json", body);
  c.outcome.summary = exponents::status_name(verdict.status);
}

void cmd_density(Context& c) {
  const int d = c.d();
  GaussianPhaseSpaceParams p;
  p.d = d;
  p.width_x = c.cfg.at("width-x").get<double>();
  p.width_v = c.cfg.at("width-v").get<double>();
  auto f0 = make_gaussian_phase_space(p);
  transport::PointQuadrature quad;
  quad.count = c.cfg.at("quadrature-nodes").get<int>();
  const auto rho = transport::density(f0, quad);
  const auto times = parse_schedule(c.cfg.at("t").get<std::string>());
  const double half = c.cfg.at("x-half-width").get<double>();
  const int n = c.cfg.at("x-nodes").get<int>();
  if (n < 2) throw MalformedInput(kModule, "x-nodes must be >= 2");
  std::vector<std::vector<double>> points;
  for (double t : times) {
    std::vector<int> idx(d, 0);
    while (true) {
      std::vector<double> pt{t};
      for (int k = 0; k < d; ++k) pt.push_back(-half + 2.0 * half * idx[k] / (n - 1));
      points.push_back(pt);
      int k = d - 1;
      while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  const auto values = parallel_map<transport::Estimate>(points.size(), c.workers(), [&](std::size_t i) {
    return rho.evaluate(points[i][0], std::span<const double>(points[i]).subspan(1));
  });
  c.timer.mark("quadrature");
  Table t;
  t.columns = {"t"};
  for (int k = 1; k <= d; ++k) t.columns.push_back("x" + std::to_string(k));
  for (const char* col : {"value", "error", "closed_form"}) t.columns.push_back(col);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<Cell> row;
    for (double v : points[i]) row.emplace_back(v);
    const double exact = f0->density_closed_form(points[i][0], std::span<const double>(points[i]).subspan(1));
    row.emplace_back(values[i].value);
    row.emplace_back(values[i].error);
    row.emplace_back(exact);
    if (exact > 1e-6) worst = std::max(worst, std::abs(values[i].value / exact - 1.0));
    t.add(std::move(row));
  }
  c.table("density", t);
  c.outcome.summary = fmt::format("points={} max_rel_err={:.3g}", points.size(), worst);
}

void cmd_norms(Context& c) {
  const int d = c.d();
  const ExtRational q = exponent(c.cfg, "q"), p = exponent(c.cfg, "p"), a = exponent(c.cfg, "a");
  const int n = c.cfg.at("nodes").get<int>();
  GaussianSpaceTimeParams gp;
  gp.d = d;
  gp.width_t = c.cfg.at("width-t").get<double>();
  gp.width_x = c.cfg.at("width-x").get<double>();
  auto g = make_gaussian_spacetime(gp);
  GaussianPhaseSpaceParams fp;
  fp.d = d;
  fp.width_x = gp.width_x;
  fp.width_v = c.cfg.at("width-v").get<double>();
  auto f0 = make_gaussian_phase_space(fp);

  const auto gn = mixed_norms::spacetime_norm([&](double t, std::span<const double> x) { return (*g)(t, x); }, q, p,
                                              mixed_norms::support_grid(Box{g->support_t()}, n),
                                              mixed_norms::support_grid(g->support_x(), n));
  const auto fn = mixed_norms::phase_space_norm([&](std::span<const double> x, std::span<const double> v) { return (*f0)(x, v); },
                                                a, mixed_norms::support_grid(f0->support_x(), n),
                                                mixed_norms::support_grid(f0->support_v(), n));
  c.timer.mark("quadrature");
  const double g_exact = *g->mixed_norm(q.to_double(), p.to_double());
  const double f_exact = *f0->lebesgue_norm(a.to_double());
  Table t;
  t.columns = {"quantity", "exponents", "value", "error", "closed_form", "rel_err"};
  t.add({std::string("g_mixed"), "q=" + q.str() + " p=" + p.str(), gn.value, gn.error, g_exact,
         std::abs(gn.value / g_exact - 1.0)});
  t.add({std::string("f0_lebesgue"), "a=" + a.str(), fn.value, fn.error, f_exact, std::abs(fn.value / f_exact - 1.0)});
  c.table("norms", t);
  c.outcome.summary = fmt::format("g={:.10g} (closed {:.10g})  f0={:.10g} (closed {:.10g})", gn.value, g_exact,
                                  fn.value, f_exact);
}

void cmd_ratio(Context& c) {
  const int d = c.d();
  const auto e = exponents::ExponentTuple::make(exponent(c.cfg, "q"), exponent(c.cfg, "p"), exponent(c.cfg, "r"),
                                                exponent(c.cfg, "a"));
  const auto mus = parse_schedule(c.cfg.at("mu").get<std::string>());
  const auto nus = parse_schedule(c.cfg.at("nu").get<std::string>());
  GaussianPhaseSpaceParams p;
  p.d = d;
  const GaussianPhaseSpace base(p);
  mixed_norms::RatioGrids grids;
  std::vector<std::pair<double, double>> pairs;
  for (double mu : mus) {
    for (double nu : nus) pairs.emplace_back(mu, nu);
  }
  const auto results = parallel_map<mixed_norms::RatioResult>(pairs.size(), c.workers(), [&](std::size_t i) {
    return mixed_norms::strichartz_ratio(base.dilated(pairs[i].first, pairs[i].second), e, grids);
  });
  c.timer.mark("ratios");
  Table t;
  t.columns = {"mu", "nu", "ratio", "error"};
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    t.add({pairs[i].first, pairs[i].second, results[i].value, results[i].error});
    lo = std::min(lo, results[i].value);
    hi = std::max(hi, results[i].value);
  }
  c.table("ratio", t);
  const auto verdict = exponents::check_admissible(e, d);
  c.outcome.summary = fmt::format("{} {} rel_spread={:.3g}", e.str(), exponents::status_name(verdict.status),
                                  (hi - lo) / lo);
}

mixed_norms::AdjointGrid adjoint_grid(const Context& c) {
  mixed_norms::AdjointGrid grid;
  grid.workers = c.workers();
  return grid;
}

endpoint_lab::FourierSideConfig fourier_config(const Context& c) {
  endpoint_lab::FourierSideConfig f;
  f.d = c.d();
  f.seed = c.seed();
  f.workers = c.workers();
  f.mc_samples = c.cfg.at("mc-samples").get<std::size_t>();
  return f;
}

bool rhs_requested(const Context& c) {
  const std::string mode = c.cfg.at("rhs").get<std::string>();
  if (mode == "auto") return c.d() == 1;
  if (mode == "true") return true;
  if (mode == "false") return false;
  throw MalformedInput(kModule, "rhs must be auto, true or false");
}

void cmd_blowup(Context& c) {
  const auto g = make_family(c.cfg.at("family").get<std::string>(), c.d());
  const auto schedule = parse_schedule(c.cfg.at("v-schedule").get<std::string>());
  const bool with_rhs = rhs_requested(c);
  Table t;
  t.columns = {"V", "lhs", "rhs", "lhs_err", "rhs_err"};
  GrowthTable growth;
  if (with_rhs) {
    for (const auto& r : endpoint_lab::truncated_identity(*g, schedule, adjoint_grid(c), fourier_config(c))) {
      t.add({r.v_radius, r.lhs.value, r.rhs.value, r.lhs.error, r.rhs.error});
      growth.add(r.v_radius, r.lhs.value, r.lhs.error);
    }
  } else {
    growth = endpoint_lab::divergence_study(*g, schedule, adjoint_grid(c));
    for (const auto& r : growth.rows()) t.add({r.param, r.value, opt_cell(false, 0), r.error, opt_cell(false, 0)});
  }
  c.timer.mark("integrals");
  c.table("blowup", t);
  const auto fit = growth.fit(GrowthModel::logarithmic);
  if (fit) {
    c.json("fit.json", fit_json(*fit, "ln(V)"));
    c.outcome.summary = fmt::format("slope={:.6g} r2={:.6g}", fit->c1, fit->r_squared);
  } else {
    c.outcome.summary = "too few rows to fit";
  }
  const auto inc = growth.increments();
  if (!inc.empty()) {
    c.outcome.summary += fmt::format(" min_increment={:.4g}", *std::min_element(inc.begin(), inc.end()));
  }
}

void cmd_identity(Context& c) {
  const auto g = make_family(c.cfg.at("family").get<std::string>(), c.d());
  const auto schedule = parse_schedule(c.cfg.at("V").get<std::string>());
  const double tol = c.cfg.at("tol").get<double>();
  const auto rows = endpoint_lab::truncated_identity(*g, schedule, adjoint_grid(c), fourier_config(c));
  c.timer.mark("integrals");
  Table t;
  t.columns = {"V", "lhs", "rhs", "lhs_err", "rhs_err", "rel_gap"};
  double worst = 0.0;
  for (const auto& r : rows) {
    const double gap = std::abs(r.lhs.value - r.rhs.value) / std::abs(r.lhs.value);
    worst = std::max(worst, gap);
    t.add({r.v_radius, r.lhs.value, r.rhs.value, r.lhs.error, r.rhs.error, gap});
  }
  c.table("identity", t);
  c.outcome.status = worst < tol ? 0 : 1;
  c.outcome.summary = fmt::format("max_rel_gap={:.3g} tol={:.3g} {}", worst, tol, worst < tol ? "ok" : "exceeded");
}

void cmd_angular(Context& c) {
  const auto eps = parse_schedule(c.cfg.at("eps-schedule").get<std::string>());
  endpoint_lab::AngularConfig ac;
  ac.seed = c.seed();
  ac.samples = c.cfg.at("samples").get<std::size_t>();
  ac.workers = c.workers();
  const auto results = endpoint_lab::angular_schedule(c.d(), eps, ac);
  c.timer.mark("integrals");
  Table t;
  t.columns = {"epsilon", "value", "stderr"};
  for (const auto& r : results) t.add({r.epsilon, r.value, r.std_error});
  c.table("angular", t);
  const auto growth = endpoint_lab::angular_growth(results);
  if (const auto fit = growth.fit(GrowthModel::logarithmic, true)) {
    c.json("fit.json", fit_json(*fit, "ln(1/epsilon)"));
    c.outcome.summary = fmt::format("slope={:.6g} r2={:.6g}", fit->c1, fit->r_squared);
  } else {
    c.outcome.summary = "too few rows to fit";
  }
  c.outcome.summary += growth.strictly_increasing() ? " increasing" : " not-increasing";
}

void cmd_bounds(Context& c) {
  const int d = c.d();
  const auto count = c.cfg.at("configs").get<std::size_t>();
  const double tol = c.cfg.at("tol").get<double>();
  const auto reports = parallel_map<std::vector<multilinear_lab::BoundReport>>(count, c.workers(), [&](std::size_t i) {
    const auto conf = multilinear_lab::random_gaussian_configuration(d, c.seed(), i);
    return multilinear_lab::bound_checks(conf.slices, conf.times);
  });
  c.timer.mark("forms");
  Table t;
  t.columns = {"config", "form", "bound", "margin", "kind"};
  double worst = INFINITY;
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& r : reports[i]) {
      t.add({static_cast<std::int64_t>(i), r.form, r.bound, r.margin, r.kind_label()});
      worst = std::min(worst, r.margin / r.bound);
    }
  }
  c.table("bounds", t);
  c.outcome.status = worst >= -tol ? 0 : 1;
  c.outcome.summary = fmt::format("configs={} min_margin/bound={:.4g}", count, worst);
}

void cmd_sweep(Context& c) {
  const int d = c.d();
  const auto sigmas = parse_rational_list(c.cfg.at("sigmas").get<std::string>());
  mixed_norms::DualGrids grids;
  grids.v_radius = c.cfg.at("v-radius").get<double>();
  const auto family = multilinear_lab::gaussian_dilate_family(d);
  const auto table = multilinear_lab::nonendpoint_sweep(family, sigmas, grids, c.workers());
  c.timer.mark("ratios");
  Table t;
  t.columns = {"sigma", "q_sigma", "worst_constant"};
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    t.add({sigmas[i].to_double(), exponents::q_of_sigma(sigmas[i], d).to_double(), table.rows()[i].value});
  }
  c.table("sweep", t);
  const bool monotone = table.nondecreasing();
  c.outcome.status = monotone ? 0 : 1;
  c.outcome.summary = fmt::format("rows={} {}", sigmas.size(), monotone ? "nondecreasing" : "not-monotone");
}

void cmd_verify_all(Context& c) {
  acceptance::SuiteConfig sc;
  sc.scale = c.cfg.at("scale").get<std::string>() == "full" ? acceptance::Scale::full : acceptance::Scale::reduced;
  sc.seed = c.seed();
  sc.workers = c.workers();
  sc.scratch = c.dir / "scratch";
  const auto results = acceptance::run_all(sc, [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format_line(r) << std::endl;
  });
  std::filesystem::remove_all(sc.scratch);
  c.timer.mark("criteria");
  acceptance::write_data_products(c.dir / "data", sc.scale, sc.seed, sc.workers);
  c.timer.mark("data");
  Table t;
  t.columns = {"criterion", "passed", "detail"};
  int failed = 0;
  for (const auto& r : results) {
    t.add({r.id, std::string(r.passed ? "true" : "false"), r.detail});
    failed += r.passed ? 0 : 1;
  }
  c.table("acceptance", t);
  c.outcome.outputs.push_back("data");
  c.outcome.status = failed == 0 ? 0 : 1;
  c.outcome.summary = fmt::format("{} of {} criteria passed", results.size() - failed, results.size());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"exponents", "density", "norms",    "ratio", "blowup",
                                              "angular",   "identity", "bounds", "sweep", "verify-all"};
  return names;
}

Json defaults(const std::string& command) {
  if (command == "exponents") return Json{{"d", 2}, {"q", "2"}, {"p", "4"}, {"r", "4/3"}, {"a", "2"}};
  Json j = common(1);
  if (command == "density") {
    j.update(Json{{"width-x", 1.0}, {"width-v", 1.0}, {"t", "0.5,1,2"}, {"x-half-width", 2.0}, {"x-nodes", 9},
                  {"quadrature-nodes", 48}});
  } else if (command == "norms") {
    j.update(Json{{"q", "3"}, {"p", "3"}, {"a", "3/2"}, {"width-t", 1.0}, {"width-x", 1.0}, {"width-v", 1.0},
                  {"nodes", 64}});
  } else if (command == "ratio") {
    j.update(Json{{"q", "3"}, {"p", "3"}, {"r", "1"}, {"a", "3/2"}, {"mu", "0.25,1,4"}, {"nu", "0.25,1,4"}});
  } else if (command == "blowup") {
    j.update(Json{{"family", "gaussian"}, {"v-schedule", "8:512:x2"}, {"rhs", "auto"}, {"mc-samples", 400000}});
  } else if (command == "identity") {
    j.update(Json{{"family", "gaussian"}, {"V", "2"}, {"tol", 0.01}, {"mc-samples", 400000}});
  } else if (command == "angular") {
    j["d"] = 2;
    j.update(Json{{"eps-schedule", "1e-1:1e-4:x0.1"}, {"samples", 1000000}});
  } else if (command == "bounds") {
    j["d"] = 2;
    j.update(Json{{"configs", 100}, {"tol", 1e-3}});
  } else if (command == "sweep") {
    j.update(Json{{"sigmas", "2,3/2,5/4,11/10"}, {"v-radius", 16.0}});
  } else if (command == "verify-all") {
    j = Json{{"seed", 1}, {"workers", 1}, {"scale", "reduced"}, {"format", "csv"}};
  } else {
    throw MalformedInput(kModule, "unknown command '" + command + "'");
  }
  return j;
}

Json merge_config(const std::string& command, const Json& overrides) {
  Json cfg = defaults(command);
  if (overrides.is_null()) return cfg;
  if (!overrides.is_object()) throw MalformedInput(kModule, "config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (!cfg.contains(key)) throw MalformedInput(kModule, "unknown key '" + key + "' for " + command);
    const Json& def = cfg[key];
    const bool ok = (def.is_number_integer() && value.is_number_integer()) ||
                    (def.is_number_float() && value.is_number()) || (def.is_string() && value.is_string()) ||
                    (def.is_boolean() && value.is_boolean());
    if (!ok) throw MalformedInput(kModule, "key '" + key + "' has the wrong type");
    cfg[key] = def.is_number_float() ? Json(value.get<double>()) : value;
  }
  return cfg;
}

Outcome run(const std::string& command, const Json& config, const std::filesystem::path& out_dir) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw MalformedInput(kModule, "unknown command '" + command + "'");
  }
  std::filesystem::create_directories(out_dir);
  Context c{command, config, out_dir, report::config_hash(config), {}, {}};
  if (command == "exponents") cmd_exponents(c);
  if (command == "density") cmd_density(c);
  if (command == "norms") cmd_norms(c);
  if (command == "ratio") cmd_ratio(c);
  if (command == "blowup") cmd_blowup(c);
  if (command == "identity") cmd_identity(c);
  if (command == "angular") cmd_angular(c);
  if (command == "bounds") cmd_bounds(c);
  if (command == "sweep") cmd_sweep(c);
  if (command == "verify-all") cmd_verify_all(c);
  report::Manifest m;
  m.command = command;
  m.config = config;
  m.outputs = c.outcome.outputs;
  m.timings = c.timer.timings();
  m.seed = config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 0;
  report::write_manifest(out_dir, m);
  return c.outcome;
}

std::vector<double> parse_schedule(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<double> out;
  if (parts.size() == 3) {
    if (parts[2].empty() || parts[2][0] != 'x') throw MalformedInput(kModule, "schedule factor must look like x2");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]), r = parse_double(parts[2].substr(1));
    if (!(a > 0.0) || !(b > 0.0) || !(r > 0.0) || r == 1.0) throw MalformedInput(kModule, "bad schedule '" + text + "'");
    if ((r > 1.0) != (b >= a)) throw MalformedInput(kModule, "schedule factor points away from the end: '" + text + "'");
    const double steps = std::log(b / a) / std::log(r);
    const int n = static_cast<int>(std::floor(steps + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(a * std::pow(r, k));
    return out;
  }
  if (parts.size() != 1) throw MalformedInput(kModule, "schedule must be a:b:xr or a comma list");
  for (const auto& s : split(text, ',')) out.push_back(parse_double(s));
  if (out.empty()) throw MalformedInput(kModule, "empty schedule");
  return out;
}

std::vector<ExtRational> parse_rational_list(const std::string& text) {
  std::vector<ExtRational> out;
  for (const auto& s : split(text, ',')) out.push_back(ExtRational::parse(s));
  if (out.empty()) throw MalformedInput(kModule, "empty list");
  return out;
}

SpaceTimePtr make_family(const std::string& name, int d) {
  if (name == "gaussian") {
    GaussianSpaceTimeParams p;
    p.d = d;
    return make_gaussian_spacetime(p);
  }
  if (name == "bump") {
    BumpParams p;
    p.d = d;
    return make_counterexample_g(p);
  }
  throw MalformedInput(kModule, "family must be gaussian or bump, got '" + name + "'");
}

}  // namespace kinlab::commands
