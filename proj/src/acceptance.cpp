#include "kinlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "kinlab/commands.hpp"
#include "kinlab/endpoint_lab.hpp"
#include "kinlab/error.hpp"
#include "kinlab/exponents.hpp"
#include "kinlab/mixed_norms.hpp"
#include "kinlab/multilinear_lab.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/report.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/transport.hpp"

namespace kinlab::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& note) {
    ok = ok && cond;
    notes.push_back((cond ? "" : "FAILED ") + note);
  }
  std::string detail() const {
    std::string s;
    for (const auto& n : notes) s += (s.empty() ? "" : "; ") + n;
    return s;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool full(const SuiteConfig& c) { return c.scale == Scale::full; }

// ---------------------------------------------------------------------------

Check exponent_algebra(const SuiteConfig& cfg) {
  using exponents::ExponentTuple;
  Check c;
  const auto e2 = exponents::endpoint_l2(2);
  c.require(e2 == ExponentTuple::make(2, 4, ExtRational(4, 3), 2), "d=2 endpoint " + e2.str());
  const auto s = exponents::scale(e2, ExtRational(4, 3));
  c.require(s == ExponentTuple::make(ExtRational(3, 2), 3, 1, ExtRational(3, 2)), "4/3 transform " + s.str());
  int checked = 0, failed = 0;
  for (int d = 1; d <= 3; ++d) {
    CounterRng rng(CounterRng::batch_key(cfg.seed, 1000 + d));
    for (int i = 0; i < 50; ++i) {
      // 1/p = k/m strictly inside (max(0, 1 - 2/d), 1) so that q >= 1.
      const std::int64_t m = 2 + static_cast<std::int64_t>(rng.next_u64() % 59);
      const std::int64_t k_min = d <= 2 ? 1 : m / 3 + 1;
      const std::int64_t k = k_min + static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(m - k_min));
      const ExtRational p = ExtRational(m, k);
      const auto e = exponents::reduced_family(p, d);
      const auto dual = exponents::dualize(e);
      const bool ok = dual.a == ExtRational(2) * dual.p &&
                      dual.q.reciprocal() + ExtRational(d) * dual.a.reciprocal() == ExtRational(1) &&
                      e.q >= ExtRational(1);
      ++checked;
      failed += ok ? 0 : 1;
    }
  }
  c.require(failed == 0, fmt::format("dual relations exact on {}/{} family tuples", checked - failed, checked));
  return c;
}

// ---------------------------------------------------------------------------

double rho_oracle(const GaussianPhaseSpaceParams& p, double t, std::span<const double> x) {
  const double sx2 = p.width_x * p.width_x, sv2 = p.width_v * p.width_v;
  const double spread = sx2 + t * t * sv2;
  double y2 = 0.0;
  for (int k = 0; k < p.d; ++k) {
    const double y = x[k] - p.x0[k] - t * p.v0[k];
    y2 += y * y;
  }
  return p.amplitude * std::pow(sx2 * sv2 / spread, 0.5 * p.d) * std::exp(-kPi * y2 / spread);
}

double adjoint_oracle(const GaussianSpaceTimeParams& p, std::span<const double> x, std::span<const double> v) {
  const double st2 = p.width_t * p.width_t, sx2 = p.width_x * p.width_x;
  double v2 = 0.0, y2 = 0.0, yv = 0.0;
  for (int k = 0; k < p.d; ++k) {
    const double y = x[k] - p.x0[k] + p.t0 * v[k];
    v2 += v[k] * v[k];
    y2 += y * y;
    yv += y * v[k];
  }
  const double alpha = 1.0 / st2 + v2 / sx2;
  return p.amplitude / std::sqrt(alpha) * std::exp(-kPi * (y2 / sx2 - yv * yv / (sx2 * sx2 * alpha)));
}

Check gaussian_oracles(const SuiteConfig& cfg) {
  Check c;
  const int points = full(cfg) ? 100 : 30;
  for (int d = 1; d <= 2; ++d) {
    const auto rho_err = parallel_map<double>(points, cfg.workers, [&](std::size_t i) {
      CounterRng rng(CounterRng::batch_key(cfg.seed, 2000 + 100000 * d + i));
      auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); };
      GaussianPhaseSpaceParams p;
      p.d = d;
      p.amplitude = u(0.5, 2.0);
      p.width_x = u(0.5, 2.0);
      p.width_v = u(0.5, 2.0);
      for (int k = 0; k < d; ++k) {
        p.x0.push_back(u(-1.0, 1.0));
        p.v0.push_back(u(-1.0, 1.0));
      }
      const double t = u(-2.0, 2.0);
      const double spread = std::sqrt(p.width_x * p.width_x + t * t * p.width_v * p.width_v);
      std::vector<double> x;
      for (int k = 0; k < d; ++k) x.push_back(p.x0[k] + t * p.v0[k] + spread * u(-0.8, 0.8) / std::sqrt(d));
      const double oracle = rho_oracle(p, t, x);
      const auto f0 = make_gaussian_phase_space(p);
      const double quad = transport::density(f0)(t, x);
      const double closed = *transport::density_closed_form(f0).closed_form(t, x);
      return std::max(rel(quad, oracle), rel(closed, oracle));
    });
    const auto adj_err = parallel_map<double>(points, cfg.workers, [&](std::size_t i) {
      CounterRng rng(CounterRng::batch_key(cfg.seed, 3000 + 100000 * d + i));
      auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); };
      GaussianSpaceTimeParams p;
      p.d = d;
      p.amplitude = u(0.5, 2.0);
      p.width_t = u(0.5, 2.0);
      p.width_x = u(0.5, 2.0);
      p.t0 = u(-1.0, 1.0);
      for (int k = 0; k < d; ++k) p.x0.push_back(u(-1.0, 1.0));
      std::vector<double> v, x;
      for (int k = 0; k < d; ++k) v.push_back(u(-2.0, 2.0));
      for (int k = 0; k < d; ++k) x.push_back(p.x0[k] - p.t0 * v[k] + p.width_x * u(-0.8, 0.8) / std::sqrt(d));
      const double oracle = adjoint_oracle(p, x, v);
      const auto g = make_gaussian_spacetime(p);
      const double quad = transport::adjoint_density(g)(x, v);
      const double closed = *transport::adjoint_closed_form(g).closed_form(x, v);
      return std::max(rel(quad, oracle), rel(closed, oracle));
    });
    const double worst_rho = *std::max_element(rho_err.begin(), rho_err.end());
    const double worst_adj = *std::max_element(adj_err.begin(), adj_err.end());
    c.require(worst_rho < 1e-6, fmt::format("d={} rho max rel err {:.2e} over {} points", d, worst_rho, points));
    c.require(worst_adj < 1e-6, fmt::format("d={} rho* max rel err {:.2e} over {} points", d, worst_adj, points));
  }
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    GaussianSpaceTimeParams p;
    p.d = d;
    const auto g = make_gaussian_spacetime(p);
    for (const auto& ps : {"1", "3/2", "2", "3", "4"}) {
      const ExtRational e = ExtRational::parse(ps);
      const auto n = mixed_norms::spacetime_norm([&](double t, std::span<const double> x) { return (*g)(t, x); }, e, e,
                                                 mixed_norms::support_grid(Box{g->support_t()}, 96),
                                                 mixed_norms::support_grid(g->support_x(), 96));
      const double pv = e.to_double();
      worst = std::max(worst, rel(n.value, std::pow(pv, -(d + 1) / (2.0 * pv))));
    }
  }
  c.require(worst < 1e-8, fmt::format("Gaussian L^p norm max rel err {:.2e}", worst));
  return c;
}

// ---------------------------------------------------------------------------

Check truncated_identity(const SuiteConfig& cfg) {
  Check c;
  mixed_norms::AdjointGrid grid;
  grid.workers = cfg.workers;
  endpoint_lab::FourierSideConfig fc;
  fc.workers = cfg.workers;
  {
    fc.d = 1;
    const std::vector<double> vs{1.0, 2.0, 4.0};
    const auto rows = endpoint_lab::truncated_identity(*commands::make_family("gaussian", 1), vs, grid, fc);
    double worst = 0.0;
    for (const auto& r : rows) {
      const double exact = std::sqrt(2.0) * std::asinh(r.v_radius);
      worst = std::max({worst, rel(r.lhs.value, exact), rel(r.rhs.value, exact)});
    }
    c.require(worst < 1e-2, fmt::format("d=1 gaussian: max rel err vs sqrt2*asinh(V) {:.2e}", worst));
  }
  fc.d = 2;
  for (const char* family : {"gaussian", "bump"}) {
    const std::vector<double> vs{1.0, 2.0};
    const auto rows = endpoint_lab::truncated_identity(*commands::make_family(family, 2), vs, grid, fc);
    for (const auto& r : rows) {
      const double gap = std::abs(r.lhs.value - r.rhs.value);
      const double tol = r.lhs.error + r.rhs.error;
      c.require(gap <= tol, fmt::format("d=2 {} V={}: |lhs-rhs| {:.2e} <= err {:.2e}", family, r.v_radius, gap, tol));
    }
  }
  return c;
}

Check endpoint_failure(const SuiteConfig& cfg) {
  Check c;
  mixed_norms::AdjointGrid grid;
  grid.workers = cfg.workers;
  {
    const auto schedule = endpoint_lab::geometric_schedule(8.0, 512.0, 2.0);
    const auto table = endpoint_lab::divergence_study(*commands::make_family("gaussian", 1), schedule, grid);
    const auto fit = table.fit(GrowthModel::logarithmic);
    const bool ok = fit && rel(fit->c1, std::sqrt(2.0)) < 0.05 && fit->r_squared > 0.999;
    c.require(ok, fit ? fmt::format("d=1 slope {:.5f} (sqrt2 {:.5f}) R2 {:.7f}", fit->c1, std::sqrt(2.0), fit->r_squared)
                      : std::string("d=1 fit missing"));
  }
  // Four doublings of V: increments stay bounded below (no geometric decay).
  for (const char* family : {"gaussian", "bump"}) {
    const auto schedule = endpoint_lab::geometric_schedule(1.0, 16.0, 2.0);
    const auto table = endpoint_lab::divergence_study(*commands::make_family(family, 2), schedule, grid);
    const auto inc = table.increments();
    const double lo = *std::min_element(inc.begin(), inc.end());
    const bool ok = inc.size() == 4 && lo > 0.0 && inc.back() >= 0.5 * inc.front();
    c.require(ok, fmt::format("d=2 {}: increments {:.4g} {:.4g} {:.4g} {:.4g}", family, inc[0], inc[1], inc[2], inc[3]));
  }
  return c;
}

Check angular_divergence(const SuiteConfig& cfg) {
  Check c;
  {
    const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    const auto results = endpoint_lab::angular_schedule(2, eps);
    const auto fit = endpoint_lab::angular_growth(results).fit(GrowthModel::logarithmic, true);
    c.require(fit && rel(fit->c1, 8.0 * kPi) < 0.05,
              fmt::format("d=2 slope {:.4f} vs 8pi {:.4f}", fit ? fit->c1 : 0.0, 8.0 * kPi));
  }
  {
    endpoint_lab::AngularConfig ac;
    ac.seed = cfg.seed;
    ac.samples = full(cfg) ? 1000000 : 200000;
    ac.workers = cfg.workers;
    std::vector<double> eps;
    for (int k = 0; k <= 6; ++k) eps.push_back(0.1 * std::pow(0.5, k));
    const auto results = endpoint_lab::angular_schedule(3, eps, ac);
    const bool inc = endpoint_lab::angular_growth(results).strictly_increasing();
    c.require(inc, fmt::format("d=3 MC ({} samples) increasing over eps 0.1..{:.2g}: {:.1f} .. {:.1f}", ac.samples,
                               eps.back(), results.front().value, results.back().value));
  }
  {
    double worst = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-4, 1e-6}) {
      worst = std::max(worst, std::abs(endpoint_lab::radial_integral(1, delta) / std::log(1.0 / delta) - 2.0));
    }
    c.require(worst < 1e-8, fmt::format("radial d=1 |I/ln(1/delta) - 2| {:.1e}", worst));
  }
  return c;
}

// ---------------------------------------------------------------------------

Check multilinear_machinery(const SuiteConfig& cfg) {
  namespace ml = multilinear_lab;
  Check c;
  for (int d = 1; d <= 2; ++d) {
    GaussianSpaceTimeParams p;
    p.d = d;
    p.width_x = 0.8;
    const auto g1 = make_gaussian_spacetime(p);
    p.width_x = 1.3;
    p.x0.assign(d, 0.4);
    const auto g2 = make_gaussian_spacetime(p);
    const std::vector<SpaceTimePtr> g{g1, g2};
    const ml::TimeTuple t({0.25, 1.5});
    const double form = ml::product_form(g, t).value;
    const double exact = *g1->slice_norm(0.25, 1.0) * *g2->slice_norm(1.5, 1.0) / std::pow(1.25, d);
    c.require(rel(form, exact) < 1e-6, fmt::format("d={} two-function identity rel {:.1e}", d, rel(form, exact)));
  }
  const std::size_t configs = full(cfg) ? 100 : 30;
  for (int d = 1; d <= 2; ++d) {
    const auto worst = parallel_map<std::pair<double, double>>(configs, cfg.workers, [&](std::size_t i) {
      const auto conf = ml::random_gaussian_configuration(d, cfg.seed, i);
      double b = INFINITY, in = INFINITY;
      for (const auto& r : ml::bound_checks(conf.slices, conf.times)) {
        (r.kind == ml::BoundKind::bilinear ? b : in) = std::min(r.kind == ml::BoundKind::bilinear ? b : in,
                                                                r.margin / r.bound);
      }
      return std::make_pair(b, in);
    });
    double b = INFINITY, in = INFINITY;
    for (const auto& [x, y] : worst) {
      b = std::min(b, x);
      in = std::min(in, y);
    }
    c.require(b >= -1e-3 && in >= -1e-3,
              fmt::format("d={} {} configs: min margin/bound bilinear {:.3g}, interpolated {:.3g}", d, configs, b, in));
  }
  {
    CounterRng rng(CounterRng::batch_key(cfg.seed, 4000));
    int bad = 0;
    for (int i = 0; i < 60; ++i) {
      auto draw = [&] {
        const auto num = static_cast<std::int64_t>(rng.next_u64() % 41) - 20;
        const auto den = 1 + static_cast<std::int64_t>(rng.next_u64() % 12);
        return ExtRational(num, den);
      };
      const ExtRational a = draw(), b = draw();
      const int d = 1 + i % 3;
      ExtRational expected(1);
      for (int k = 0; k < d; ++k) expected = expected * (b - a);
      bad += ml::block_determinant(a, b, d) == expected ? 0 : 1;
    }
    c.require(bad == 0, fmt::format("block determinant exact on {}/60 rational pairs", 60 - bad));
  }
  {
    int bad = 0;
    for (int d = 1; d <= 3; ++d) {
      for (const auto& s : {ExtRational(5, 4), ExtRational(3, 2), ExtRational(2)}) {
        bad += ml::hls_exponents(d, s).homogeneous() ? 0 : 1;
      }
    }
    c.require(bad == 0, "HLS homogeneity exact for d in {1,2,3}, sigma in {5/4,3/2,2}");
  }
  return c;
}

Check nonendpoint_behavior(const SuiteConfig& cfg) {
  Check c;
  const auto admissible = exponents::ExponentTuple::make(3, 3, 1, ExtRational(3, 2));
  const auto control = exponents::ExponentTuple::make(2, 3, 1, ExtRational(3, 2));
  GaussianPhaseSpaceParams p;
  const GaussianPhaseSpace base(p);
  const std::vector<double> scales{0.25, 1.0, 4.0};
  mixed_norms::RatioGrids grids;
  for (const auto& [e, admissible_case] : {std::pair{admissible, true}, std::pair{control, false}}) {
    const auto ratios = parallel_map<double>(9, cfg.workers, [&](std::size_t i) {
      return mixed_norms::strichartz_ratio(base.dilated(scales[i / 3], scales[i % 3]), e, grids).value;
    });
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double spread = (*hi - *lo) / *lo;
    c.require(admissible_case ? spread < 1e-3 : spread > 0.1,
              fmt::format("{} spread {:.2e} ({} {})", e.str(), spread, admissible_case ? "<" : ">",
                          admissible_case ? "1e-3" : "0.1"));
  }
  const std::vector<ExtRational> sigmas{2, ExtRational(3, 2), ExtRational(5, 4), ExtRational(11, 10)};
  const auto table = multilinear_lab::nonendpoint_sweep(multilinear_lab::gaussian_dilate_family(1), sigmas, {},
                                                        cfg.workers);
  bool finite = true;
  std::string values;
  for (const auto& r : table.rows()) {
    finite = finite && std::isfinite(r.value) && r.value > 0.0;
    values += fmt::format(" {:.4f}", r.value);
  }
  c.require(finite && table.nondecreasing(), "sigma sweep 2,3/2,5/4,11/10:" + values);
  return c;
}

Check determinism(const SuiteConfig& cfg) {
  Check c;
  const auto root = cfg.scratch.empty()
                        ? std::filesystem::temp_directory_path() / fmt::format("kinlab-determinism-{}", cfg.seed)
                        : cfg.scratch;
  std::filesystem::remove_all(root);
  write_data_products(root / "w1", cfg.scale, cfg.seed, 1);
  write_data_products(root / "w4", cfg.scale, cfg.seed, 4);
  const std::string diff = compare_output_trees(root / "w1", root / "w4");
  std::filesystem::remove_all(root);
  c.require(diff.empty(), diff.empty() ? fmt::format("{} data products byte-identical at workers 1 and 4",
                                                     data_products(cfg.scale).size())
                                       : diff);
  return c;
}

using Runner = Check (*)(const SuiteConfig&);

struct Entry {
  Criterion criterion;
  Runner run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list{
      {{"exponent-algebra", "exact exponent algebra and dual relations", 1.0}, exponent_algebra},
      {{"gaussian-oracles", "Gaussian closed forms against quadrature", 30.0}, gaussian_oracles},
      {{"truncated-identity", "truncated Fourier identity", 180.0}, truncated_identity},
      {{"endpoint-failure", "divergence of the truncated endpoint norm", 180.0}, endpoint_failure},
      {{"angular-divergence", "angular and radial integrals", 120.0}, angular_divergence},
      {{"multilinear-machinery", "multilinear form bounds", 180.0}, multilinear_machinery},
      {{"nonendpoint-behavior", "scaling invariance and sigma sweep", 180.0}, nonendpoint_behavior},
      {{"determinism", "worker-count invariant outputs", 300.0}, determinism},
  };
  return list;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::set<std::filesystem::path> relative_files(const std::filesystem::path& root) {
  std::set<std::filesystem::path> out;
  if (!std::filesystem::exists(root)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.insert(std::filesystem::relative(e.path(), root));
  }
  return out;
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = [] {
    std::vector<Criterion> out;
    for (const auto& e : entries()) out.push_back(e.criterion);
    return out;
  }();
  return list;
}

CriterionResult run_criterion(const std::string& id, const SuiteConfig& config) {
  for (const auto& e : entries()) {
    if (e.criterion.id != id) continue;
    CriterionResult r;
    r.id = id;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Check c = e.run(config);
      r.passed = c.ok;
      r.detail = c.detail();
    } catch (const Error& err) {
      r.passed = false;
      r.detail = fmt::format("{} error in {}: {}", err.kind(), err.module(), err.what());
    } catch (const std::exception& err) {
      r.passed = false;
      r.detail = std::string("exception: ") + err.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > e.criterion.budget_seconds) {
      r.passed = false;
      r.detail += fmt::format("; FAILED runtime {:.1f} s exceeds {:.0f} s", r.seconds, e.criterion.budget_seconds);
    }
    return r;
  }
  throw MalformedInput("acceptance", "unknown criterion '" + id + "'");
}

std::vector<CriterionResult> run_all(const SuiteConfig& config,
                                     const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& e : entries()) {
    out.push_back(run_criterion(e.criterion.id, config));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  return fmt::format("{} {} [{:.1f} s] {}", r.passed ? "PASS" : "FAIL", r.id, r.seconds, r.detail);
}

std::vector<DataProduct> data_products(Scale scale) {
  const bool f = scale == Scale::full;
  return {
      {"blowup", R"({"d": 1, "family": "gaussian", "v-schedule": "8:512:x2"})"},
      {"identity", R"({"d": 1, "family": "gaussian", "V": "1,2,4"})"},
      {"angular", R"({"d": 2, "eps-schedule": "1e-1:1e-4:x0.1"})"},
      {"angular", fmt::format(R"({{"d": 3, "eps-schedule": "0.1:0.0015:x0.5", "samples": {}}})", f ? 1000000 : 200000)},
      {"bounds", fmt::format(R"({{"d": 2, "configs": {}}})", f ? 100 : 10)},
      {"sweep", R"({"d": 1})"},
  };
}

void write_data_products(const std::filesystem::path& out_dir, Scale scale, std::uint64_t seed, int workers) {
  const auto products = data_products(scale);
  for (std::size_t i = 0; i < products.size(); ++i) {
    auto overrides = report::Json::parse(products[i].config_json);
    overrides["seed"] = seed;
    overrides["workers"] = workers;
    const auto cfg = commands::merge_config(products[i].command, overrides);
    commands::run(products[i].command, cfg, out_dir / fmt::format("{}-{}", i + 1, products[i].command));
  }
}

std::string compare_output_trees(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto fa = relative_files(a), fb = relative_files(b);
  if (fa != fb) return "file sets differ between " + a.string() + " and " + b.string();
  if (fa.empty()) return "no outputs in " + a.string();
  for (const auto& rel_path : fa) {
    if (rel_path.filename() == "manifest.json") {
      const auto ja = report::stable_manifest(report::Json::parse(read_bytes(a / rel_path)));
      const auto jb = report::stable_manifest(report::Json::parse(read_bytes(b / rel_path)));
      if (ja != jb) return "manifest differs: " + rel_path.string();
    } else if (read_bytes(a / rel_path) != read_bytes(b / rel_path)) {
      return "bytes differ: " + rel_path.string();
    }
  }
  return "";
}

}  // namespace kinlab::acceptance
