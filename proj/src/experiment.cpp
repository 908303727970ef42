#include "isodiam/experiment.hpp"

#include "isodiam/catalog.hpp"
#include "isodiam/geometry.hpp"
#include "isodiam/obstacle.hpp"
#include "isodiam/shapeopt.hpp"

#include <boost/math/special_functions/ellint_2.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace isodiam {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::ConfigInvalid, where + ": " + msg);
}

// Typed access to a params object that records which keys were read, so that
// leftovers can be rejected by name.
class Params {
 public:
  Params(const json& j, std::string path, double scale) : j_(j), path_(std::move(path)), scale_(scale) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!has(key)) return fallback;
    return req<T>(key);
  }

  template <class T>
  T req(const std::string& key) {
    used_.insert(key);
    if (!has(key)) invalid(where(key), "missing");
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      invalid(where(key), "wrong type");
    }
  }

  json raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) invalid(where(key), "missing");
    return j_.at(key);
  }

  Params sub(const std::string& key) {
    used_.insert(key);
    if (!has(key)) invalid(where(key), "missing");
    return Params(j_.at(key), where(key), scale_);
  }

  /// Tolerances scale with --tol-scale.
  double tol(const std::string& key, double fallback) { return scale_ * get<double>(key, fallback); }

  Point point(const std::string& key, const Point& fallback) {
    if (!has(key)) return fallback;
    const auto v = req<std::vector<double>>(key);
    if (v.size() != 2) invalid(where(key), "expected [x, y]");
    return {v[0], v[1]};
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) invalid(where(item.key()), "unknown key");
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  double scale_;
  std::set<std::string> used_;
};

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; }) == allowed.end())
      invalid(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
}

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  std::uint64_t seed;
  ExperimentResult& res;

  void expect(const std::string& name, double value, const std::string& requirement, bool pass) {
    res.assertions.push_back({name, value, requirement, pass});
  }

  std::ofstream artifact(const std::string& suffix) {
    const std::string name = cfg.id + suffix;
    res.artifacts.push_back(name);
    std::ofstream out(opts.out / name);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (opts.out / name).string());
    out << std::setprecision(17);
    return out;
  }

  fs::path path(const std::string& suffix) {
    res.artifacts.push_back(cfg.id + suffix);
    return opts.out / (cfg.id + suffix);
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

void expect_relative(Context& ctx, const std::string& name, double value, double target, double rel) {
  ctx.expect(name, value, "within " + fmt(rel) + " (relative) of " + fmt(target),
             std::abs(value - target) <= rel * std::abs(target));
}

// ---------------------------------------------------------------------------
// verify

void run_verify(Context& ctx, Params& p, const BackendPtr& m) {
  const std::string check = p.req<std::string>("check");
  const double tol = p.tol("tol", 1e-6);
  auto report_asserts = [&](const VerificationReport& rep, const std::string& label) {
    ctx.expect(label + "bound", rep.margin, "margin >= -" + fmt(rep.tol) + " for ratio " + std::string(to_string(rep.bound)),
               rep.pass);
  };
  auto optional_targets = [&](VerificationReport& rep) {
    if (p.has("expected")) {
      Params e = p.sub("expected");
      const double value = e.req<double>("value");
      expect_relative(ctx, "expected", rep.ratio, value, e.tol("rel_tol", 5e-3));
      e.finish();
    }
    if (p.has("ratio_above")) {
      const double x = p.req<double>("ratio_above");
      ctx.expect("ratio_above", rep.ratio, "> " + fmt(x), rep.ratio > x);
    }
    if (p.has("ratio_within")) {
      const auto r = p.req<std::vector<double>>("ratio_within");
      if (r.size() != 2) invalid(p.where("ratio_within"), "expected [lo, hi]");
      ctx.expect("ratio_within", rep.ratio, "in [" + fmt(r[0]) + ", " + fmt(r[1]) + "]",
                 rep.ratio >= r[0] && rep.ratio <= r[1]);
    }
    if (p.has("strict")) {
      const bool want = p.req<bool>("strict");
      ctx.expect("strict", rep.margin - 3 * rep.refinement_delta,
                 want ? "margin > 3 refinement_delta" : "margin <= 3 refinement_delta", rep.strict() == want);
    }
  };

  if (check == "euclidean" || check == "cartan_hadamard") {
    const json spec = p.raw("region");
    const bool euclid = check == "euclidean";
    const Region r = region_from_spec(m, spec);
    VerificationReport rep;
    if (spec.contains("n")) {
      const RegionFamily fam = [&](int n) { return n == int(r.size()) ? r : region_from_spec(m, spec, n); };
      rep = euclid ? check_euclidean(fam, int(r.size()), tol) : check_ch(fam, int(r.size()), tol);
    } else {
      rep = euclid ? check_euclidean(r, tol) : check_ch(r, tol);
    }
    const std::string shape = spec.value("shape", "");
    if (euclid && shape == "ellipse") {
      // 2 a E(e) / (pi b) for semi-axes a >= b: welzl radius a, perimeter 4 a E(e).
      const double a = std::max(spec.at("a").get<double>(), spec.at("b").get<double>());
      const double b = std::min(spec.at("a").get<double>(), spec.at("b").get<double>());
      rep.expected = 2.0 * a * boost::math::ellint_2(std::sqrt(1.0 - b * b / (a * a))) / (M_PI * b);
      rep.comparator = "complete elliptic integral perimeter, radius = semi-major axis";
      expect_relative(ctx, "oracle", rep.ratio, *rep.expected, p.tol("oracle_rel_tol", 1e-4));
    }
    if (!euclid && shape == "metric_circle") {
      const Point c = spec.contains("center") ? Point(spec["center"][0], spec["center"][1]) : m->apex();
      rep.expected = 1.0 + m->ball_measures(c, spec.at("r").get<double>()).excess;
      rep.comparator = "metric ball measures";
      expect_relative(ctx, "oracle", rep.ratio, *rep.expected, p.tol("oracle_rel_tol", 1e-4));
    }
    report_asserts(rep, "");
    optional_targets(rep);
    ctx.res.reports.push_back(rep);
  } else if (check == "cartan_hadamard_ball" || check == "ricci_ball") {
    const Point c = p.point("center", m->apex());
    std::vector<double> radii;
    if (p.has("radii"))
      radii = p.req<std::vector<double>>("radii");
    else
      radii.push_back(p.req<double>("r"));
    for (double r : radii) {
      VerificationReport rep = check == "ricci_ball" ? check_ricci_ball(m, c, r, tol) : check_ch_ball(m, c, r, tol);
      report_asserts(rep, "r=" + fmt(r) + " ");
      ctx.res.reports.push_back(rep);
    }
    if (radii.size() == 1) optional_targets(ctx.res.reports.back());
  } else if (check == "random_star") {
    const int count = p.get<int>("count", 50);
    const int n_min = p.get<int>("n_min", 6), n_max = p.get<int>("n_max", 24);
    const double r_min = p.req<double>("r_min"), r_max = p.req<double>("r_max");
    const Point c = p.point("center", m->apex());
    if (count < 1 || n_min < 4 || n_max < n_min) invalid(p.where("count"), "need count >= 1 and 4 <= n_min <= n_max");
    const bool euclid = m->kind() == BackendKind::EuclideanPlane;
    double worst = std::numeric_limits<double>::infinity();
    bool all = true;
    for (int i = 0; i < count; ++i) {
      const int n = n_min + int((ctx.seed + i) % std::uint64_t(n_max - n_min + 1));
      const Region r = random_star_region(m, c, n, r_min, r_max, ctx.seed + std::uint64_t(i));
      VerificationReport rep = euclid ? check_euclidean(r, tol) : check_ch(r, tol);
      rep.id += "_random_" + std::to_string(i);
      // Relative tolerance: ratio >= 1 - tol ratio.
      const bool ok = rep.ratio >= 1.0 - tol * rep.ratio;
      all = all && ok;
      worst = std::min(worst, rep.ratio);
      ctx.res.reports.push_back(rep);
    }
    ctx.expect("all_random_regions", worst, "min ratio >= 1 - " + fmt(tol) + " ratio", all);
  } else if (check == "constrained") {
    Params b = p.sub("container");
    const Container box{b.point("center", Point::Zero()), b.req<double>("radius")};
    b.finish();
    ConstrainedOptions o;
    o.vertices = p.get<int>("vertices", o.vertices);
    o.perimeter_tol = p.tol("perimeter_tol", o.perimeter_tol);
    o.curvature_tol = p.tol("curvature_tol", o.curvature_tol);
    o.shape.meb.seed = ctx.seed;
    const auto out = constrained_run(m, p.req<double>("V"), box, o);
    ctx.expect("perimeter_vs_oracle", out.report.ratio, "within " + fmt(o.perimeter_tol) + " of the lens oracle",
               std::abs(out.report.ratio - 1.0) <= o.perimeter_tol);
    ctx.expect("interior_curvature_std", out.interior_curvature_std, "<= " + fmt(o.curvature_tol),
               out.interior_curvature_std <= o.curvature_tol);
    if (out.obstacle) {
      const double ctol = p.tol("complementarity_tol", 1e-10);
      ctx.expect("obstacle_complementarity", out.obstacle->complementarity_residual, "< " + fmt(ctol),
                 out.obstacle->complementarity_residual < ctol);
      write_solution_csv(*out.obstacle, ctx.path("_graph.csv"));
    }
    out.run.state.region.write_csv(ctx.path("_region.csv"));
    if (!out.run.trace.empty()) write_trace_csv(out.run.trace, ctx.path("_trace.csv"));
    ctx.res.data["contact_fraction"] = out.contact_fraction;
    ctx.res.data["contact_vertices"] = out.contact_vertices;
    ctx.res.reports.push_back(out.report);
  } else {
    invalid(p.where("check"), "unknown check '" + check + "'");
  }
}

// ---------------------------------------------------------------------------
// optimize

double ball_ratio(const BackendPtr& m, double V, const Point& c) {
  return 1.0 + infimum_scan(m, V, {c}, {FanOptions{512, 256}, 1e-9, ScanExpectation::AboveOnly}).rows[0].excess;
}

void run_optimize(Context& ctx, Params& p, const BackendPtr& m) {
  const double V = p.req<double>("V");
  const Region init = region_from_spec(m, p.raw("init"));
  ShapeParams sp;
  sp.max_iterations = p.get<int>("max_iterations", sp.max_iterations);
  sp.vol_tol = p.tol("vol_tol", sp.vol_tol);
  sp.stall_rel = p.get<double>("stall_rel", sp.stall_rel);
  sp.meb.seed = ctx.seed;
  const MinimizeResult run = minimize(V, init, sp);
  const int iterations = run.trace.empty() ? 0 : run.trace.back().iteration;
  const double ratio = run.state.ratio();

  ctx.expect("monotone_descent", run.monotone ? 1.0 : 0.0, "functional never increases", run.monotone);
  ctx.expect("iterations", iterations, "<= " + std::to_string(sp.max_iterations), iterations <= sp.max_iterations);
  ctx.expect("volume", run.state.region.volume(), "within vol_tol of V",
             std::abs(run.state.region.volume() - V) <= sp.vol_tol * std::max(1.0, V) * 10);
  ctx.expect("projection_bound", run.max_projection_C1, "P(F) <= P(E) + C1 |v| at every projection",
             run.projection_bound_holds);
  if (p.has("ratio_below")) {
    const double x = p.req<double>("ratio_below");
    ctx.expect("ratio_below", ratio, "< " + fmt(x), ratio < x);
  }
  if (p.has("ball_rel_tol")) {
    const double ball = ball_ratio(m, V, p.point("ball_center", m->apex()));
    ctx.res.data["ball_ratio"] = ball;
    expect_relative(ctx, "ball_value", ratio, ball, p.tol("ball_rel_tol", 0.01));
  } else if (p.has("ball_center")) {
    invalid(p.where("ball_center"), "only meaningful with ball_rel_tol");
  }

  ctx.res.data["ratio"] = ratio;
  ctx.res.data["iterations"] = iterations;
  ctx.res.data["termination"] = to_string(run.termination);
  ctx.res.data["max_projection_C1"] = run.max_projection_C1;
  ctx.res.data["H0"] = run.state.multiplier_H0;
  write_trace_csv(run.trace, ctx.path("_trace.csv"));
  run.state.region.write_csv(ctx.path("_region.csv"));
  auto plot = ctx.artifact("_plot.csv");
  plot << "iteration,ratio\n";
  for (const auto& row : run.trace) plot << row.iteration << ',' << row.ratio << '\n';
}

// ---------------------------------------------------------------------------
// obstacle

void run_obstacle(Context& ctx, Params& p) {
  const json base = p.raw("problem");
  std::vector<int> ladder;
  if (p.has("cells"))
    ladder = p.req<std::vector<int>>("cells");
  else
    ladder.push_back(base.value("cells", 64));
  if (ladder.empty()) invalid(p.where("cells"), "empty refinement ladder");

  // Exact solution c max(|x| - a, 0)^2 for the error ladder.
  std::optional<std::pair<double, double>> exact;
  if (p.has("exact")) {
    Params e = p.sub("exact");
    exact = {e.req<double>("coefficient"), e.req<double>("radius")};
    e.finish();
  }
  std::vector<ObstacleSolution> sols;
  for (int cells : ladder) {
    json j = base;
    j["cells"] = cells;
    sols.push_back(solve_vi(ObstacleProblem::from_json(j)));
  }

  const double ctol = p.tol("complementarity_tol", 1e-10);
  double worst_compl = 0.0, ell_min = INFINITY, ell_max = 0.0;
  for (const auto& s : sols) {
    worst_compl = std::max(worst_compl, s.complementarity_residual);
    ell_min = std::min(ell_min, s.ellipticity_min);
    ell_max = std::max(ell_max, s.ellipticity_max);
  }
  ctx.expect("complementarity", worst_compl, "< " + fmt(ctol) + " at every node", worst_compl < ctol);

  if (exact) {
    const auto [c, a] = *exact;
    std::vector<double> errors;
    for (const auto& s : sols) {
      double e = 0.0;
      for (int i = 0; i < s.problem.nodes(); ++i) {
        const double r = s.problem.position(i).norm();
        e = std::max(e, std::abs(s.u[i] - c * std::pow(std::max(r - a, 0.0), 2)));
      }
      errors.push_back(e);
    }
    ctx.res.data["errors"] = errors;
    if (p.has("order_range")) {
      const auto range = p.req<std::vector<double>>("order_range");
      if (range.size() != 2) invalid(p.where("order_range"), "expected [lo, hi]");
      for (std::size_t i = 1; i < errors.size(); ++i) {
        const double q = errors[i - 1] / errors[i];
        ctx.expect("error_ratio_" + std::to_string(ladder[i - 1]) + "_" + std::to_string(ladder[i]), q,
                   "in [" + fmt(range[0]) + ", " + fmt(range[1]) + "]", q >= range[0] && q <= range[1]);
      }
    }
  }
  if (p.has("growth")) {
    Params g = p.sub("growth");
    const double target = g.req<double>("value");
    const double rel = g.tol("rel_tol", 0.05);
    g.finish();
    const QuadraticGrowth q = quadratic_growth(sols.back());
    ctx.res.data["growth_constant"] = q.constant;
    ctx.res.data["near_field_growth_constant"] = q.near_field_constant;
    expect_relative(ctx, "growth_constant", q.constant, target, rel);
  }
  if (p.has("regularity")) {
    Params r = p.sub("regularity");
    const double second = r.get<double>("second_factor", 2.0);
    const double third = r.get<double>("third_growth", 1.8);
    r.finish();
    if (sols.size() < 2) invalid(p.where("regularity"), "needs at least two refinement levels");
    const C11Report a = c11_check(sols[sols.size() - 2]), b = c11_check(sols.back());
    const double s = b.second_difference_sup / a.second_difference_sup;
    ctx.expect("second_difference_ratio", s, "within a factor " + fmt(second), s <= second && s >= 1.0 / second);
    const double t = b.third_difference_sup / a.third_difference_sup;
    ctx.expect("third_difference_growth", t, ">= " + fmt(third), t >= third);
    ctx.res.data["remainder_bound"] = b.remainder_bound;
  }
  if (p.has("ellipticity")) {
    const auto e = p.req<std::vector<double>>("ellipticity");
    if (e.size() != 2) invalid(p.where("ellipticity"), "expected [lo, hi]");
    ctx.expect("ellipticity_min", ell_min, ">= " + fmt(e[0]), ell_min >= e[0]);
    ctx.expect("ellipticity_max", ell_max, "<= " + fmt(e[1]), ell_max <= e[1]);
  }
  if (p.get<bool>("expect_contact", false)) {
    const int n = sols.back().contact_count();
    ctx.expect("contact_nodes", n, "nonempty proper contact set", n > 0 && n < sols.back().problem.nodes());
  }

  const auto& fine = sols.back();
  ctx.res.data["contact_nodes"] = fine.contact_count();
  ctx.res.data["picard_iterations"] = fine.picard_iterations;
  ctx.res.data["max_gradient"] = fine.max_gradient;
  ctx.res.data["gradient_exceeds_delta0"] = fine.gradient_exceeds_delta0;
  write_solution_csv(fine, ctx.path("_solution.csv"));
  auto plot = ctx.artifact("_plot.csv");
  plot << (fine.problem.chart.dim == 1 ? "x,u\n" : "abs_x,u\n");
  for (int i = 0; i < fine.problem.nodes(); ++i) {
    const VectorXd x = fine.problem.position(i);
    plot << (x.size() == 1 ? x[0] : x.norm()) << ',' << fine.u[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// catalog

void run_catalog(Context& ctx, Params& p) {
  const double T_min = p.get<double>("T_min", 0.2), T_max = p.get<double>("T_max", 3.0);
  const int samples = p.get<int>("samples", 57);
  const int n_theta = p.get<int>("n_theta", 1024), n_t = p.get<int>("n_t", 64);
  if (n_theta != 0 && (n_theta < 3 || n_t < 2 || n_t % 2)) invalid(p.where("n_theta"), "0, or >= 3 with even n_t >= 2");
  const double root_tol = p.tol("root_tol", 1e-10);
  const double peak_tol = p.tol("peak_tol", 1e-6);
  const double mesh_tol = p.tol("mesh_tol", 1e-5);

  const double T0 = critical_catenoid_T0();
  const double residual = std::abs(T0 - 1.0 / std::tanh(T0));
  ctx.expect("T0_residual", residual, "< " + fmt(root_tol), residual < root_tol);
  ctx.expect("rho_T0", minimal_ratio(T0), "within " + fmt(peak_tol) + " of 1",
             std::abs(minimal_ratio(T0) - 1.0) <= peak_tol);
  if (p.has("checkpoints")) {
    for (const auto& cp : p.raw("checkpoints")) {
      check_keys(cp, {"T", "rho", "abs_tol"}, p.where("checkpoints"));
      const double T = cp.at("T").get<double>(), rho = cp.at("rho").get<double>();
      const double tol = ctx.opts.tol_scale * cp.value("abs_tol", 5e-5);
      const double got = minimal_ratio(T);
      ctx.expect("rho_" + fmt(T), got, "within " + fmt(tol) + " of " + fmt(rho), std::abs(got - rho) <= tol);
    }
  }
  const auto rows = ratio_sweep(T_min, T_max, samples, n_theta, n_t);
  if (p.has("off_peak")) {
    Params o = p.sub("off_peak");
    const double window = o.get<double>("window", 0.05), drop = o.get<double>("drop", 1e-4);
    o.finish();
    double worst = -INFINITY;
    for (const auto& r : rows)
      if (std::abs(r.T - T0) > window) worst = std::max(worst, r.rho);
    ctx.expect("off_peak_max", worst, "< 1 - " + fmt(drop) + " for |T - T0| > " + fmt(window), worst < 1.0 - drop);
  }
  const PeakReport pk = peaks(rows);
  const double spacing = samples > 1 ? (T_max - T_min) / (samples - 1) : 0.0;
  ctx.expect("interior_maxima", pk.interior_maxima, "== 1", pk.interior_maxima == 1);
  ctx.expect("T_max", pk.T_max, "within one sample of T0", std::abs(pk.T_max - T0) <= spacing);
  if (n_theta > 0) {
    double disc = 0.0;
    for (const auto& r : rows) disc = std::max(disc, r.discrepancy);
    ctx.expect("mesh_discrepancy", disc, "< " + fmt(mesh_tol), disc < mesh_tol);
  }
  if (p.get<bool>("dominance", false)) {
    const auto d = intrinsic_dominance(T0);
    ctx.expect("intrinsic_dominates", d.intrinsic - d.ambient, ">= 0", d.holds);
  }
  ctx.res.data["T0"] = T0;
  ctx.res.data["rho_max"] = pk.rho_max;
  write_sweep_csv(rows, ctx.path("_sweep.csv"));
  auto plot = ctx.artifact("_plot.csv");
  plot << "T,rho\n";
  for (const auto& r : rows) plot << r.T << ',' << r.rho << '\n';
}

// ---------------------------------------------------------------------------
// scan

void run_scan(Context& ctx, Params& p, const BackendPtr& m) {
  const double V = p.req<double>("V");
  std::vector<Point> centers;
  if (p.has("distances")) {
    for (double d : p.req<std::vector<double>>("distances")) centers.push_back(m->apex() + Vec2(d, 0.0));
  } else {
    for (const auto& c : p.req<std::vector<std::vector<double>>>("centers")) {
      if (c.size() != 2) invalid(p.where("centers"), "expected [x, y] entries");
      centers.emplace_back(c[0], c[1]);
    }
  }
  ScanOptions so;
  if (p.has("fan")) {
    Params f = p.sub("fan");
    so.fan.rays = f.get<int>("rays", so.fan.rays);
    so.fan.steps = f.get<int>("steps", so.fan.steps);
    f.finish();
  }
  so.constant_tol = p.tol("constant_tol", so.constant_tol);
  if (p.has("expectation")) {
    const std::string e = p.req<std::string>("expectation");
    bool found = false;
    for (auto x : {ScanExpectation::Decreasing, ScanExpectation::ApexMinimum, ScanExpectation::Constant,
                   ScanExpectation::AboveOnly})
      if (to_string(x) == e) {
        so.expectation = x;
        found = true;
      }
    if (!found) invalid(p.where("expectation"), "unknown expectation '" + e + "'");
  }
  const ScanReport rep = infimum_scan(m, V, centers, so);
  switch (rep.expectation) {
    case ScanExpectation::Decreasing:
      ctx.expect("strictly_decreasing", rep.strictly_decreasing, "f(d) strictly decreasing", rep.strictly_decreasing);
      ctx.expect("above_2V", rep.all_above, "f(d) > 2V at every centre", rep.all_above);
      break;
    case ScanExpectation::ApexMinimum:
      ctx.expect("apex_beats_far", rep.rows.front().excess, "apex ball below every far ball", rep.apex_beats_far);
      break;
    case ScanExpectation::Constant:
      ctx.expect("constant", rep.max_abs_excess, "|f/(2V) - 1| <= " + fmt(so.constant_tol),
                 rep.max_abs_excess <= so.constant_tol);
      break;
    case ScanExpectation::AboveOnly:
      ctx.expect("above_2V", rep.all_above, "f(d) > 2V at every centre", rep.all_above);
      break;
  }
  if (p.has("max_gap")) {
    const double g = p.tol("max_gap", 0.02);
    ctx.expect("final_gap", rep.final_gap, "< " + fmt(g), rep.final_gap < g);
  }
  ctx.res.data["scan"] = rep.to_json();
  write_scan_csv(rep, ctx.path("_plot.csv"));
}

}  // namespace

// ---------------------------------------------------------------------------

Region region_from_spec(const BackendPtr& m, const json& spec, int n_override) {
  Params p(spec, "params.region", 1.0);
  const std::string shape = p.req<std::string>("shape");
  const Point c = p.point("center", m->apex());
  auto count = [&] {
    const int n = n_override > 0 ? n_override : p.req<int>("n");
    if (n_override > 0) p.get<int>("n", 0);
    if (n < 3) invalid(p.where("n"), "need at least 3 vertices");
    return n;
  };
  std::optional<Region> r;
  if (shape == "regular_polygon") {
    r = regular_polygon(m, c, p.req<double>("radius"), count());
  } else if (shape == "ellipse") {
    const double a = p.req<double>("a"), b = p.req<double>("b");
    const double angle = p.get<double>("angle", 0.0);
    r = chart_ellipse(m, c, a, b, count(), angle);
  } else if (shape == "metric_circle") {
    r = metric_circle(m, c, p.req<double>("r"), count());
  } else if (shape == "polygon") {
    std::vector<Point> v;
    for (const auto& q : p.req<std::vector<std::vector<double>>>("vertices")) {
      if (q.size() != 2) invalid(p.where("vertices"), "expected [x, y] entries");
      v.emplace_back(q[0], q[1]);
    }
    r = Region(m, std::move(v));
  } else {
    invalid(p.where("shape"), "unknown shape '" + shape + "'");
  }
  p.finish();
  return *r;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) invalid("config", "expected an object");
  check_keys(j, {"id", "kind", "reference", "backend", "seed", "params"}, "");
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    c.id = j.at("id").get<std::string>();
  } catch (const json::exception&) {
    invalid("id", "missing or not a string");
  }
  if (c.id.empty() || c.id.find_first_of("/\\") != std::string::npos) invalid("id", "must be a plain file stem");
  try {
    c.kind = j.at("kind").get<std::string>();
  } catch (const json::exception&) {
    invalid("kind", "missing or not a string");
  }
  static const std::set<std::string> kinds{"verify", "optimize", "obstacle", "catalog", "scan"};
  if (!kinds.count(c.kind)) invalid("kind", "unknown kind '" + c.kind + "'");
  if (j.contains("reference")) {
    if (!j["reference"].is_string()) invalid("reference", "expected a string");
    c.reference = j["reference"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) invalid("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) invalid("params", "expected an object");
    c.params = j["params"];
  }
  const bool needs_backend = c.kind == "verify" || c.kind == "optimize" || c.kind == "scan";
  if (j.contains("backend")) {
    if (!j["backend"].is_object()) invalid("backend", "expected an object");
    c.backend = j["backend"];
  } else if (needs_backend) {
    invalid("backend", "missing");
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) invalid(path.string(), "cannot read");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    invalid(path.string(), std::string("malformed JSON: ") + e.what());
  }
  return from_json(j, path.parent_path());
}

json ExperimentResult::to_json() const {
  json a = json::array();
  for (const auto& x : assertions)
    a.push_back({{"name", x.name}, {"value", x.value}, {"requirement", x.requirement}, {"pass", x.pass}});
  json r = json::array();
  for (const auto& rep : reports) r.push_back(rep.to_json());
  return {{"id", id},   {"kind", kind}, {"reference", reference}, {"seed", seed},          {"pass", pass},
          {"assertions", a}, {"reports", r}, {"data", data},       {"artifacts", artifacts}};
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentResult res;
  res.id = cfg.id;
  res.kind = cfg.kind;
  res.reference = cfg.reference;
  res.seed = opts.seed.value_or(cfg.seed);
  if (!(opts.tol_scale > 0.0)) invalid("tol-scale", "must be positive");
  fs::create_directories(opts.out);
  Context ctx{cfg, opts, res.seed, res};
  Params p(cfg.params, "params", opts.tol_scale);

  BackendPtr m;
  if (!cfg.backend.is_null()) {
    try {
      m = make_backend(cfg.backend, cfg.base_dir.string());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigInvalid) throw;
      invalid("backend", e.what());
    }
  }
  try {
    if (cfg.kind == "verify")
      run_verify(ctx, p, m);
    else if (cfg.kind == "optimize")
      run_optimize(ctx, p, m);
    else if (cfg.kind == "obstacle")
      run_obstacle(ctx, p);
    else if (cfg.kind == "catalog")
      run_catalog(ctx, p);
    else
      run_scan(ctx, p, m);
  } catch (const json::exception& e) {
    invalid("params", e.what());
  }
  p.finish();

  res.pass = !res.assertions.empty() &&
             std::all_of(res.assertions.begin(), res.assertions.end(), [](const Assertion& a) { return a.pass; });
  res.artifacts.push_back(cfg.id + ".json");
  std::ofstream out(opts.out / (cfg.id + ".json"));
  out << std::setprecision(17) << res.to_json().dump(2) << '\n';
  return res;
}

std::vector<SuiteEntry> run_suite(const fs::path& dir, const std::string& filter, const RunOptions& opts, int jobs) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<SuiteEntry> entries;
  std::vector<std::optional<ExperimentConfig>> configs;
  for (const auto& f : files) {
    SuiteEntry e;
    e.config = f;
    std::optional<ExperimentConfig> cfg;
    try {
      cfg = ExperimentConfig::load(f);
      e.id = cfg->id;
      e.kind = cfg->kind;
      e.reference = cfg->reference;
    } catch (const Error& err) {
      e.id = f.stem().string();
      e.exit_code = 2;
      e.error = err.what();
    }
    const bool match = filter.empty() || f.filename().string().find(filter) != std::string::npos ||
                       e.id.find(filter) != std::string::npos || e.kind.find(filter) != std::string::npos;
    if (!match) continue;
    entries.push_back(e);
    configs.push_back(cfg);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      if (!configs[i]) continue;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        entries[i].pass = run_experiment(*configs[i], opts).pass;
        entries[i].exit_code = entries[i].pass ? 0 : 1;
      } catch (const Error& err) {
        entries[i].exit_code = err.code() == ErrorCode::ConfigInvalid ? 2 : 1;
        entries[i].error = err.what();
      } catch (const std::exception& err) {
        entries[i].exit_code = 1;
        entries[i].error = err.what();
      }
      entries[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(jobs, int(entries.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return entries;
}

void write_summary_csv(const std::vector<SuiteEntry>& entries, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << "id,kind,reference,pass,exit_code\n";
  for (const auto& e : entries) {
    std::string ref = e.reference;
    std::replace(ref.begin(), ref.end(), '"', '\'');
    out << e.id << ',' << e.kind << ",\"" << ref << "\"," << (e.pass ? "true" : "false") << ',' << e.exit_code << '\n';
  }
}

}  // namespace isodiam
