// Acceptance run: one PASS/FAIL line per criterion. Criteria 1-7 and 9 drive
// the experiment runner as a subprocess; criterion 8 runs in process.
#include "isodiam/meb.hpp"
#include "isodiam/region.hpp"
#include "isodiam/shapeopt.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isodiam;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Ctx {
  fs::path configs, cli, work;
};

struct Run {
  int exit_code = -1;
  double seconds = 0.0;
  json result;
};

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Run run_config(const Ctx& c, const std::string& id) {
  Run r;
  const fs::path out = c.work / "single";
  fs::create_directories(out);
  const auto t0 = Clock::now();
  r.exit_code = shell(quote(c.cli) + " --config " + quote(c.configs / (id + ".json")) + " --out " + quote(out) +
                      " > " + quote(out / (id + ".log")) + " 2>&1");
  r.seconds = since(t0);
  std::ifstream in(out / (id + ".json"));
  if (in) r.result = json::parse(in, nullptr, false);
  return r;
}

double assertion(const json& result, const std::string& name) {
  if (result.is_object() && result.contains("assertions"))
    for (const auto& a : result["assertions"])
      if (a.value("name", "") == name) return a.value("value", NAN);
  return NAN;
}

std::vector<double> report_ratios(const json& result) {
  std::vector<double> out;
  if (result.is_object() && result.contains("reports"))
    for (const auto& r : result["reports"]) out.push_back(r.value("ratio", NAN));
  return out;
}

struct Line {
  bool pass = true;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "" : "!") + what);
  }
};

bool within_rel(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

void report(int id, const std::string& title, Line line, double seconds, double budget) {
  line.check(seconds < budget, "time " + fmt(seconds) + " s < " + fmt(budget) + " s");
  std::cout << "criterion " << id << ": " << (line.pass ? "PASS" : "FAIL") << "  " << title << "  [";
  for (std::size_t i = 0; i < line.notes.size(); ++i) std::cout << (i ? "; " : "") << line.notes[i];
  std::cout << "]" << std::endl;
}

bool criterion1(const Ctx& c) {
  Line l;
  const auto disk = run_config(c, "verify-euclidean-disk");
  const auto ellipse = run_config(c, "verify-euclidean-ellipse");
  l.check(disk.exit_code == 0 && ellipse.exit_code == 0, "runs succeed");
  const auto rd = report_ratios(disk.result), re = report_ratios(ellipse.result);
  const double d = rd.empty() ? NAN : rd.back(), e = re.empty() ? NAN : re.back();
  l.check(d >= 0.999 && d <= 1.001, "disk ratio " + fmt(d) + " in [0.999, 1.001]");
  l.check(e > 1.25, "3:1 ellipse ratio " + fmt(e) + " > 1.25");
  report(1, "Euclidean disk equality, ellipse strict", l, disk.seconds + ellipse.seconds, 1.0);
  return l.pass;
}

bool criterion2(const Ctx& c) {
  Line l;
  const auto ball = run_config(c, "verify-hyperbolic-ball");
  const auto rnd = run_config(c, "verify-hyperbolic-random");
  l.check(ball.exit_code == 0 && rnd.exit_code == 0, "runs succeed");
  const auto rb = report_ratios(ball.result);
  const double b = rb.empty() ? NAN : rb.back();
  l.check(within_rel(b, 1.08206, 5e-3), "r=1 ball ratio " + fmt(b) + " within 0.5% of 1.08206");
  const auto rr = report_ratios(rnd.result);
  double lo = rr.empty() ? NAN : *std::min_element(rr.begin(), rr.end());
  l.check(rr.size() == 50, std::to_string(rr.size()) + " random regions");
  l.check(lo >= 1.0 - 1e-6, "min random ratio " + fmt(lo) + " >= 1 - 1e-6");
  report(2, "hyperbolic plane", l, ball.seconds + rnd.seconds, 30.0);
  return l.pass;
}

bool criterion3(const Ctx& c) {
  Line l;
  const auto sphere = run_config(c, "verify-sphere-ball");
  const auto apex = run_config(c, "verify-warped-positive-apex");
  const auto flat = run_config(c, "verify-warped-flat");
  l.check(sphere.exit_code == 0 && apex.exit_code == 0 && flat.exit_code == 0, "runs succeed");
  const auto rs = report_ratios(sphere.result);
  const double s = rs.empty() ? NAN : rs.front();
  l.check(within_rel(s, 0.91528, 5e-3), "sphere r=1 ratio " + fmt(s) + " within 0.5% of 0.91528");
  const auto ra = report_ratios(apex.result);
  const double amax = ra.empty() ? NAN : *std::max_element(ra.begin(), ra.end());
  l.check(ra.size() == 4 && amax <= 1.0, "a=0.5 apex balls max ratio " + fmt(amax) + " <= 1");
  const auto rf = report_ratios(flat.result);
  double dev = rf.empty() ? NAN : 0.0;
  for (double r : rf) dev = std::max(dev, std::abs(r - 1.0));
  l.check(dev <= 1e-9, "a=1 |ratio - 1| = " + fmt(dev) + " <= 1e-9");
  report(3, "nonnegative curvature comparison", l, sphere.seconds + apex.seconds + flat.seconds, 30.0);
  return l.pass;
}

bool criterion4(const Ctx& c) {
  Line l;
  const auto eu = run_config(c, "optimize-euclidean-ellipse");
  const auto hy = run_config(c, "optimize-hyperbolic-ellipse");
  l.check(eu.exit_code == 0 && hy.exit_code == 0, "runs succeed");
  const double ratio = eu.result.is_object() ? eu.result["data"].value("ratio", NAN) : NAN;
  const double iters = eu.result.is_object() ? eu.result["data"].value("iterations", NAN) : NAN;
  l.check(ratio < 1.01, "Euclidean final ratio " + fmt(ratio) + " < 1.01");
  l.check(iters <= 2000, "iterations " + fmt(iters) + " <= 2000");
  l.check(assertion(eu.result, "monotone_descent") == 1.0 && assertion(hy.result, "monotone_descent") == 1.0,
          "monotone descent");
  double hr = NAN, hb = NAN;
  if (hy.result.is_object()) {
    hr = hy.result["data"].value("ratio", NAN);
    hb = hy.result["data"].value("ball_ratio", NAN);
  }
  l.check(within_rel(hr, hb, 1e-2), "hyperbolic final ratio " + fmt(hr) + " within 1% of ball " + fmt(hb));
  report(4, "shape optimisation", l, eu.seconds + hy.seconds, 120.0);
  return l.pass;
}

bool criterion5(const Ctx& c) {
  Line l;
  const auto r = run_config(c, "catalog-critical-catenoid");
  l.check(r.exit_code == 0, "run succeeds");
  const double res = assertion(r.result, "T0_residual");
  const double rho0 = assertion(r.result, "rho_T0");
  const double rho08 = assertion(r.result, "rho_0.8");
  const double off = assertion(r.result, "off_peak_max");
  l.check(res < 1e-10, "T0 residual " + fmt(res) + " < 1e-10");
  l.check(std::abs(rho0 - 1.0) <= 1e-6, "rho(T0) = " + fmt(rho0));
  l.check(std::abs(rho08 - 0.9537) <= 5e-5, "rho(0.8) = " + fmt(rho08) + " ~ 0.9537");
  l.check(off < 1.0 - 1e-4, "max rho off |T - T0| > 0.05 is " + fmt(off) + " < 1 - 1e-4");
  report(5, "critical catenoid", l, r.seconds, 1.0);
  return l.pass;
}

bool criterion6(const Ctx& c) {
  Line l;
  const auto one = run_config(c, "obstacle-closed-form-1d");
  const auto two = run_config(c, "obstacle-cap-2d");
  l.check(one.exit_code == 0 && two.exit_code == 0, "runs succeed");
  const double r1 = assertion(one.result, "error_ratio_64_128"), r2 = assertion(one.result, "error_ratio_128_256");
  l.check(r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5, "order ratios " + fmt(r1) + ", " + fmt(r2));
  const double comp = std::max(assertion(one.result, "complementarity"), assertion(two.result, "complementarity"));
  l.check(comp < 1e-10, "complementarity " + fmt(comp) + " < 1e-10");
  const double cq = assertion(one.result, "growth_constant");
  l.check(within_rel(cq, 0.5, 0.05), "C_q " + fmt(cq) + " within 5% of 0.5");
  const double sd = assertion(one.result, "second_difference_ratio");
  l.check(sd >= 0.5 && sd <= 2.0, "second differences ratio " + fmt(sd) + " within factor 2");
  const double td = assertion(one.result, "third_difference_growth");
  l.check(td >= 1.8, "third differences growth " + fmt(td) + " >= 1.8");
  const double emin = assertion(two.result, "ellipticity_min"), emax = assertion(two.result, "ellipticity_max");
  l.check(emin >= 0.5 && emax <= 2.0, "2D ellipticity in [" + fmt(emin) + ", " + fmt(emax) + "]");
  report(6, "obstacle problem", l, one.seconds + two.seconds, 120.0);
  return l.pass;
}

bool criterion7(const Ctx& c) {
  Line l;
  const auto neg = run_config(c, "scan-warped-negative");
  const auto pos = run_config(c, "scan-warped-positive");
  const auto hel = run_config(c, "scan-helicoid");
  l.check(neg.exit_code == 0 && pos.exit_code == 0 && hel.exit_code == 0, "runs succeed");
  auto scan = [](const Run& r) { return r.result.is_object() ? r.result["data"].value("scan", json::object()) : json(); };
  const json sn = scan(neg), sp = scan(pos), sh = scan(hel);
  l.check(sn.value("strictly_decreasing", false) && sn.value("all_above", false), "a=1.5 decreasing and above 2V");
  double last_d = NAN, gap = NAN;
  if (sn.contains("rows") && !sn["rows"].empty()) {
    last_d = sn["rows"].back().value("d", NAN);
    gap = sn.value("final_gap", NAN);
  }
  l.check(last_d >= 16.0 && gap < 0.02, "a=1.5 gap " + fmt(gap) + " < 2% at d=" + fmt(last_d));
  l.check(sp.value("apex_beats_far", false), "a=0.5 apex ball wins");
  double hmax = NAN;
  if (sh.contains("rows") && !sh["rows"].empty()) hmax = sh["rows"].back().value("d", NAN);
  l.check(sh.value("all_above", false) && hmax <= 12.0, "helicoid above 2V up to d=" + fmt(hmax));
  report(7, "infimum scans", l, neg.seconds + pos.seconds + hel.seconds, 300.0);
  return l.pass;
}

// Smallest enclosing ball by exhaustive search over balls through 2, 3 (and 4) points.
template <class P>
double brute_radius(const std::vector<P>& pts);

bool contains_all(const std::vector<Point>& pts, const Point& c, double r) {
  for (const auto& p : pts)
    if ((p - c).norm() > r * (1.0 + 1e-12) + 1e-14) return false;
  return true;
}

bool contains_all(const std::vector<Point3>& pts, const Point3& c, double r) {
  for (const auto& p : pts)
    if ((p - c).norm() > r * (1.0 + 1e-12) + 1e-14) return false;
  return true;
}

template <>
double brute_radius(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  double best = INFINITY;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = 0.5 * (pts[i] + pts[j]);
      const double r = 0.5 * (pts[i] - pts[j]).norm();
      if (r < best && contains_all(pts, c, r)) best = r;
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point a = pts[j] - pts[i], b = pts[k] - pts[i];
        const double d = 2.0 * (a.x() * b.y() - a.y() * b.x());
        if (std::abs(d) < 1e-14) continue;
        const Point u((b.y() * a.squaredNorm() - a.y() * b.squaredNorm()) / d,
                      (a.x() * b.squaredNorm() - b.x() * a.squaredNorm()) / d);
        const double rr = u.norm();
        if (rr < best && contains_all(pts, pts[i] + u, rr)) best = rr;
      }
    }
  return best;
}

template <>
double brute_radius(const std::vector<Point3>& pts) {
  const std::size_t n = pts.size();
  double best = INFINITY;
  auto consider = [&](const Point3& c, double r) {
    if (r < best && contains_all(pts, c, r)) best = r;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      consider(0.5 * (pts[i] + pts[j]), 0.5 * (pts[i] - pts[j]).norm());
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point3 a = pts[j] - pts[i], b = pts[k] - pts[i];
        const Point3 axb = a.cross(b);
        const double den = 2.0 * axb.squaredNorm();
        if (den < 1e-14) continue;
        const Point3 u = (a.squaredNorm() * b.cross(axb) + b.squaredNorm() * axb.cross(a)) / den;
        consider(pts[i] + u, u.norm());
        for (std::size_t m = k + 1; m < n; ++m) {
          Eigen::Matrix3d A;
          A.row(0) = a.transpose();
          A.row(1) = b.transpose();
          A.row(2) = (pts[m] - pts[i]).transpose();
          if (std::abs(A.determinant()) < 1e-12) continue;
          const Eigen::Vector3d rhs(0.5 * a.squaredNorm(), 0.5 * b.squaredNorm(), 0.5 * A.row(2).squaredNorm());
          const Point3 v = A.partialPivLu().solve(rhs);
          consider(pts[i] + v, v.norm());
        }
      }
    }
  return best;
}

struct WelzlStats {
  int instances = 0;
  double max_err = 0.0;
};

WelzlStats welzl_vs_brute() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  WelzlStats st;
  for (int t = 0; t < 150; ++t) {
    const int n = 16 + static_cast<int>(rng() % 40);
    std::vector<Point> pts(n);
    for (auto& p : pts) p = t % 2 ? Point(u(rng), u(rng)) : Point(g(rng), 0.3 * g(rng));
    const double e = std::abs(welzl(pts, t).radius - brute_radius(pts));
    st.max_err = std::max(st.max_err, e);
    ++st.instances;
  }
  for (int t = 0; t < 50; ++t) {
    const int n = 16 + static_cast<int>(rng() % 12);
    std::vector<Point3> pts(n);
    for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
    const double e = std::abs(welzl(pts, t).radius - brute_radius(pts));
    st.max_err = std::max(st.max_err, e);
    ++st.instances;
  }
  return st;
}

// Central differences of a region functional against its covector gradient
// along random per-vertex displacements.
double fd_rel_error(const Region& base, const std::function<double(const Region&)>& f,
                    const std::vector<Vec2>& grad, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec2> X(base.size());
  for (auto& x : X) x = Vec2(g(rng), g(rng));
  const double h = 1e-6;
  auto shifted = [&](double s) {
    std::vector<Point> v = base.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * X[i];
    return Region(base.backend_ptr(), v);
  };
  const double fd = (f(shifted(h)) - f(shifted(-h))) / (2.0 * h);
  double an = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) an += grad[i].dot(X[i]);
  return std::abs(fd - an) / std::max(std::abs(an), 1e-12);
}

struct GradientStats {
  double perimeter = 0.0, volume = 0.0, radius = 0.0;
};

GradientStats gradient_checks() {
  GradientStats st;
  const std::vector<std::pair<json, Point>> cases = {
      {{{"kind", "euclidean"}}, Point(0.1, -0.2)},     {{{"kind", "hyperbolic"}, {"K", -1.0}}, Point(0.1, 0.05)},
      {{{"kind", "sphere"}, {"K", 1.0}}, Point(0.2, 0.1)}, {{{"kind", "warped"}, {"a", 1.5}}, Point(0.4, 0.3)},
      {{{"kind", "warped"}, {"a", 0.5}}, Point(0.4, 0.3)}, {{{"kind", "helicoid"}}, Point(0.3, 0.2)},
      {{{"kind", "catenoid"}}, Point(0.3, 0.2)}};
  std::uint64_t seed = 1;
  for (const auto& [desc, c] : cases) {
    const BackendPtr m = make_backend(desc);
    const Region r = chart_ellipse(m, c, 0.5, 0.3, 96, 0.3);
    st.perimeter = std::max(st.perimeter, fd_rel_error(r, [](const Region& q) { return q.perimeter(); },
                                                       r.perimeter_gradient(), seed++));
    st.volume = std::max(st.volume, fd_rel_error(r, [](const Region& q) { return q.volume(); },
                                                 r.volume_gradient(), seed++));
  }
  // Radius at a diameter pair: both ends of the major axis pushed outward.
  for (const json& desc : {json{{"kind", "euclidean"}}, json{{"kind", "hyperbolic"}, {"K", -1.0}},
                           json{{"kind", "sphere"}, {"K", 1.0}}}) {
    const BackendPtr m = make_backend(desc);
    const int n = 128;
    const Region r = chart_ellipse(m, Point::Zero(), 0.6, 0.3, n);
    const ShapeState s = make_state(r, r.volume());
    const auto gR = radius_subgradient(s);
    std::vector<Vec2> X(n, Vec2::Zero());
    X[0] = Vec2(1.0, 0.0);
    X[n / 2] = Vec2(-1.0, 0.0);
    const double h = 1e-6;
    auto radius_at = [&](double t) {
      std::vector<Point> v = r.vertices();
      for (int i = 0; i < n; ++i) v[i] += t * X[i];
      return rad(Region(m, v)).ball.radius;
    };
    const double fd = (radius_at(h) - radius_at(-h)) / (2.0 * h);
    double an = 0.0;
    for (int i = 0; i < n; ++i) an += gR[i].dot(X[i]);
    st.radius = std::max(st.radius, std::abs(fd - an) / std::abs(an));
  }
  return st;
}

struct ProjectionStats {
  int cases = 0;
  bool holds = true;
  double measured_C1 = 0.0;  // max perimeter change per unit volume deficit
  double declared_C1 = 0.0;
};

ProjectionStats projection_checks() {
  ProjectionStats st;
  for (const json& desc : {json{{"kind", "euclidean"}}, json{{"kind", "hyperbolic"}, {"K", -1.0}},
                           json{{"kind", "sphere"}, {"K", 1.0}}}) {
    const BackendPtr m = make_backend(desc);
    for (double shift : {-0.05, -0.01, 0.01, 0.05}) {
      const Region r = chart_ellipse(m, Point(0.05, 0.02), 0.6, 0.35, 128, 0.2);
      ShapeState s = make_state(r, r.volume() * (1.0 + shift));
      const double P0 = s.region.perimeter();
      const ProjectionReport pr = project_volume(s);
      const double dP = s.region.perimeter() - P0;
      st.measured_C1 = std::max(st.measured_C1, dP / std::abs(pr.deficit));
      st.declared_C1 = std::max(st.declared_C1, pr.C1);
      st.holds = st.holds && pr.bound_holds && dP <= pr.C1 * std::abs(pr.deficit);
      ++st.cases;
    }
  }
  return st;
}

bool criterion8() {
  Line l;
  const auto t0 = Clock::now();
  try {
    const WelzlStats w = welzl_vs_brute();
    l.check(w.instances == 200 && w.max_err <= 1e-10,
            "Welzl vs brute force on " + std::to_string(w.instances) + " instances, max error " + fmt(w.max_err));
    const GradientStats g = gradient_checks();
    l.check(g.perimeter < 1e-4 && g.volume < 1e-4 && g.radius < 1e-4,
            "FD gradients rel error P " + fmt(g.perimeter) + ", V " + fmt(g.volume) + ", rad " + fmt(g.radius));
    const ProjectionStats p = projection_checks();
    l.check(p.holds, "projection P(F) <= P(E) + C1|v| on " + std::to_string(p.cases) + " cases, measured C1 " +
                         fmt(p.measured_C1) + " (declared up to " + fmt(p.declared_C1) + ")");
  } catch (const std::exception& e) {
    l.check(false, std::string("exception: ") + e.what());
  }
  report(8, "oracle checks", l, since(t0), 60.0);
  return l.pass;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::directory_iterator(a)) fa.push_back(e.path().filename());
  for (const auto& e : fs::directory_iterator(b)) fb.push_back(e.path().filename());
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) {
    why = "file lists differ";
    return false;
  }
  for (const auto& f : fa) {
    std::ifstream x(a / f, std::ios::binary), y(b / f, std::ios::binary);
    const std::string sx((std::istreambuf_iterator<char>(x)), {}), sy((std::istreambuf_iterator<char>(y)), {});
    if (sx != sy) {
      why = f.string() + " differs";
      return false;
    }
  }
  return true;
}

bool criterion9(const Ctx& c) {
  Line l;
  double worst = 0.0;
  std::vector<fs::path> outs;
  for (const char* name : {"suite-a", "suite-b"}) {
    const fs::path out = c.work / name;
    fs::remove_all(out);
    const auto t0 = Clock::now();
    const int code = shell(quote(c.cli) + " --suite --configs " + quote(c.configs) + " --out " + quote(out) + " > " +
                           quote(c.work / (std::string(name) + ".log")) + " 2>&1");
    worst = std::max(worst, since(t0));
    l.check(code == 0, std::string(name) + " exit " + std::to_string(code));
    outs.push_back(out);
  }
  std::string why;
  const bool same = same_tree(outs[0], outs[1], why);
  l.check(same, same ? "outputs byte-identical across reruns" : why);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(c.configs)) n += e.path().extension() == ".json";
  l.check(n > 0, std::to_string(n) + " experiments");
  report(9, "full suite deterministic", l, worst, 600.0);
  return l.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  Ctx c;
  std::string configs = "configs", cli, work;
  app.add_option("--configs", configs, "directory of experiment configs")->check(CLI::ExistingDirectory);
  app.add_option("--cli", cli, "experiment runner executable")->required()->check(CLI::ExistingFile);
  app.add_option("--work", work, "scratch directory");
  std::vector<int> only;
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);
  c.configs = fs::absolute(configs);
  c.cli = fs::absolute(cli);
  c.work = work.empty() ? fs::temp_directory_path() / "isodiam-acceptance" : fs::path(work);
  fs::remove_all(c.work);
  fs::create_directories(c.work);

  const std::vector<std::function<bool()>> criteria = {
      [&] { return criterion1(c); }, [&] { return criterion2(c); }, [&] { return criterion3(c); },
      [&] { return criterion4(c); }, [&] { return criterion5(c); }, [&] { return criterion6(c); },
      [&] { return criterion7(c); }, [&] { return criterion8(); },  [&] { return criterion9(c); }};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (only.empty() || std::find(only.begin(), only.end(), static_cast<int>(i + 1)) != only.end())
      failed += !criteria[i]();
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria pass") << std::endl;
  return failed ? 1 : 0;
}
