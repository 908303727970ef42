#include <doctest.h>

#include "isodiam/meb.hpp"
#include "isodiam/region.hpp"

#include <cmath>
#include <random>

using namespace isodiam;

namespace {

// Independent oracle: every circle through 2 or 3 of the points, smallest that covers all.
double brute_radius_2d(const std::vector<Point>& p) {
  double best = 1e300;
  auto covers = [&](const Point& c, double r) {
    for (const auto& q : p)
      if ((q - c).norm() > r * (1 + 1e-12) + 1e-15) return false;
    return true;
  };
  const std::size_t n = p.size();
  if (n == 1) return 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = 0.5 * (p[i] + p[j]);
      const double r = 0.5 * (p[i] - p[j]).norm();
      if (r < best && covers(c, r)) best = r;
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point a = p[i], b = p[j], e = p[k];
        const double d = 2 * (a.x() * (b.y() - e.y()) + b.x() * (e.y() - a.y()) + e.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-14) continue;
        const double ux = (a.squaredNorm() * (b.y() - e.y()) + b.squaredNorm() * (e.y() - a.y()) +
                           e.squaredNorm() * (a.y() - b.y())) / d;
        const double uy = (a.squaredNorm() * (e.x() - b.x()) + b.squaredNorm() * (a.x() - e.x()) +
                           e.squaredNorm() * (b.x() - a.x())) / d;
        const Point cc(ux, uy);
        const double rr = (a - cc).norm();
        if (rr < best && covers(cc, rr)) best = rr;
      }
    }
  return best;
}

}  // namespace

TEST_CASE("welzl examples") {
  auto b = welzl(std::vector<Point>{{0, 0}, {2, 0}});
  CHECK(b.radius == doctest::Approx(1.0));
  CHECK(b.center2().isApprox(Point(1, 0)));
  b = welzl(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(b.radius == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(b.center2().isApprox(Point(0.5, 0.5)));
  CHECK(b.attainment.size() == 4);

  std::vector<Point> pts;
  for (int i = 0; i < 40; ++i) pts.emplace_back(3 + 2 * std::cos(0.37 * i * i), -1 + 2 * std::sin(0.37 * i * i));
  for (int i = 0; i < 40; ++i) pts.emplace_back(3 + 0.5 * std::cos(i), -1 + 0.3 * std::sin(i));
  b = welzl(pts);
  CHECK(b.radius == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((b.center2() - Point(3, -1)).norm() < 1e-12);
}

TEST_CASE("welzl agrees with brute force on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> count(1, 24);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point> p(count(rng));
    for (auto& q : p) q = Point(u(rng), u(rng));
    CHECK(std::abs(welzl(p, t).radius - brute_radius_2d(p)) <= 1e-10);
  }
}

TEST_CASE("welzl in three dimensions, monotonicity and determinism") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<Point3> cloud;
  for (int i = 0; i < 300; ++i) cloud.push_back(Point3(g(rng), g(rng), g(rng)).normalized() * 2.0 + Point3(1, 2, 3));
  const auto b = welzl(cloud, 1);
  CHECK(b.radius == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(b.radius <= 2.0 + 1e-12);
  for (const auto& p : cloud) CHECK((p - b.center).norm() <= b.radius + 1e-9);

  // Truncated catenoid boundary circles: ambient radius sqrt(cosh^2 T + T^2).
  const double T = 0.8;
  std::vector<Point3> rims;
  for (int i = 0; i < 256; ++i) {
    const double th = 2 * M_PI * i / 256;
    for (double z : {-T, T}) rims.emplace_back(std::cosh(T) * std::cos(th), std::cosh(T) * std::sin(th), z);
  }
  const auto cb = welzl(rims, 3);
  CHECK(cb.radius == doctest::Approx(std::hypot(std::cosh(T), T)).epsilon(1e-12));
  CHECK(cb.center.norm() < 1e-12);

  std::vector<Point> pts;
  std::uniform_real_distribution<double> u(-1, 1);
  double prev = 0;
  for (int i = 0; i < 60; ++i) {
    pts.emplace_back(u(rng), u(rng));
    const double r = welzl(pts, 5).radius;
    CHECK(r >= prev - 1e-15);
    prev = r;
  }
  const auto a1 = welzl(pts, 42), a2 = welzl(pts, 42);
  CHECK(a1.radius == a2.radius);
  CHECK(a1.center == a2.center);
  CHECK(a1.attainment == a2.attainment);
}

TEST_CASE("geodesic one-centre") {
  HyperbolicPlane h(-1.0);
  auto single = geodesic_one_center({Point(0.2, 0.1)}, h);
  CHECK(single.radius == 0.0);
  CHECK(single.center2() == Point(0.2, 0.1));

  SphereSurface s(1.0);
  const double a = 0.6;
  auto pair = geodesic_one_center({Point(a, 0), Point(-a, 0)}, s);
  CHECK(pair.center2().norm() < 1e-9);
  CHECK(pair.radius == doctest::Approx(a).epsilon(1e-12));

  auto hp = std::make_shared<HyperbolicPlane>(-1.0);
  const Point c0(0.25, -0.3);
  Region ball = metric_circle(hp, c0, 1.0, 64);
  auto b = geodesic_one_center(ball.vertices(), *hp);
  CHECK(h.distance(b.center2(), c0) < 1e-4);
  CHECK(std::abs(b.radius - 1.0) < 1e-4);

  // Bounds: at least half the diameter, at most the eccentricity of any input.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Point> pts(30);
  for (auto& p : pts) p = Point(u(rng), u(rng));
  auto r = geodesic_one_center(pts, h);
  double diam = 0, ecc0 = 0;
  for (auto& p : pts) {
    ecc0 = std::max(ecc0, h.distance(pts[0], p));
    for (auto& q : pts) diam = std::max(diam, h.distance(p, q));
  }
  CHECK(r.radius >= 0.5 * diam - 1e-12);
  CHECK(r.radius <= ecc0 + 1e-12);
  for (auto& p : pts) CHECK(h.distance(r.center2(), p) <= r.radius + 1e-9);
  CHECK(r.attainment.size() >= 2);
  const auto again = geodesic_one_center(pts, h);
  CHECK(again.radius == r.radius);
}

TEST_CASE("rad dispatch") {
  auto e = std::make_shared<EuclideanPlane>();
  Region p = regular_polygon(e, {0, 0}, 1.0, 360);
  auto b = rad(p).ball;
  CHECK(b.radius == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.center2().norm() < 1e-9);
  Region t = regular_polygon(e, {5, -2}, 1.0, 360);
  CHECK(rad(t).ball.radius == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rad(t).ball.center2() - Point(5, -2)).norm() < 1e-9);

  auto cat = std::make_shared<CatenoidSurface>();
  Region ring = sample_curve(cat, [](double th) { return Point(0.3 * std::cos(th), 0.3 * std::sin(th)); }, 24);
  const auto rr = rad(ring);
  REQUIRE(rr.ambient.has_value());
  CHECK(rr.ambient->radius <= rr.ball.radius + 1e-9);
}
