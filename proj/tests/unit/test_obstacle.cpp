#include "isodiam/obstacle.hpp"

#include <doctest.h>

#include <Eigen/Sparse>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace isodiam;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// u'' - 1 on [-1, 1], u >= 0, u(+-1) = 1/8.
ObstacleProblem closed_form(int cells) {
  ObstacleProblem p;
  p.chart = GraphChart::euclidean(1, 1.0);
  p.cells = cells;
  p.H0 = -1.0;
  p.mode = OperatorMode::Linearized;
  p.dirichlet = Field::constant(0.125);
  return p;
}

double closed_form_u(double x) { return std::abs(x) >= 0.5 ? 0.5 * std::pow(std::abs(x) - 0.5, 2) : 0.0; }

double max_error(const ObstacleSolution& s) {
  double e = 0.0;
  for (int i = 0; i < s.problem.nodes(); ++i)
    e = std::max(e, std::abs(s.u[i] - closed_form_u(s.problem.position(i)[0])));
  return e;
}

// Independent tridiagonal solve of u'' = rhs with the same mirrored boundary ghosts.
VectorXd linear_solve_1d(int N, double h, double rhs, double left, double right) {
  Eigen::SparseMatrix<double> A(N, N);
  VectorXd b = VectorXd::Constant(N, rhs * h * h);
  for (int i = 0; i < N; ++i) {
    A.insert(i, i) = -2.0 - (i == 0) - (i == N - 1);
    if (i > 0) A.insert(i, i - 1) = 1.0;
    if (i < N - 1) A.insert(i, i + 1) = 1.0;
  }
  b[0] -= 2 * left;
  b[N - 1] -= 2 * right;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  return lu.solve(b);
}

ObstacleProblem cap_problem(int cells) {
  ObstacleProblem p;
  p.chart = GraphChart::euclidean(2, 0.2);
  p.cells = cells;
  p.H0 = -2.0;
  p.obstacle = Field::cap(2.0);
  p.dirichlet = Field::cap(2.0, 0.002);
  return p;
}

}  // namespace

TEST_CASE("graph metric on flat charts") {
  const GraphChart c1 = GraphChart::euclidean(1, 1.0);
  CHECK(graph_metric(c1, vec({0.3}), 0.0, vec({0.0}))(0, 0) == doctest::Approx(1.0));
  const double alpha = 0.37;
  CHECK(graph_metric(c1, vec({0.3}), 0.1, vec({alpha}))(0, 0) == doctest::Approx(1 + alpha * alpha).epsilon(1e-15));
  // u = |x|^2 / 2 has gradient x.
  const GraphChart c2 = GraphChart::euclidean(2, 1.0);
  const VectorXd x = vec({0.2, -0.4});
  const MatrixXd h = graph_metric(c2, x, 0.1, x);
  CHECK((h - (MatrixXd::Identity(2, 2) + x * x.transpose())).norm() < 1e-15);

  ObstacleProblem p = cap_problem(8);
  p.dirichlet = Field::constant(0.0);
  const auto fields = assemble_metric_on_graph(p, VectorXd::Zero(p.nodes()));
  for (const auto& m : fields) CHECK((m - MatrixXd::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("degenerate graph metric is rejected") {
  GraphChart c = GraphChart::euclidean(1, 1.0);
  c.metric = [](const VectorXd&, double) {
    MatrixXd g(2, 2);
    g << 1.0, -1.0, -1.0, 1.0;
    return g;
  };
  CHECK_THROWS_AS(graph_metric(c, vec({0.0}), 0.0, vec({1.0})), Error);
}

TEST_CASE("operator at u = 0 on a flat chart is the Laplacian") {
  ObstacleProblem p = cap_problem(8);
  p.H0 = 0.0;
  p.dirichlet = Field::constant(0.0);
  const auto k = assemble_operator(p, VectorXd::Zero(p.nodes()));
  for (int i = 0; i < p.nodes(); ++i) {
    CHECK((k.a[i] - MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK((k.c[i] - MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK(k.b[i].norm() == 0.0);
    CHECK(k.f[i] == 0.0);
    CHECK(k.d[i] == 0.0);
  }
}

TEST_CASE("flat operator coefficients match a hand expansion") {
  // Flat: F(p) = h^{-1} p with h = I + p p^T, so F = p / (1 + |p|^2) and
  // c_ij = dF_i/dp_j = delta_ij / (1 + |p|^2) - 2 p_i p_j / (1 + |p|^2)^2;
  // f = -H0 g(e_n, nu) = -H0 / sqrt(1 + |p|^2) and d = -f.
  const double H0 = -0.7;
  SUBCASE("1D, linear u") {
    ObstacleProblem p;
    p.chart = GraphChart::euclidean(1, 1.0);
    p.cells = 16;
    p.H0 = H0;
    p.dirichlet = Field::from_json({{"kind", "quadratic"}, {"coefficient", 0.0}, {"offset", 0.0}});
    const double alpha = 0.15;
    VectorXd u(p.nodes());
    for (int i = 0; i < p.nodes(); ++i) u[i] = alpha * p.position(i)[0];
    const auto k = assemble_operator(p, u);
    const int mid = p.nodes() / 2;
    const double q = 1 + alpha * alpha;
    CHECK(k.c[mid](0, 0) == doctest::Approx((1 - alpha * alpha) / (q * q)).epsilon(1e-13));
    CHECK(k.d[mid] == doctest::Approx(H0 / std::sqrt(q)).epsilon(1e-13));
    CHECK(k.a[mid](0, 0) == doctest::Approx(1 / q).epsilon(1e-13));
  }
  SUBCASE("2D, quadratic u") {
    ObstacleProblem p = cap_problem(16);
    p.H0 = H0;
    p.dirichlet = Field::from_json({{"kind", "quadratic"}, {"coefficient", 0.5}});
    VectorXd u(p.nodes());
    for (int i = 0; i < p.nodes(); ++i) u[i] = 0.25 * p.position(i).squaredNorm();
    const auto k = assemble_operator(p, u);
    const int node = 5 + 16 * 9;
    const VectorXd g = 0.5 * p.position(node);  // exact for central differences
    const double q = 1 + g.squaredNorm();
    MatrixXd expect = MatrixXd::Identity(2, 2) / q - 2 * g * g.transpose() / (q * q);
    CHECK((k.c[node] - expect).norm() < 1e-13);
    CHECK(k.d[node] == doctest::Approx(H0 / std::sqrt(q)).epsilon(1e-13));
  }
}

TEST_CASE("normal conformal chart at u = 0 gives c = I and d = -f") {
  for (double K : {-1.0, 1.0}) {
    ObstacleProblem p = cap_problem(8);
    p.chart = GraphChart::conformal(2, 0.2, K);
    p.H0 = -1.0;
    p.dirichlet = Field::constant(0.0);
    const auto k = assemble_operator(p, VectorXd::Zero(p.nodes()));
    for (int i = 0; i < p.nodes(); ++i) {
      CHECK((k.c[i] - MatrixXd::Identity(2, 2)).norm() < 1e-12);
      CHECK(k.d[i] == doctest::Approx(-k.f[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("ellipticity holds for small gradients") {
  for (double K : {-1.0, 0.0, 1.0}) {
    ObstacleProblem p = cap_problem(16);
    p.chart = GraphChart::conformal(2, 0.2, K);
    auto shape = [](const VectorXd& x) { return 0.1 * x[0] + 0.3 * x[1] * x[1] - 0.1 * x[0] * x[1]; };
    p.dirichlet = Field{{{"kind", "custom"}}, shape};
    VectorXd u(p.nodes());
    for (int i = 0; i < p.nodes(); ++i) u[i] = shape(p.position(i));
    const auto k = assemble_operator(p, u);
    for (const auto& c : k.c) {
      const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (c + c.transpose()));
      CHECK(es.eigenvalues().minCoeff() >= 0.5);
      CHECK(es.eigenvalues().maxCoeff() <= 2.0);
    }
  }
}

TEST_CASE("1D closed-form obstacle problem converges at second order") {
  const auto coarse = solve_vi(closed_form(64));
  const auto fine = solve_vi(closed_form(128));
  const double ratio = max_error(coarse) / max_error(fine);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
  for (const auto* s : {&coarse, &fine}) {
    CHECK(s->complementarity_residual < 1e-10);
    for (int i = 0; i < s->problem.nodes(); ++i) {
      CHECK(s->u[i] >= s->psi[i] - 1e-12);
      CHECK(std::abs(std::min(-s->Lu[i], s->u[i] - s->psi[i])) < 1e-10);
    }
  }
  // Free boundary within a cell of +-1/2.
  for (int node : fine.free_boundary())
    CHECK(std::abs(std::abs(fine.problem.position(node)[0]) - 0.5) <= fine.problem.h());
}

TEST_CASE("quadratic growth constant tends to one half") {
  const auto a = quadratic_growth(solve_vi(closed_form(128)));
  const auto b = quadratic_growth(solve_vi(closed_form(256)));
  CHECK(std::abs(b.constant - 0.5) <= 0.05 * 0.5);
  CHECK(std::abs(a.constant - b.constant) < 0.1 * b.constant);
  CHECK(b.constant < a.constant);
  CHECK(b.per_point.size() == 2);
  // Nearest neighbours see the half-cell offset of the discrete free boundary.
  CHECK(b.near_field_constant == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("second differences stay bounded while third differences blow up") {
  const auto a = c11_check(solve_vi(closed_form(128)));
  const auto b = c11_check(solve_vi(closed_form(256)));
  CHECK(b.second_difference_sup <= 2 * a.second_difference_sup);
  CHECK(a.second_difference_sup <= 2 * b.second_difference_sup);
  CHECK(b.second_difference_sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b.remainder_bound == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(b.third_difference_sup >= 1.8 * a.third_difference_sup);
}

TEST_CASE("no-contact limit matches a plain linear solve") {
  ObstacleProblem p = closed_form(64);
  p.obstacle = Field::constant(-10.0);
  const auto s = solve_vi(p);
  CHECK(s.contact_count() == 0);
  CHECK_THROWS_AS(quadratic_growth(s), Error);
  const VectorXd w = linear_solve_1d(64, p.h(), 1.0, 0.125, 0.125);
  CHECK((s.u - w).lpNorm<Eigen::Infinity>() < 1e-10);
  // Quadratic solution: the remainder quotient is the exact second derivative.
  CHECK(c11_check(s).remainder_bound == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solution lies above both the obstacle and the unconstrained solve") {
  ObstacleProblem p = closed_form(64);
  p.obstacle = Field::from_json({{"kind", "quadratic"}, {"coefficient", -0.5}, {"offset", 0.05}});
  const auto s = solve_vi(p);
  const VectorXd w = linear_solve_1d(64, p.h(), 1.0, 0.125, 0.125);
  CHECK(s.contact_count() > 0);
  for (int i = 0; i < p.nodes(); ++i) CHECK(s.u[i] >= std::max(s.psi[i], w[i]) - 1e-10);
}

TEST_CASE("full-contact limit") {
  ObstacleProblem p;
  p.chart = GraphChart::euclidean(1, 1.0);
  p.cells = 32;
  p.mode = OperatorMode::Linearized;
  p.obstacle = Field::from_json({{"kind", "quadratic"}, {"coefficient", -0.2}, {"offset", 0.1}});
  p.dirichlet = Field::constant(0.0);
  const auto s = solve_vi(p);
  CHECK(s.contact_count() == p.nodes());
  for (int i = 0; i < p.nodes(); ++i) CHECK(s.Lu[i] <= 1e-10);
  CHECK(quadratic_growth(s).constant == 0.0);
}

TEST_CASE("2D spherical cap obstacle") {
  const auto s = solve_vi(cap_problem(32));
  CHECK(s.complementarity_residual < 1e-10);
  CHECK(s.contact_count() > 0);
  CHECK(s.contact_count() < s.problem.nodes());
  CHECK_FALSE(s.gradient_exceeds_delta0);
  CHECK(s.ellipticity_min >= 0.5);
  CHECK(s.ellipticity_max <= 2.0);
  const auto q = quadratic_growth(s);
  CHECK(q.constant > 0.0);
  CHECK(std::isfinite(c11_check(s).remainder_bound));
}

TEST_CASE("curved chart solve converges") {
  ObstacleProblem p = cap_problem(16);
  p.chart = GraphChart::conformal(2, 0.2, -1.0);
  const auto s = solve_vi(p);
  CHECK(s.complementarity_residual < 1e-10);
  CHECK(s.contact_count() > 0);
  CHECK(s.picard_iterations > 1);
}

TEST_CASE("problem json round trip and validation") {
  const ObstacleProblem p = cap_problem(24);
  const ObstacleProblem q = ObstacleProblem::from_json(p.to_json());
  CHECK(q.to_json() == p.to_json());
  CHECK(q.obstacle(vec({0.1, 0.05})) == p.obstacle(vec({0.1, 0.05})));
  auto j = p.to_json();
  j["bogus"] = 1;
  try {
    ObstacleProblem::from_json(j);
    FAIL("accepted an unknown key");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  auto k = p.to_json();
  k["chart"]["kind"] = "torus";
  CHECK_THROWS_AS(ObstacleProblem::from_json(k), Error);
}

TEST_CASE("samples field interpolates linearly") {
  const Field f = Field::from_json({{"kind", "samples"}, {"x", {-1.0, 0.0, 1.0}}, {"values", {1.0, 0.0, 2.0}}});
  CHECK(f(vec({-0.5})) == doctest::Approx(0.5));
  CHECK(f(vec({0.25})) == doctest::Approx(0.5));
  CHECK(f(vec({3.0})) == doctest::Approx(2.0));
}

TEST_CASE("solution csv columns") {
  const auto s = solve_vi(closed_form(16));
  const auto path = std::filesystem::temp_directory_path() / "isodiam_obstacle_test.csv";
  write_solution_csv(s, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,u,psi,contact,Lu");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 16);
  std::filesystem::remove(path);
}
