#include "isodiam/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace isodiam {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error(ErrorCode::ConfigInvalid, where + "." + key + ": unknown key");
  }
}

double req(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::ConfigInvalid, where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

}  // namespace

// ---------------------------------------------------------------------------

GraphChart GraphChart::euclidean(int dim, double radius) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidArgument, "graph chart dimension must be 1 or 2");
  GraphChart c;
  c.dim = dim;
  c.radius = radius;
  c.flat = true;
  const int n = dim + 1;
  c.metric = [n](const VectorXd&, double) { return MatrixXd::Identity(n, n); };
  c.descriptor = {{"kind", "flat"}};
  return c;
}

GraphChart GraphChart::conformal(int dim, double radius, double curvature) {
  GraphChart c = euclidean(dim, radius);
  c.flat = curvature == 0.0;
  const int n = dim + 1;
  c.metric = [n, curvature](const VectorXd& x, double z) {
    const double r2 = x.squaredNorm() + z * z;
    const double lambda = 1.0 / (1.0 + 0.25 * curvature * r2);
    return MatrixXd(lambda * lambda * MatrixXd::Identity(n, n));
  };
  c.descriptor = {{"kind", "conformal"}, {"curvature", curvature}};
  return c;
}

GraphChart GraphChart::from_json(const json& j) {
  check_keys(j, {"kind", "dim", "radius", "curvature"}, "chart");
  const std::string kind = j.value("kind", "flat");
  const int dim = j.value("dim", 1);
  const double radius = j.value("radius", 1.0);
  if (dim != 1 && dim != 2) throw Error(ErrorCode::ConfigInvalid, "chart.dim: must be 1 or 2");
  if (!(radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "chart.radius: must be positive");
  if (kind == "flat") return euclidean(dim, radius);
  if (kind == "conformal") return conformal(dim, radius, req(j, "curvature", "chart"));
  throw Error(ErrorCode::ConfigInvalid, "chart.kind: unknown chart '" + kind + "'");
}

MatrixXd GraphChart::g(const VectorXd& x, double z) const { return metric(x, z); }

std::vector<MatrixXd> GraphChart::dg(const VectorXd& x, double z) const {
  const int n = ambient_dim();
  std::vector<MatrixXd> out(n, MatrixXd::Zero(n, n));
  if (flat) return out;
  const double e = 1e-3;
  for (int a = 0; a < n; ++a) {
    auto at = [&](double s) {
      VectorXd xs = x;
      double zs = z;
      if (a < dim)
        xs[a] += s;
      else
        zs += s;
      return metric(xs, zs);
    };
    out[a] = (-at(2 * e) + 8.0 * at(e) - 8.0 * at(-e) + at(-2 * e)) / (12.0 * e);
  }
  return out;
}

// ---------------------------------------------------------------------------

Field Field::constant(double value) {
  return {{{"kind", "constant"}, {"value", value}}, [value](const VectorXd&) { return value; }};
}

Field Field::cap(double R, double offset) {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "cap radius must be positive");
  return {{{"kind", "cap"}, {"radius", R}, {"offset", offset}}, [R, offset](const VectorXd& x) {
            const double r2 = x.squaredNorm();
            if (r2 >= R * R) throw Error(ErrorCode::InvalidArgument, "cap evaluated outside its radius");
            return offset + R - std::sqrt(R * R - r2);
          }};
}

Field Field::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(ErrorCode::ConfigInvalid, "field: expected an object with kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, "field");
    return constant(req(j, "value", "field"));
  }
  if (kind == "cap") {
    check_keys(j, {"kind", "radius", "offset"}, "field");
    return cap(req(j, "radius", "field"), j.value("offset", 0.0));
  }
  if (kind == "quadratic") {
    check_keys(j, {"kind", "coefficient", "offset"}, "field");
    const double c = req(j, "coefficient", "field"), off = j.value("offset", 0.0);
    return {j, [c, off](const VectorXd& x) { return off + 0.5 * c * x.squaredNorm(); }};
  }
  if (kind == "samples") {
    check_keys(j, {"kind", "x", "values"}, "field");
    auto xs = j.at("x").get<std::vector<double>>();
    auto vs = j.at("values").get<std::vector<double>>();
    if (xs.size() != vs.size() || xs.size() < 2 || !std::is_sorted(xs.begin(), xs.end()))
      throw Error(ErrorCode::ConfigInvalid, "field.x: expected >= 2 increasing abscissae matching values");
    return {j, [xs, vs](const VectorXd& x) {
              const double t = std::clamp(x[0], xs.front(), xs.back());
              const auto it = std::upper_bound(xs.begin(), xs.end(), t);
              const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin(), 1), xs.size() - 1);
              const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
              return (1 - w) * vs[i - 1] + w * vs[i];
            }};
  }
  throw Error(ErrorCode::ConfigInvalid, "field.kind: unknown field '" + kind + "'");
}

// ---------------------------------------------------------------------------

int ObstacleProblem::nodes() const { return chart.dim == 1 ? cells : cells * cells; }

VectorXd ObstacleProblem::position(int node) const {
  const double hh = h(), r = chart.radius;
  VectorXd x(chart.dim);
  if (chart.dim == 1) {
    x[0] = -r + (node + 0.5) * hh;
  } else {
    x[0] = -r + (node % cells + 0.5) * hh;
    x[1] = -r + (node / cells + 0.5) * hh;
  }
  return x;
}

json ObstacleProblem::to_json() const {
  json c = chart.descriptor;
  c["dim"] = chart.dim;
  c["radius"] = chart.radius;
  return {{"chart", c},
          {"cells", cells},
          {"obstacle", obstacle.descriptor},
          {"dirichlet", dirichlet.descriptor},
          {"H0", H0},
          {"mode", mode == OperatorMode::Full ? "full" : "linearized"},
          {"solver_tol", solver_tol},
          {"contact_tol", contact_tol},
          {"delta0", delta0},
          {"max_picard", max_picard},
          {"max_sweeps", max_sweeps}};
}

ObstacleProblem ObstacleProblem::from_json(const json& j) {
  check_keys(j,
             {"chart", "cells", "obstacle", "dirichlet", "H0", "mode", "solver_tol", "contact_tol", "delta0",
              "max_picard", "max_sweeps"},
             "obstacle");
  ObstacleProblem p;
  if (j.contains("chart")) p.chart = GraphChart::from_json(j.at("chart"));
  p.cells = j.value("cells", p.cells);
  if (p.cells < 4) throw Error(ErrorCode::ConfigInvalid, "obstacle.cells: need at least 4 cells");
  if (j.contains("obstacle")) p.obstacle = Field::from_json(j.at("obstacle"));
  if (j.contains("dirichlet")) p.dirichlet = Field::from_json(j.at("dirichlet"));
  p.H0 = j.value("H0", 0.0);
  const std::string mode = j.value("mode", "full");
  if (mode == "full")
    p.mode = OperatorMode::Full;
  else if (mode == "linearized")
    p.mode = OperatorMode::Linearized;
  else
    throw Error(ErrorCode::ConfigInvalid, "obstacle.mode: expected full or linearized");
  p.solver_tol = j.value("solver_tol", p.solver_tol);
  p.contact_tol = j.value("contact_tol", 10.0 * p.solver_tol);
  p.delta0 = j.value("delta0", p.delta0);
  p.max_picard = j.value("max_picard", p.max_picard);
  p.max_sweeps = j.value("max_sweeps", p.max_sweeps);
  return p;
}

// ---------------------------------------------------------------------------
// Grid access with ghost values outside the cell-centred grid.

namespace {

struct Grid {
  const ObstacleProblem& p;
  int N;
  int k;
  double h;

  explicit Grid(const ObstacleProblem& prob) : p(prob), N(prob.cells), k(prob.chart.dim), h(prob.h()) {}

  bool inside(int i) const { return i >= 0 && i < N; }
  int index(int i, int j) const { return k == 1 ? i : i + N * j; }

  VectorXd pos(int i, int j) const {
    VectorXd x(k);
    x[0] = -p.chart.radius + (i + 0.5) * h;
    if (k == 2) x[1] = -p.chart.radius + (j + 0.5) * h;
    return x;
  }

  // Value at (i, j), either a node or a ghost. A ghost across one face mirrors
  // the adjacent node about the boundary value; corner ghosts take the data.
  double value(const VectorXd& u, int i, int j) const {
    const bool in_i = inside(i), in_j = k == 1 || inside(j);
    if (in_i && in_j) return u[index(i, j)];
    if (!in_i && !in_j) return p.dirichlet(pos(i, j));
    VectorXd face = pos(i, j);
    int ri = i, rj = j;
    if (!in_i) {
      ri = i < 0 ? 0 : N - 1;
      face[0] = i < 0 ? -p.chart.radius : p.chart.radius;
    } else {
      rj = j < 0 ? 0 : N - 1;
      face[1] = j < 0 ? -p.chart.radius : p.chart.radius;
    }
    return 2.0 * p.dirichlet(face) - u[index(ri, rj)];
  }

  VectorXd gradient(const VectorXd& u, int i, int j) const {
    VectorXd g(k);
    g[0] = (value(u, i + 1, j) - value(u, i - 1, j)) / (2 * h);
    if (k == 2) g[1] = (value(u, i, j + 1) - value(u, i, j - 1)) / (2 * h);
    return g;
  }

  template <class F>
  void for_each(F&& f) const {
    for (int j = 0; j < (k == 1 ? 1 : N); ++j)
      for (int i = 0; i < N; ++i) f(i, j, index(i, j));
  }
};

struct NodeCoefficients {
  MatrixXd a, c;
  VectorXd b;
  double f = 0.0, d = 0.0;
};

NodeCoefficients node_coefficients(const ObstacleProblem& prob, const VectorXd& x, double z, const VectorXd& p) {
  const int k = prob.chart.dim, n = k + 1, nn = k;
  NodeCoefficients out;
  if (prob.mode == OperatorMode::Linearized) {
    out.a = out.c = MatrixXd::Identity(k, k);
    out.b = VectorXd::Zero(k);
    out.f = -prob.H0;
    out.d = prob.H0;
    return out;
  }
  const MatrixXd G = prob.chart.g(x, z);
  const std::vector<MatrixXd> dG = prob.chart.dg(x, z);
  const MatrixXd H = graph_metric(prob.chart, x, z, p);
  const MatrixXd Hi = H.inverse();
  const MatrixXd Gi = G.inverse();

  // Christoffels Gamma^m_{ab} = 1/2 g^{ml} (d_a g_lb + d_b g_la - d_l g_ab).
  auto gamma = [&](int m, int a, int b) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += 0.5 * Gi(m, l) * (dG[a](l, b) + dG[b](l, a) - dG[l](a, b));
    return s;
  };
  // Derivative of h-tilde along coordinate a at fixed p, and of its inverse.
  auto dHi = [&](int a) {
    MatrixXd dh(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        dh(i, j) = dG[a](i, j) + p[i] * dG[a](nn, j) + p[j] * dG[a](nn, i) + p[i] * p[j] * dG[a](nn, nn);
    return MatrixXd(-Hi * dh * Hi);
  };
  auto dHi_dp = [&](int q) {
    MatrixXd dh = MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l)
        dh(i, l) = (i == q ? G(l, nn) + p[l] * G(nn, nn) : 0.0) + (l == q ? G(nn, i) + p[i] * G(nn, nn) : 0.0);
    return MatrixXd(-Hi * dh * Hi);
  };

  out.a = G(nn, nn) * Hi;
  out.b = Hi * G.block(0, nn, k, 1);

  // g(e_n, nu) with nu the g-unit normal raised from the covector (-p, 1).
  VectorXd covector(n);
  covector.head(k) = -p;
  covector[nn] = 1.0;
  const double normal_component = 1.0 / std::sqrt(covector.dot(Gi * covector));

  double f = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int m = 0; m < n; ++m) {
        f += Hi(i, j) * p[i] * gamma(m, nn, nn) * G(j, m);
        f += Hi(i, j) * p[j] * p[i] * gamma(m, nn, nn) * G(m, nn);
        f += Hi(i, j) * gamma(m, i, nn) * G(j, m);
        f += Hi(i, j) * p[j] * gamma(m, i, nn) * G(m, nn);
      }
  out.f = f - prob.H0 * normal_component;

  out.c = out.a;
  for (int j = 0; j < k; ++j) {
    const MatrixXd D = dHi_dp(j);
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) out.c(i, j) += (G(nn, nn) * p[l] + G(l, nn)) * D(i, l);
  }

  const MatrixXd dz = dHi(nn);
  double d = 0.0;
  for (int i = 0; i < k; ++i) {
    const MatrixXd dx = dHi(i);
    for (int j = 0; j < k; ++j) {
      d += G(nn, nn) * dx(i, j) * p[j];
      d += G(nn, nn) * dz(i, j) * p[i] * p[j];
      d += dG[i](nn, nn) * Hi(i, j) * p[j];
      d += dG[nn](nn, nn) * Hi(i, j) * p[i] * p[j];
      d += G(j, nn) * dx(i, j);
      d += G(j, nn) * dz(i, j) * p[i];
      d += dG[i](j, nn) * Hi(i, j);
      d += dG[nn](j, nn) * Hi(i, j) * p[i];
    }
  }
  out.d = d - out.f;
  return out;
}

// c^{ij} d_ij u + d with u_P split off: returns (off-diagonal part, diagonal weight on u_P).
std::pair<double, double> stencil(const Grid& g, const MatrixXd& c, double d, const VectorXd& u, int i, int j) {
  const double h2 = g.h * g.h;
  double rest = d, diag = 0.0;
  auto axis = [&](double cii, int di, int dj) {
    // Neighbours on both sides; a face ghost mirrors u_P, moving it to the diagonal.
    for (int s : {-1, 1}) {
      const int ni = i + s * di, nj = j + s * dj;
      const bool ghost = !(g.inside(ni) && (g.k == 1 || g.inside(nj)));
      if (ghost) {
        VectorXd face = g.pos(i, j);
        if (di) face[0] = ni < 0 ? -g.p.chart.radius : g.p.chart.radius;
        if (dj) face[1] = nj < 0 ? -g.p.chart.radius : g.p.chart.radius;
        rest += cii * 2.0 * g.p.dirichlet(face) / h2;
        diag -= cii / h2;
      } else {
        rest += cii * u[g.index(ni, nj)] / h2;
      }
    }
    diag -= 2.0 * cii / h2;
  };
  axis(c(0, 0), 1, 0);
  if (g.k == 2) {
    axis(c(1, 1), 0, 1);
    const double c12 = 0.5 * (c(0, 1) + c(1, 0));
    const double cross = g.value(u, i + 1, j + 1) - g.value(u, i - 1, j + 1) - g.value(u, i + 1, j - 1) +
                         g.value(u, i - 1, j - 1);
    rest += 2.0 * c12 * cross / (4.0 * h2);
  }
  return {rest, diag};
}

}  // namespace

MatrixXd graph_metric(const GraphChart& chart, const VectorXd& x, double z, const VectorXd& p) {
  const int k = chart.dim, nn = k;
  const MatrixXd G = chart.g(x, z);
  MatrixXd H(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) H(i, j) = G(i, j) + p[i] * G(nn, j) + p[j] * G(nn, i) + p[i] * p[j] * G(nn, nn);
  if (H.determinant() < 1e-10) throw Error(ErrorCode::SingularMetric, "graph metric is singular");
  return H;
}

std::vector<MatrixXd> assemble_metric_on_graph(const ObstacleProblem& p, const VectorXd& u) {
  const Grid g(p);
  std::vector<MatrixXd> out(p.nodes());
  g.for_each([&](int i, int j, int idx) { out[idx] = graph_metric(p.chart, g.pos(i, j), u[idx], g.gradient(u, i, j)); });
  return out;
}

OperatorCoefficients assemble_operator(const ObstacleProblem& p, const VectorXd& u) {
  const Grid g(p);
  OperatorCoefficients out;
  const int n = p.nodes();
  out.a.resize(n);
  out.c.resize(n);
  out.b.resize(n);
  out.f.resize(n);
  out.d.resize(n);
  g.for_each([&](int i, int j, int idx) {
    NodeCoefficients nc = node_coefficients(p, g.pos(i, j), u[idx], g.gradient(u, i, j));
    out.a[idx] = std::move(nc.a);
    out.c[idx] = std::move(nc.c);
    out.b[idx] = std::move(nc.b);
    out.f[idx] = nc.f;
    out.d[idx] = nc.d;
  });
  return out;
}

VectorXd apply_operator(const ObstacleProblem& p, const OperatorCoefficients& k, const VectorXd& u) {
  const Grid g(p);
  VectorXd Lu(p.nodes());
  g.for_each([&](int i, int j, int idx) {
    const auto [rest, diag] = stencil(g, k.c[idx], k.d[idx], u, i, j);
    Lu[idx] = rest + diag * u[idx];
  });
  return Lu;
}

// ---------------------------------------------------------------------------

std::vector<int> ObstacleSolution::free_boundary() const {
  const Grid g(problem);
  std::vector<int> out;
  g.for_each([&](int i, int j, int idx) {
    if (!contact[idx]) return;
    bool edge = false;
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      if (g.k == 1 && dj != 0) continue;
      const int ni = i + di, nj = j + dj;
      if (g.inside(ni) && (g.k == 1 || g.inside(nj)) && !contact[g.index(ni, nj)]) edge = true;
    }
    if (edge) out.push_back(idx);
  });
  return out;
}

int ObstacleSolution::contact_count() const {
  return static_cast<int>(std::count(contact.begin(), contact.end(), 1));
}

namespace {

double complementarity(const VectorXd& Lu, const VectorXd& u, const VectorXd& psi) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) r = std::max(r, std::abs(std::min(-Lu[i], u[i] - psi[i])));
  return r;
}

}  // namespace

ObstacleSolution solve_vi(const ObstacleProblem& p) {
  const Grid g(p);
  const int n = p.nodes();
  ObstacleSolution sol;
  sol.problem = p;
  sol.psi.resize(n);
  VectorXd u(n);
  g.for_each([&](int i, int j, int idx) {
    sol.psi[idx] = p.obstacle(g.pos(i, j));
    u[idx] = std::max(sol.psi[idx], p.dirichlet(g.pos(i, j)));
  });
  const double omega = 2.0 / (1.0 + std::sin(M_PI / p.cells));

  OperatorCoefficients coeff = assemble_operator(p, u);
  bool converged = false;
  for (int outer = 0; outer < p.max_picard && !converged; ++outer) {
    const VectorXd before = u;
    for (int sweep = 0; sweep < p.max_sweeps; ++sweep) {
      ++sol.sweeps;
      double change = 0.0;
      g.for_each([&](int i, int j, int idx) {
        const auto [rest, diag] = stencil(g, coeff.c[idx], coeff.d[idx], u, i, j);
        const double gs = -rest / diag;
        const double next = std::max(sol.psi[idx], u[idx] + omega * (gs - u[idx]));
        change = std::max(change, std::abs(next - u[idx]));
        u[idx] = next;
      });
      if (change == 0.0 ||
          (sweep % 16 == 15 && complementarity(apply_operator(p, coeff, u), u, sol.psi) < 0.5 * p.solver_tol))
        break;
    }
    sol.picard_iterations = outer + 1;
    if (p.mode == OperatorMode::Full) coeff = assemble_operator(p, u);
    const double picard_change = (u - before).lpNorm<Eigen::Infinity>();
    const double res = complementarity(apply_operator(p, coeff, u), u, sol.psi);
    converged = (p.mode == OperatorMode::Linearized || picard_change < p.solver_tol) && res < p.solver_tol;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "obstacle solver exhausted its Picard budget");

  sol.u = u;
  sol.Lu = apply_operator(p, coeff, u);
  sol.complementarity_residual = complementarity(sol.Lu, u, sol.psi);
  sol.contact.assign(n, 0);
  sol.ellipticity_min = std::numeric_limits<double>::infinity();
  sol.ellipticity_max = 0.0;
  g.for_each([&](int i, int j, int idx) {
    sol.contact[idx] = u[idx] - sol.psi[idx] <= p.contact_tol;
    sol.max_gradient = std::max(sol.max_gradient, g.gradient(u, i, j).norm());
    const MatrixXd cs = 0.5 * (coeff.c[idx] + coeff.c[idx].transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(cs);
    sol.ellipticity_min = std::min(sol.ellipticity_min, es.eigenvalues().minCoeff());
    sol.ellipticity_max = std::max(sol.ellipticity_max, es.eigenvalues().maxCoeff());
  });
  sol.gradient_exceeds_delta0 = sol.max_gradient > p.delta0;
  return sol;
}

QuadraticGrowth quadratic_growth(const ObstacleSolution& sol) {
  if (sol.contact_count() == 0) throw Error(ErrorCode::EmptyContactSet, "no contact nodes");
  const ObstacleProblem& p = sol.problem;
  const double reach = 0.5 * p.chart.radius;
  QuadraticGrowth out;
  for (int x0 : sol.free_boundary()) {
    const VectorXd c = p.position(x0);
    double best = 0.0;
    for (int x = 0; x < p.nodes(); ++x) {
      const double d2 = (p.position(x) - c).squaredNorm();
      if (d2 == 0.0 || d2 > reach * reach) continue;
      const double q = (sol.u[x] - sol.psi[x]) / d2;
      out.near_field_constant = std::max(out.near_field_constant, q);
      if (4.0 * d2 >= reach * reach) best = std::max(best, q);
    }
    out.per_point.emplace_back(x0, best);
    out.constant = std::max(out.constant, best);
  }
  return out;
}

C11Report c11_check(const ObstacleSolution& sol, double pair_radius) {
  const ObstacleProblem& p = sol.problem;
  const Grid g(p);
  if (pair_radius <= 0.0) pair_radius = 0.25 * p.chart.radius;
  const int reach = static_cast<int>(std::floor(pair_radius / g.h));
  C11Report out;
  const VectorXd& u = sol.u;
  // Only stencils made of grid nodes; ghost values are accurate to O(h^2) only.
  auto interior = [&](int i, int j) {
    return i > 0 && i < g.N - 1 && (g.k == 1 || (j > 0 && j < g.N - 1));
  };
  g.for_each([&](int i, int j, int idx) {
    if (!interior(i, j)) return;
    const VectorXd grad = g.gradient(u, i, j);
    const int jlo = g.k == 1 ? 0 : std::max(0, j - reach), jhi = g.k == 1 ? 0 : std::min(g.N - 1, j + reach);
    for (int jj = jlo; jj <= jhi; ++jj)
      for (int ii = std::max(0, i - reach); ii <= std::min(g.N - 1, i + reach); ++ii) {
        if (ii == i && jj == j) continue;
        VectorXd step(g.k);
        step[0] = (ii - i) * g.h;
        if (g.k == 2) step[1] = (jj - j) * g.h;
        const double d2 = step.squaredNorm();
        if (d2 > pair_radius * pair_radius) continue;
        const double rem = u[g.index(ii, jj)] - u[idx] - grad.dot(step);
        out.remainder_bound = std::max(out.remainder_bound, 2.0 * std::abs(rem) / d2);
      }
    for (auto [di, dj] : {std::pair{1, 0}, {0, 1}}) {
      if (g.k == 1 && dj) continue;
      auto at = [&](int s) { return g.value(u, i + s * di, j + s * dj); };
      out.second_difference_sup = std::max(out.second_difference_sup, std::abs(at(1) - 2 * at(0) + at(-1)) / (g.h * g.h));
      const int ti = i + 2 * di, tj = j + 2 * dj;
      if (g.inside(i - di) && g.inside(ti) && (g.k == 1 || (g.inside(j - dj) && g.inside(tj))))
        out.third_difference_sup =
            std::max(out.third_difference_sup, std::abs(at(2) - 3 * at(1) + 3 * at(0) - at(-1)) / (g.h * g.h * g.h));
    }
  });
  return out;
}

void write_solution_csv(const ObstacleSolution& sol, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  const int k = sol.problem.chart.dim;
  out << std::setprecision(17) << (k == 1 ? "x" : "x,y") << ",u,psi,contact,Lu\n";
  for (int i = 0; i < sol.problem.nodes(); ++i) {
    const VectorXd x = sol.problem.position(i);
    out << x[0] << ',';
    if (k == 2) out << x[1] << ',';
    out << sol.u[i] << ',' << sol.psi[i] << ',' << int(sol.contact[i]) << ',' << sol.Lu[i] << '\n';
  }
}

}  // namespace isodiam
