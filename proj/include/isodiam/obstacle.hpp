#pragma once

#include "isodiam/common.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <vector>

namespace isodiam {

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using ScalarField = std::function<double(const VectorXd&)>;

/// Ambient metric on B_{r0}^k x R in coordinates (x, z); n = k + 1.
/// `flat` charts skip all metric derivatives.
struct GraphChart {
  int dim = 1;  // k: 1 for curves in a surface, 2 for surfaces in 3-space
  double radius = 1.0;  // the grid covers [-radius, radius]^k
  bool flat = true;
  std::function<MatrixXd(const VectorXd& x, double z)> metric;
  nlohmann::json descriptor;

  static GraphChart euclidean(int dim, double radius);
  /// g = (1 + K |(x, z)|^2 / 4)^{-2} Id, a normal chart of the constant-curvature-K model.
  static GraphChart conformal(int dim, double radius, double curvature);
  static GraphChart from_json(const nlohmann::json& j);

  int ambient_dim() const { return dim + 1; }
  MatrixXd g(const VectorXd& x, double z) const;
  /// dg[a] = partial of g along coordinate a (x_1..x_k, then z); 4th-order differences.
  std::vector<MatrixXd> dg(const VectorXd& x, double z) const;
};

/// A grid function source: constant, cap, quadratic, or 1D samples.
struct Field {
  nlohmann::json descriptor;
  ScalarField fn;

  static Field from_json(const nlohmann::json& j);
  static Field constant(double value);
  /// Lower graph of a sphere of radius R tangent to z = offset at the origin.
  static Field cap(double R, double offset = 0.0);
  double operator()(const VectorXd& x) const { return fn(x); }
};

enum class OperatorMode { Full, Linearized };

struct ObstacleProblem {
  GraphChart chart = GraphChart::euclidean(1, 1.0);
  int cells = 64;  // cells per axis; nodes sit at cell centres
  Field obstacle = Field::constant(0.0);
  Field dirichlet = Field::constant(0.0);
  double H0 = 0.0;
  OperatorMode mode = OperatorMode::Full;
  double solver_tol = 1e-10;
  double contact_tol = 1e-9;
  double delta0 = 0.2;
  int max_picard = 200;
  int max_sweeps = 10000;

  double h() const { return 2.0 * chart.radius / cells; }
  int nodes() const;
  VectorXd position(int node) const;

  nlohmann::json to_json() const;
  static ObstacleProblem from_json(const nlohmann::json& j);
};

/// Induced metric h_ij = g_ij + p_i g_nj + p_j g_ni + p_i p_j g_nn.
MatrixXd graph_metric(const GraphChart& chart, const VectorXd& x, double z, const VectorXd& p);
/// The same at every node, with p by central differences of u.
std::vector<MatrixXd> assemble_metric_on_graph(const ObstacleProblem& p, const VectorXd& u);

struct OperatorCoefficients {
  std::vector<MatrixXd> a, c;
  std::vector<VectorXd> b;
  VectorXd f, d;
};

/// Lu = div(A grad u + b) - f = c^{ij} d_ij u + d at every node.
OperatorCoefficients assemble_operator(const ObstacleProblem& p, const VectorXd& u);

/// Discrete L_h u at every node for given frozen coefficients.
VectorXd apply_operator(const ObstacleProblem& p, const OperatorCoefficients& k, const VectorXd& u);

struct ObstacleSolution {
  ObstacleProblem problem;
  VectorXd u, psi, Lu;
  std::vector<char> contact;
  double complementarity_residual = 0.0;
  double max_gradient = 0.0;
  bool gradient_exceeds_delta0 = false;
  double ellipticity_min = 0.0;  // extreme eigenvalues of sym(c)
  double ellipticity_max = 0.0;
  int picard_iterations = 0;
  int sweeps = 0;

  std::vector<int> free_boundary() const;
  int contact_count() const;
};

/// Frozen-coefficient Picard loop around projected SOR.
ObstacleSolution solve_vi(const ObstacleProblem& p);

struct QuadraticGrowth {
  double constant = 0.0;             // over r0/4 <= |x - x0| <= r0/2
  double near_field_constant = 0.0;  // over 0 < |x - x0| <= r0/2
  std::vector<std::pair<int, double>> per_point;  // free-boundary node, its constant
};

/// sup (u - psi)(x) / |x - x0|^2 over free-boundary nodes x0. The annulus keeps
/// the half-cell offset of the discrete free boundary out of the leading term.
QuadraticGrowth quadratic_growth(const ObstacleSolution& sol);

struct C11Report {
  double remainder_bound = 0.0;        // C-bar
  double second_difference_sup = 0.0;
  double third_difference_sup = 0.0;
};

/// Remainder quotients over node pairs closer than `pair_radius` (default radius / 4).
C11Report c11_check(const ObstacleSolution& sol, double pair_radius = -1.0);

void write_solution_csv(const ObstacleSolution& sol, const std::filesystem::path& path);

}  // namespace isodiam
