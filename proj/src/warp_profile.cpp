#include "isodiam/warp_profile.hpp"

#include "isodiam/common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isodiam {

std::string_view to_string(CurvatureSign sign) noexcept {
  switch (sign) {
    case CurvatureSign::NonPositive: return "non_positive";
    case CurvatureSign::NonNegative: return "non_negative";
    case CurvatureSign::Mixed: return "mixed";
  }
  return "?";
}

namespace {

// r - tanh r without cancellation for small r.
double r_minus_tanh(double r) {
  if (std::abs(r) < 0.1) {
    const double r2 = r * r;
    return r * r2 * (1.0 / 3.0 + r2 * (-2.0 / 15.0 + r2 * (17.0 / 315.0 + r2 * (-62.0 / 2835.0))));
  }
  return r - std::tanh(r);
}

// x - sin x without cancellation for small x.
double x_minus_sin(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x * x2 * (1.0 / 6.0 + x2 * (-1.0 / 120.0 + x2 * (1.0 / 5040.0 + x2 * (-1.0 / 362880.0))));
  }
  return x - std::sin(x);
}

double log_cosh(double r) {
  const double a = std::abs(r);
  if (a > 20.0) return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  const double s = std::sinh(0.5 * r);
  return std::log1p(2.0 * s * s);
}

}  // namespace

// ---------------------------------------------------------------------------

TanhProfile::TanhProfile(double a) : a_(a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "warp parameter a must be positive");
}

double TanhProfile::value(double r) const { return a_ * r + (1.0 - a_) * std::tanh(r); }

double TanhProfile::slope(double r) const {
  const double c = std::cosh(r);
  return a_ + (1.0 - a_) / (c * c);
}

double TanhProfile::second(double r) const {
  const double c = std::cosh(r);
  return -2.0 * (1.0 - a_) * std::tanh(r) / (c * c);
}

double TanhProfile::deficit(double r) const { return (1.0 - a_) * r_minus_tanh(r); }

double TanhProfile::slope_deficit(double r) const {
  const double t = std::tanh(r);
  return (1.0 - a_) * t * t;
}

double TanhProfile::integral(double r) const { return 0.5 * a_ * r * r + (1.0 - a_) * log_cosh(r); }

double TanhProfile::gaussian_curvature(double r) const {
  if (a_ == 1.0) return 0.0;
  const double c = std::cosh(r);
  // tanh(r)/phi(r) -> 1 at the apex.
  double ratio = 1.0;
  if (r > 1e-8) ratio = std::tanh(r) / value(r);
  return 2.0 * (1.0 - a_) * ratio / (c * c);
}

CurvatureSign TanhProfile::declared_sign() const {
  return a_ <= 1.0 ? CurvatureSign::NonNegative : CurvatureSign::NonPositive;
}

nlohmann::json TanhProfile::descriptor() const { return {{"kind", "warped"}, {"a", a_}}; }

// ---------------------------------------------------------------------------

SineProfile::SineProfile(double curvature) {
  if (!(curvature > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere curvature must be positive");
  k_ = std::sqrt(curvature);
}

double SineProfile::value(double r) const { return std::sin(k_ * r) / k_; }
double SineProfile::slope(double r) const { return std::cos(k_ * r); }
double SineProfile::second(double r) const { return -k_ * std::sin(k_ * r); }
double SineProfile::deficit(double r) const { return x_minus_sin(k_ * r) / k_; }

double SineProfile::slope_deficit(double r) const {
  const double s = std::sin(0.5 * k_ * r);
  return 2.0 * s * s;
}

double SineProfile::integral(double r) const {
  const double s = std::sin(0.5 * k_ * r);
  return 2.0 * s * s / (k_ * k_);
}

double SineProfile::gaussian_curvature(double) const { return k_ * k_; }

double SineProfile::max_radius() const { return M_PI / k_; }

nlohmann::json SineProfile::descriptor() const { return {{"kind", "sphere"}, {"K", k_ * k_}}; }

// ---------------------------------------------------------------------------

TabulatedProfile::TabulatedProfile(std::vector<double> r, std::vector<double> phi)
    : r_(std::move(r)), phi_(std::move(phi)) {
  const std::size_t n = r_.size();
  if (n < 3 || phi_.size() != n)
    throw Error(ErrorCode::InvalidArgument, "tabulated profile needs >= 3 matching (r, phi) samples");
  if (r_[0] != 0.0 || phi_[0] != 0.0)
    throw Error(ErrorCode::InvalidArgument, "tabulated profile must start at (0, 0)");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(r_[i] > r_[i - 1])) throw Error(ErrorCode::InvalidArgument, "tabulated r must be strictly increasing");
    if (!(phi_[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "tabulated phi must be positive for r > 0");
  }

  // Clamped (phi'(0) = 1) / natural spline: tridiagonal system for knot second derivatives.
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  const double h0 = r_[1] - r_[0];
  diag[0] = h0 / 3.0;
  upper[0] = h0 / 6.0;
  rhs[0] = (phi_[1] - phi_[0]) / h0 - 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = r_[i] - r_[i - 1];
    const double hr = r_[i + 1] - r_[i];
    lower[i] = hl / 6.0;
    diag[i] = (hl + hr) / 3.0;
    upper[i] = hr / 6.0;
    rhs[i] = (phi_[i + 1] - phi_[i]) / hr - (phi_[i] - phi_[i - 1]) / hl;
  }
  diag[n - 1] = 1.0;
  rhs[n - 1] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_.assign(n, 0.0);
  m_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];

  cumulative_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = r_[i + 1] - r_[i];
    cumulative_[i + 1] =
        cumulative_[i] + 0.5 * h * (phi_[i] + phi_[i + 1]) - h * h * h * (m_[i] + m_[i + 1]) / 24.0;
  }

  int positive = 0, negative = 0;
  for (int k = 1; k <= 400; ++k) {
    const double kk = gaussian_curvature(r_.back() * k / 400.0);
    if (kk > 1e-12) ++positive;
    if (kk < -1e-12) ++negative;
  }
  sign_ = negative == 0 ? CurvatureSign::NonNegative
                        : (positive == 0 ? CurvatureSign::NonPositive : CurvatureSign::Mixed);
}

TabulatedProfile TabulatedProfile::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open warp profile CSV " + path.string());
  std::vector<double> r, phi;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double a = 0.0, b = 0.0;
    if (!(fields >> a >> b)) {
      if (r.empty()) continue;  // header
      throw Error(ErrorCode::InvalidArgument, "malformed warp profile line: " + line);
    }
    r.push_back(a);
    phi.push_back(b);
  }
  return TabulatedProfile(std::move(r), std::move(phi));
}

std::size_t TabulatedProfile::segment(double r) const {
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  return std::min(i, r_.size() - 2);
}

double TabulatedProfile::value(double r) const {
  const std::size_t i = segment(r);
  const double h = r_[i + 1] - r_[i];
  const double a = (r_[i + 1] - r) / h, b = (r - r_[i]) / h;
  return a * phi_[i] + b * phi_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double TabulatedProfile::slope(double r) const {
  const std::size_t i = segment(r);
  const double h = r_[i + 1] - r_[i];
  const double a = (r_[i + 1] - r) / h, b = (r - r_[i]) / h;
  return (phi_[i + 1] - phi_[i]) / h - (3.0 * a * a - 1.0) * h * m_[i] / 6.0 +
         (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
}

double TabulatedProfile::second(double r) const {
  const std::size_t i = segment(r);
  const double h = r_[i + 1] - r_[i];
  const double a = (r_[i + 1] - r) / h, b = (r - r_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

double TabulatedProfile::integral(double r) const {
  const std::size_t i = segment(r);
  const double h = r_[i + 1] - r_[i];
  const double t = r - r_[i];
  // Integral of the spline segment from r_i to r.
  const double b = t / h;
  const double a0 = 1.0;
  const double int_a = h * (a0 * b - 0.5 * b * b);  // integral of a = 1 - b
  const double int_b = h * 0.5 * b * b;
  // integral of (a^3 - a) and (b^3 - b) in terms of b
  const double one_minus = 1.0 - b;
  const double int_a3a = h * ((1.0 - std::pow(one_minus, 4)) / 4.0 - (1.0 - one_minus * one_minus) / 2.0);
  const double int_b3b = h * (std::pow(b, 4) / 4.0 - b * b / 2.0);
  return cumulative_[i] + int_a * phi_[i] + int_b * phi_[i + 1] + (int_a3a * m_[i] + int_b3b * m_[i + 1]) * h * h / 6.0;
}

double TabulatedProfile::gaussian_curvature(double r) const {
  const double rr = std::max(r, 1e-6);
  return -second(rr) / value(rr);
}

nlohmann::json TabulatedProfile::descriptor() const {
  return {{"kind", "warped_tabulated"}, {"samples", r_.size()}, {"r_max", r_.back()}};
}

// ---------------------------------------------------------------------------

bool curvature_sign_consistent(const WarpProfile& profile, double r_max, int samples, double slack) {
  const CurvatureSign declared = profile.declared_sign();
  for (int k = 0; k < samples; ++k) {
    const double r = r_max * k / (samples - 1);
    const double kk = profile.gaussian_curvature(r);
    if (declared == CurvatureSign::NonNegative && kk < -slack) return false;
    if (declared == CurvatureSign::NonPositive && kk > slack) return false;
  }
  return true;
}

}  // namespace isodiam
