#include "threadtrace/spline.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>

namespace threadtrace {

ThreadSpline::ThreadSpline(std::vector<double> knots, std::vector<CubicPiece> cx, std::vector<CubicPiece> cy)
    : knots_(std::move(knots)), cx_(std::move(cx)), cy_(std::move(cy)) {
  if (knots_.size() < 2 || cx_.size() + 1 != knots_.size() || cy_.size() != cx_.size()) {
    throw ArgumentError("spline needs n knots and n-1 pieces per coordinate");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw ArgumentError("spline knots must be strictly increasing");
  }
}

std::size_t ThreadSpline::interval(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - knots_.begin()) - 1));
  return std::min(idx, cx_.size() - 1);
}

namespace {

double eval(const CubicPiece& c, double u) { return c[0] + u * (c[1] + u * (c[2] + u * c[3])); }
double eval_d1(const CubicPiece& c, double u) { return c[1] + u * (2.0 * c[2] + 3.0 * u * c[3]); }
double eval_d2(const CubicPiece& c, double u) { return 2.0 * c[2] + 6.0 * u * c[3]; }

// Exact integral of (2c + 6du)^2 over [0, h].
double squared_d2_integral(const CubicPiece& c, double h) {
  const double p = 2.0 * c[2], q = 6.0 * c[3];
  return p * p * h + p * q * h * h + q * q * h * h * h / 3.0;
}

}  // namespace

Vec2 ThreadSpline::evaluate(double t) const {
  const std::size_t i = interval(t);
  const double u = t - knots_[i];
  return {eval(cx_[i], u), eval(cy_[i], u)};
}

Vec2 ThreadSpline::derivative(double t) const {
  const std::size_t i = interval(t);
  const double u = t - knots_[i];
  return {eval_d1(cx_[i], u), eval_d1(cy_[i], u)};
}

Vec2 ThreadSpline::second_derivative(double t) const {
  const std::size_t i = interval(t);
  const double u = t - knots_[i];
  return {eval_d2(cx_[i], u), eval_d2(cy_[i], u)};
}

double ThreadSpline::roughness() const {
  double total = 0.0;
  for (std::size_t i = 0; i < cx_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    total += squared_d2_integral(cx_[i], h) + squared_d2_integral(cy_[i], h);
  }
  return total;
}

namespace {

// Reinsch smoothing spline on knots `arc` (pixel arclength). With lambda = 0
// this reduces to the natural interpolating spline. Returns pieces in the
// arclength variable.
std::vector<CubicPiece> smoothing_pieces(const std::vector<double>& arc, const std::vector<double>& values,
                                         double lambda) {
  const std::size_t n = arc.size();
  const std::size_t m = n - 2;  // interior knots
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = arc[i + 1] - arc[i];

  // Q: n x m second-difference operator, R: m x m tridiagonal Gram matrix.
  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> qt, rt;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = j + 1;
    qt.emplace_back(i - 1, j, 1.0 / h[i - 1]);
    qt.emplace_back(i, j, -1.0 / h[i - 1] - 1.0 / h[i]);
    qt.emplace_back(i + 1, j, 1.0 / h[i]);
    rt.emplace_back(j, j, (h[i - 1] + h[i]) / 3.0);
    if (j + 1 < m) {
      rt.emplace_back(j, j + 1, h[i] / 6.0);
      rt.emplace_back(j + 1, j, h[i] / 6.0);
    }
  }
  Sparse q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  Sparse r(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  q.setFromTriplets(qt.begin(), qt.end());
  r.setFromTriplets(rt.begin(), rt.end());

  const Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(n));
  Sparse system = r;
  if (lambda > 0.0) system += lambda * Sparse(q.transpose() * q);
  Eigen::SimplicialLDLT<Sparse> solver(system);
  if (solver.info() != Eigen::Success) throw ArgumentError("spline system is singular");
  const Eigen::VectorXd rhs = q.transpose() * y;
  const Eigen::VectorXd gamma_inner = solver.solve(rhs);
  Eigen::VectorXd fitted = y;
  if (lambda > 0.0) fitted -= lambda * (q * gamma_inner);

  std::vector<double> gamma(n, 0.0);  // second derivatives at knots
  for (std::size_t j = 0; j < m; ++j) gamma[j + 1] = gamma_inner[static_cast<Eigen::Index>(j)];

  std::vector<CubicPiece> pieces(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a0 = fitted[static_cast<Eigen::Index>(i)];
    const double a1 = fitted[static_cast<Eigen::Index>(i + 1)];
    pieces[i] = {a0, (a1 - a0) / h[i] - h[i] * (2.0 * gamma[i] + gamma[i + 1]) / 6.0, 0.5 * gamma[i],
                 (gamma[i + 1] - gamma[i]) / (6.0 * h[i])};
  }
  return pieces;
}

// Re-express a piece in t = arc / length.
CubicPiece rescale(const CubicPiece& c, double length) {
  return {c[0], c[1] * length, c[2] * length * length, c[3] * length * length * length};
}

}  // namespace

ThreadSpline fit_spline(std::span<const Vec2> points, double smoothing) {
  if (points.size() < 4) throw ArgumentError("spline fit needs at least 4 points, got " + std::to_string(points.size()));
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw ArgumentError("smoothing must be finite and >= 0");
  std::vector<double> arc(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double step = distance(points[i - 1], points[i]);
    if (!(step > 0.0)) {
      throw ArgumentError("points " + std::to_string(i - 1) + " and " + std::to_string(i) + " coincide");
    }
    arc[i] = arc[i - 1] + step;
  }
  const double length = arc.back();
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const Vec2& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const std::vector<CubicPiece> px = smoothing_pieces(arc, xs, smoothing);
  const std::vector<CubicPiece> py = smoothing_pieces(arc, ys, smoothing);

  std::vector<double> knots(points.size());
  for (std::size_t i = 0; i < arc.size(); ++i) knots[i] = arc[i] / length;
  knots.back() = 1.0;
  std::vector<CubicPiece> cx, cy;
  cx.reserve(px.size());
  cy.reserve(py.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    cx.push_back(rescale(px[i], length));
    cy.push_back(rescale(py[i], length));
  }
  return ThreadSpline(std::move(knots), std::move(cx), std::move(cy));
}

ThreadSpline fit_spline(const OrderedThreadPoints& points, double smoothing) {
  Polyline positions;
  positions.reserve(points.points.size());
  for (const LinePoint& p : points.points) positions.push_back(p.position);
  return fit_spline(positions, smoothing);
}

Polyline sample(const ThreadSpline& spline, int n) {
  if (n < 2) throw ArgumentError("sample count must be >= 2");
  if (spline.empty()) throw ArgumentError("cannot sample an empty spline");
  Polyline out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(spline.evaluate(static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace threadtrace
