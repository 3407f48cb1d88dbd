#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hankelobs/report.h"
#include "hankelobs/types.h"

namespace hankelobs {

enum class Quadrature {
  // Uniform weights x_max/n.
  kMidpoint,
  // Midpoint weights with Euler-Maclaurin corrections on the first six
  // nodes, exact for y^0..y^5 at the origin end. Integrands such as
  // √(xy)J_0(xy)·y^{1/2}g(y) have a nonzero slope at 0, where the plain
  // midpoint rule is only second order.
  kOriginCorrected,
};

/// Truncated half-line (0, x_max] with midpoint nodes (i−½)·x_max/n.
class RadialGrid {
 public:
  RadialGrid(int n, double x_max, Quadrature rule);

  int n() const { return n_; }
  double x_max() const { return x_max_; }
  double spacing() const { return x_max_ / n_; }
  Quadrature rule() const { return rule_; }
  const RealVector& nodes() const { return nodes_; }
  const RealVector& weights() const { return weights_; }

  bool same_as(const RadialGrid& other) const;

 private:
  int n_;
  double x_max_;
  Quadrature rule_;
  RealVector nodes_;
  RealVector weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Rejects n < 16 or x_max <= 0.
GridPtr make_grid(int n, double x_max,
                  Quadrature rule = Quadrature::kOriginCorrected);

/// Samples of a function on a RadialGrid.
template <typename Scalar>
class BasicGridFunction {
 public:
  using VectorType = Vector<Scalar>;

  explicit BasicGridFunction(GridPtr grid)
      : grid_(std::move(grid)), values_(VectorType::Zero(grid_->n())) {}

  BasicGridFunction(GridPtr grid, VectorType values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->n()) {
      throw std::invalid_argument("grid function length " +
                                  std::to_string(values_.size()) +
                                  " does not match grid size " +
                                  std::to_string(grid_->n()));
    }
  }

  template <typename F>
  static BasicGridFunction sample(GridPtr grid, F&& f) {
    VectorType v(grid->n());
    for (int i = 0; i < grid->n(); ++i) v[i] = f(grid->nodes()[i]);
    return BasicGridFunction(std::move(grid), std::move(v));
  }

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const VectorType& values() const { return values_; }
  VectorType& mutable_values() { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  GridPtr grid_;
  VectorType values_;
};

using GridFunction = BasicGridFunction<Complex>;
using RealGridFunction = BasicGridFunction<double>;

void require_same_grid(const RadialGrid& a, const RadialGrid& b);

struct Interval {
  double a;
  double b;
};

/// Finite union of disjoint intervals in [0, ∞). Membership is half-open:
/// x belongs to [a, b] iff a <= x < b, so a set and its complement tile.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  /// Pairs consecutive endpoints: {a1, b1, a2, b2, ...}.
  static IntervalSet from_endpoints(const std::vector<double>& endpoints);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool bounded() const;
  bool contains(double x) const;
  double measure() const;
  /// Complement in [0, ∞); the last piece is unbounded.
  IntervalSet complement() const;
  /// 1 on nodes inside the set, 0 elsewhere.
  RealVector indicator(const RadialGrid& grid) const;
  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;
};

/// ∫ density dx by the grid quadrature.
template <typename Derived>
double integrate(const RadialGrid& grid,
                 const Eigen::MatrixBase<Derived>& density) {
  return grid.weights().dot(density.template cast<double>());
}

template <typename Scalar>
double l2_norm_sq(const BasicGridFunction<Scalar>& f) {
  return integrate(f.grid(), f.values().cwiseAbs2());
}

template <typename Scalar>
double l2_norm_sq(const BasicGridFunction<Scalar>& f, const IntervalSet& on) {
  return integrate(f.grid(),
                   f.values().cwiseAbs2().cwiseProduct(on.indicator(f.grid())));
}

/// μ_ν(A) = ∫_A x^{2ν+1} dx in closed form. Rejects unbounded sets.
double mu_nu_measure(const IntervalSet& set, double nu);

/// Weights for weighted_l2_norm_sq.
class Weight {
 public:
  static Weight exp_linear(double lambda);          // e^{λx}
  static Weight exp_power(double lambda, double beta);  // e^{λx^β}
  static Weight exp_decay(double lambda);           // e^{−λx}
  static Weight power(int k);                       // x^{2k}
  static Weight inverse_power(int k);               // x^{−2k}

  double log_value(double x) const;
  double operator()(double x) const { return std::exp(log_value(x)); }

 private:
  enum class Kind { kExpLinear, kExpPower, kExpDecay, kPower, kInversePower };
  Weight(Kind kind, double lambda, double beta, int k)
      : kind_(kind), lambda_(lambda), beta_(beta), k_(k) {}
  Kind kind_;
  double lambda_;
  double beta_;
  int k_;
};

/// ∫ weight·|f|². Throws std::range_error when weight·|f|² overflows at a node.
double weighted_l2_norm_sq(const GridFunction& f, const Weight& weight);

/// 4th-order central differences, one-sided 4th-order stencils at the ends.
template <typename Scalar>
BasicGridFunction<Scalar> derivative(const BasicGridFunction<Scalar>& f) {
  const int n = f.size();
  const double h = f.grid().spacing();
  const auto& v = f.values();
  Vector<Scalar> d(n);
  for (int i = 2; i < n - 2; ++i) {
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  }
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] -
          3.0 * v[4]) / (12.0 * h);
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) /
         (12.0 * h);
  d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] -
              16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * h);
  d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] +
              6.0 * v[n - 4] - v[n - 5]) / (12.0 * h);
  return BasicGridFunction<Scalar>(f.grid_ptr(), std::move(d));
}

/// Fraction of ‖f‖² carried by the last 5% of nodes (0 for f = 0).
double boundary_mass_fraction(const GridFunction& f);
/// Fraction of ‖f‖² carried by the first 5% of nodes (0 for f = 0).
double origin_mass_fraction(const GridFunction& f);
/// Band-limited convention: mass within 5% of either grid end <= 1e-8.
bool band_limited(const GridFunction& f);
/// True when |f| exceeds tol·max|f| on the two outermost nodes at either end.
bool touches_boundary(const GridFunction& f, double tol = 1e-8);

/// ¼∫|u|²/x² <= ∫|u′|², passed with relative slack 1e-6.
InequalityReport hardy_check(const GridFunction& u);

/// CSV with header "x,re,im".
void write_csv(std::ostream& out, const GridFunction& f);
/// Reads CSV written by write_csv; the grid is rebuilt from the node spacing.
GridFunction read_csv(std::istream& in,
                      Quadrature rule = Quadrature::kOriginCorrected);
Json to_json(const GridFunction& f);
GridFunction grid_function_from_json(
    const Json& j, Quadrature rule = Quadrature::kOriginCorrected);

}  // namespace hankelobs
