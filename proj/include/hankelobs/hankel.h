#pragma once

#include <memory>

#include "hankelobs/grid.h"
#include "hankelobs/types.h"

namespace hankelobs {

/// Dense quadrature discretization of F_ν f(x) = ∫ √(xy) J_ν(xy) f(y) dy,
/// K[i,j] = √(x_i x_j) J_ν(x_i x_j) w_j on a single grid.
class HankelOperator {
 public:
  /// Throws std::length_error for n > 16384.
  static std::shared_ptr<const HankelOperator> build(double nu, GridPtr grid);

  double nu() const { return nu_; }
  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const RealMatrix& kernel() const { return kernel_; }

  ComplexVector apply(const Eigen::Ref<const ComplexVector>& v) const;
  /// K·V, all columns in one product.
  ComplexMatrix apply_columns(const Eigen::Ref<const ComplexMatrix>& v) const;

 private:
  HankelOperator(double nu, GridPtr grid, RealMatrix kernel)
      : nu_(nu), grid_(std::move(grid)), kernel_(std::move(kernel)) {}
  double nu_;
  GridPtr grid_;
  RealMatrix kernel_;
};

using HankelPtr = std::shared_ptr<const HankelOperator>;

/// build() memoized on (ν, n, x_max, rule) while some caller holds the result.
HankelPtr hankel_operator(double nu, const GridPtr& grid);

GridFunction forward(const HankelOperator& op, const GridFunction& f);

/// ‖F(F f) − f‖ / ‖f‖, 0 for f = 0.
double involution_defect(const HankelOperator& op, const GridFunction& f);

/// H_ν g = x^{−ν−½} F_ν(y^{ν+½} g).
GridFunction modified_forward(const HankelOperator& op, const GridFunction& g);

/// Σ_j √(p y_j) J_ν(p y_j) w_j f_j at arbitrary targets p, for node sets that
/// are not a RadialGrid.
ComplexVector hankel_at(double nu, const RealVector& nodes,
                        const RealVector& weights, const ComplexVector& values,
                        const RealVector& targets);

}  // namespace hankelobs
