#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hankelobs/grid.h"
#include "hankelobs/hankel.h"

namespace hankelobs {

struct EvolutionConfig {
  double nu = 0.0;
  GridPtr grid;
  double t = 0.0;
};

/// Chirp route asked for a time below the grid's resolution floor.
class ResolutionError : public std::domain_error {
 public:
  ResolutionError(double t, double min_t);
  double min_t() const { return min_t_; }

 private:
  double min_t_;
};

/// Smallest t with Δx·x_max/(2t) <= π.
double min_admissible_time(const RadialGrid& grid);

/// u(t,x) = (2t)^{−½} e^{−i(ν+1)π/2} e^{ix²/4t} F_ν(e^{iy²/4t} u0)(x/2t),
/// with the transform interpolated (cubic) at x/2t. Samples whose argument
/// lies beyond the transform grid are 0.
GridFunction evolve_chirp(const EvolutionConfig& cfg, const GridFunction& u0);
ComplexVector evolve_chirp(const HankelOperator& op, double t,
                           const Eigen::Ref<const ComplexVector>& u0);

/// e^{−itH} = F_ν e^{−itp²} F_ν; any real t.
GridFunction evolve_spectral(const EvolutionConfig& cfg,
                             const GridFunction& u0);
ComplexVector evolve_spectral(const HankelOperator& op, double t,
                              const Eigen::Ref<const ComplexVector>& u0);
/// Columns of u0 evolved together.
ComplexMatrix evolve_spectral_columns(const HankelOperator& op, double t,
                              const Eigen::Ref<const ComplexMatrix>& u0);

/// Chirp identity evaluated pointwise: u(t, x_i) for data given on arbitrary
/// quadrature nodes (nodes, weights) and arbitrary output points.
ComplexVector evolve_chirp_at(double nu, double t, const RealVector& nodes,
                              const RealVector& weights,
                              const ComplexVector& u0,
                              const RealVector& targets);

/// ∫ x^{2k} |f|², k <= 8.
double moment(const GridFunction& f, int k);

/// Σ_{m<=order} ‖∂^m f‖² by repeated finite differences on a stride-coarsened
/// copy of f (spacing near 0.1), so that rounding amplified by h^{−m} stays
/// below the signal.
double sobolev_norm_sq_proxy(const GridFunction& f, int order);

/// moment(u(T), k) / [(T+1/T)^{2k} (‖u0‖²_{H^{4k}} + ∫x^{8k}|u0|² +
/// ∫x^{−4k}|u0|²)] for each T, with u(T) from the spectral route.
std::vector<double> moment_bound_ratio(double nu, int k,
                                       const GridFunction& u0,
                                       const std::vector<double>& T_list);

}  // namespace hankelobs
