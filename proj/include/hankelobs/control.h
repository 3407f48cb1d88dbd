#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hankelobs/grid.h"
#include "hankelobs/hankel.h"
#include "hankelobs/report.h"

namespace hankelobs {

/// At t = time the state jumps u ↦ u − iχ_mask f.
struct Impulse {
  double time = 0.0;
  IntervalSet mask;  // where the control acts
};

struct CgOptions {
  int max_iter = 2000;
  double tol = 1e-13;  // on ‖r‖/‖b‖
};

struct ControlProblem {
  double nu = 0.0;
  GridFunction u0;
  GridFunction uT;
  std::vector<Impulse> impulses;  // strictly increasing times in [0, T]
  double T = 1.0;
  double epsilon = 1e-6;
  // Target agreement required on [0, N] only.
  std::optional<double> target_N;
  CgOptions cg;
};

struct ControlSolution {
  std::vector<GridFunction> controls;
  GridFunction achieved;
  double cost = 0.0;  // Σ‖f_i‖²
  // ‖achieved − uT‖, on [0, N] when the target is truncated.
  double residual = 0.0;
  // ‖uT − e^{−iTH}u0‖, same region as the residual.
  double rhs_norm = 0.0;
  double relative_residual = 0.0;
  double gramian_condition = 0.0;  // Lanczos estimate for the CG operator
  int iterations = 0;
  // Residual within 1e-3 of the gap (exact-type problems), or the functional
  // within its bound (weighted problem).
  bool passed = false;
  // Named extra quantities (functional terms, bounds, exponents).
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::string> flags;

  double term(const std::string& name) const;
};

/// CG stalled; what() carries the condition estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// control_refs name the files holding the controls, if they were written.
Json to_json(const ControlSolution& solution,
             const std::vector<std::string>& control_refs = {});

/// Free flow between impulse times and the final time; spectral route,
/// U(0) = Id. With no controls this is the reference e^{−iTH}u0.
GridFunction forward_controlled(const ControlProblem& problem,
                                const std::vector<GridFunction>& controls);

/// The reachable-set Gramian Λ = Σ L_i L_i*, L_i f = (flow from t_i to T)
/// χ_i f. Self-adjoint and nonnegative in the grid inner product.
class Gramian {
 public:
  explicit Gramian(const ControlProblem& problem);

  ComplexVector apply(const ComplexVector& g) const;
  /// χ_i (flow from T back to t_i) g, one per impulse.
  std::vector<ComplexVector> observe(const ComplexVector& g) const;
  /// Σ L_i h_i.
  ComplexVector synthesize(const std::vector<ComplexVector>& h) const;
  /// Dense matrix of apply, column j = apply(e_j).
  ComplexMatrix assemble() const;

  const RadialGrid& grid() const { return op_->grid(); }

 private:
  ComplexVector flow(double t, const ComplexVector& v) const;

  HankelPtr op_;
  std::vector<double> times_;
  std::vector<RealVector> masks_;
  double T_;
};

/// Grid inner product Σ w_j conj(a_j) b_j.
Complex inner(const RadialGrid& grid, const ComplexVector& a,
              const ComplexVector& b);

/// Two impulses: (Λ + ε)g = uT − e^{−iTH}u0 by CG, f_i = iχ_i ψ(t_i) with
/// ψ the backward flow of g. Residual ε‖g‖ up to rounding.
ControlSolution solve_two_impulse(const ControlProblem& problem);

/// Same solve with a dense LU of Λ + ε (oracle for small n).
ControlSolution solve_two_impulse_dense(const ControlProblem& problem);

struct WeightedControlParams {
  double lambda = 1.0;  // target metric e^{−λx}
  // θ and C of the exponential-weight inequality; q = θ^{1+b/(λ(T−s))}.
  double theta = 0.5;
  double C = 1.0;
  // CG stops at this relative gradient norm. The normal equations are about
  // as ill-conditioned as α = ε^{(1−q)/q} is small, but every CG iterate
  // minimizes the functional over its Krylov space, so the functional is
  // settled long before the gradient vanishes.
  double gradient_tol = 1e-4;
};

/// One impulse at s on [0, b]^c. Minimizes
/// ε^{(1−q)/q}‖f‖² + ε^{−1}∫e^{−λx}|u(T) − uT|² (normal equations by CG) and
/// reports both terms against C(1 + b^{2ν+2}/(λ(T−s))^{2ν+2})‖uT − e^{−iTH}u0‖².
ControlSolution solve_epsilon_weighted(const ControlProblem& problem,
                                       const WeightedControlParams& params);

/// One impulse at s, target on [0, N]: (PΛP + ε)g = P(uT − e^{−iTH}u0).
/// With C given, also reports e^{C(1+bN/(T−s))} for the cost.
ControlSolution solve_truncated_target(const ControlProblem& problem,
                                       std::optional<double> C = std::nullopt);

/// Penalized objective Σ‖f_i‖² + ε^{−1}‖u(T; f) − uT‖² (on [0, N] when
/// truncated), minimized by the HUM controls.
double penalized_objective(const ControlProblem& problem,
                           const std::vector<GridFunction>& controls);

}  // namespace hankelobs
