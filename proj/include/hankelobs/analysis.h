#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hankelobs/grid.h"
#include "hankelobs/hankel.h"
#include "hankelobs/report.h"

namespace hankelobs {

/// Parameters shared by the verifiers. Each verifier reads only the fields
/// its inequality mentions and validates those.
struct VerificationSpec {
  double nu = 0.0;
  IntervalSet A;
  IntervalSet B;
  double S = 0.0;
  double T = 1.0;
  double lambda = 1.0;  // λ, or λ₁ in T8
  double lambda2 = 1.0;
  double beta = 2.0;
  double gamma = 0.5;
  double b = 1.0;
  double N = 1.0;
  double epsilon = 0.5;
  double r = 1.0;
};

/// The small-set explicit constant was requested outside its regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One member of a family, with the inequality's right-hand side as a
/// function of the unknown constant C (and θ where the form has one).
/// log_rhs must be nondecreasing in C >= 0.
struct InequalityInstance {
  std::string name;
  std::string form;
  double nu = 0.0;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  bool uses_theta = false;
  // Printed constant, when the inequality has one; then no fitting happens.
  std::optional<double> fixed_constant;
  std::function<double(double C, double theta)> log_rhs;
  // Right-hand side with the constant-dependent factors removed.
  std::function<double(double theta)> log_base;
  int grid_n = 0;
  double grid_x_max = 0.0;
  std::vector<std::string> flags;
};

/// Smallest C >= 0 with rhs(C, θ) >= lhs as computed; +inf if none below
/// 1e300.
double implied_constant(const InequalityInstance& inst, double theta);

/// θ from {0.05, 0.10, ..., 0.95} when the form has one; C is the largest
/// implied constant over the family, and the θ with the smallest C wins.
ConstantEstimate fit_constant(const std::vector<InequalityInstance>& family);

/// Report at the given estimate (ignored for fixed-constant instances).
InequalityReport evaluate(const InequalityInstance& inst,
                          const ConstantEstimate& estimate,
                          std::uint64_t seed = 0);
/// Fixed constant, or a fit on {inst} alone.
InequalityReport evaluate(const InequalityInstance& inst,
                          std::uint64_t seed = 0);

struct FamilyCertificate {
  ConstantEstimate estimate;
  std::vector<InequalityReport> reports;
  bool passed = false;
};

/// Fits (unless the constant is printed) and evaluates every member.
FamilyCertificate certify(const std::vector<InequalityInstance>& family,
                          std::uint64_t seed);

/// |C₁ − C₂| / max(C₁, C₂), 0 when both vanish.
double fit_spread(const ConstantEstimate& a, const ConstantEstimate& b);

/// 1 + (|x₀ − x₁| + a/2 + b/2) / (scale ∧ b/2) for A = [a₁, a₂] with centre
/// x₀ and length a, B likewise.
double interpolation_exponent(const Interval& A, const Interval& B,
                              double scale);

/// u(t) by the chirp route; t = 0 returns u0.
ComplexVector evolve_for_analysis(const HankelOperator& op, double t,
                                  const ComplexVector& u0);

// Uncertainty principle ‖f‖ <= C(‖f‖_{A^c} + ‖F_ν f‖_{B^c}), unsquared.
// The explicit constant 1 + 1/(1 − k_ν√(2π|A||B|)) applies when
// k_ν√(2π|A||B|) < 1; otherwise C is fitted.
InequalityInstance uncertainty_instance(double nu, const IntervalSet& A,
                                        const IntervalSet& B,
                                        const GridFunction& f);
InequalityReport verify_uncertainty(double nu, const IntervalSet& A,
                                    const IntervalSet& B, const GridFunction& f);

enum class TwoPointCase {
  kHalfInteger,  // C e^{C μ_ν(A)μ_ν(B)/(T−S)^{2ν+2}}
  kSmallSet,     // printed constant, π|A||B| < C_ν(T−S)
  kHalfLines,    // A = [0, a], B = [0, b]: C e^{C(1 + ab/(T−S))}
};

/// ‖u0‖² <= const·(∫_{A^c}|u(S)|² + ∫_{B^c}|u(T)|²).
/// Throws RegimeError for kSmallSet outside its regime.
InequalityInstance two_point_instance(const VerificationSpec& spec,
                                      TwoPointCase which,
                                      const GridFunction& u0);
InequalityReport verify_two_point(const VerificationSpec& spec,
                                  TwoPointCase which, const GridFunction& u0);

struct TimeQuadrature {
  int nodes = 33;  // odd, Simpson
};

/// ‖u0‖² <= C(1+1/T)e^{Cr²(1+1/T)} ∫₀^T ∫_{[0,r]^c}|u|², space-time
/// integral by Simpson in t and the grid rule in x, spectral route.
InequalityInstance time_interval_instance(double nu, double r, double T,
                                          const GridFunction& u0,
                                          TimeQuadrature quadrature = {});
InequalityReport verify_time_interval(double nu, double r, double T,
                                      const GridFunction& u0);

enum class T3Variant { kExponential, kSuperExponential };

/// (i): exponential weight e^{λx}, (θ, C) fitted.
/// (ii): weight e^{λx^β} with the given γ, C fitted.
InequalityInstance t3_instance(const VerificationSpec& spec,
                               const GridFunction& u0, T3Variant variant);
InequalityReport verify_t3(const VerificationSpec& spec, const GridFunction& u0,
                           T3Variant variant);

/// ∫_A|u(T)|² against ∫_B|u(T)|² and ∫e^{λx}|u0|², A and B single intervals.
InequalityInstance t4_instance(const VerificationSpec& spec,
                               const GridFunction& u0);
InequalityReport verify_t4(const VerificationSpec& spec, const GridFunction& u0);

/// ‖u0‖² <= e^{C(1+bN/T)} ∫_{[0,b]^c}|u(T)|² for supp u0 ⊂ [0, N].
InequalityInstance t5_instance(const VerificationSpec& spec,
                               const GridFunction& u0);
InequalityReport verify_t5(const VerificationSpec& spec, const GridFunction& u0);

/// ∫e^{−λ₂x}|u(T)|² against ε∫e^{λ₁x}|u0|² and the ε-weighted B term.
InequalityInstance t8_instance(const VerificationSpec& spec,
                               const GridFunction& u0);
InequalityReport verify_t8(const VerificationSpec& spec, const GridFunction& u0);

/// ‖u0‖² against ε(W + ‖u0‖²_{H^{4K}} + ∫x^{−4K}|u0|²) + εe^{ε^{−2}}∫_B|u(T)|²,
/// K = [ν] + 3. Requires ε >= 0.15 and u0 vanishing near 0.
InequalityInstance t9_instance(const VerificationSpec& spec,
                               const GridFunction& u0);
InequalityReport verify_t9(const VerificationSpec& spec, const GridFunction& u0);

/// Interpolation forms for f with compactly supported transform. A, B single
/// intervals (L7); b and N from spec (C1, C2).
InequalityInstance l7_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform);
InequalityInstance c1_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform);
InequalityInstance c2_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform);

struct InterpolationReports {
  InequalityReport l7;
  InequalityReport c1;
  InequalityReport c2;
};
InterpolationReports verify_interpolation(const VerificationSpec& spec,
                                          const GridFunction& f,
                                          const GridFunction& transform);

enum class SummationVariant { kExponential, kPower };

struct SummationParams {
  double x = 0.5;
  double theta = 0.5;
  double a = 1.0;        // kExponential
  double epsilon = 1.0;  // kPower
  double alpha = 1.0;    // kPower
};

/// Σ_{k>=1} x^{θ^k} e^{−ak} or Σ_{k>=1} x^{θ^k} k^{−1−ε} against the closed
/// forms. The exponential series is truncated once the tail is below 1e-14;
/// the power series adds an upper bound for its tail, so lhs never
/// undercounts.
InequalityReport lr_bound_check(SummationVariant variant,
                                const SummationParams& params);

}  // namespace hankelobs
