#pragma once

#include <utility>
#include <vector>

namespace hankelobs {

/// Bessel function of the first kind J_ν(x) for real order ν >= 0 and x >= 0.
double bessel_j(double nu, double x);

/// J_ν(z)/z^ν, finite at z = 0 where it equals 1/(2^ν Γ(ν+1)).
double bessel_j_scaled(double nu, double z);

/// Γ(x) for x > 0. Throws std::domain_error otherwise.
double gamma(double x);

/// Constant k with |J_ν(x)| <= k x^{-1/2} for all x > 0.
double k_nu(double nu);

/// Smallness threshold of the two-point explicit constant,
/// (2Γ(2ν)/Γ(ν+½) + 2^{ν+1})^{-2}; equals k_nu(ν)^{-2} for ν > ½.
double c_nu(double nu);

/// k-th x-derivative of J_ν(xy)/(xy)^ν by a 4th-order central stencil with
/// step 1e-4·x.
double kernel_derivative_fd(double nu, int k, double x, double y);

/// True iff |∂_x^k (J_ν(xy)/(xy)^ν)| <= y^k + 1e-5 at every (x, y) sample.
bool kernel_derivative_bound_check(
    double nu, int k, const std::vector<std::pair<double, double>>& samples);

namespace internal {

// Branches of bessel_j, exposed for the overlap tests.
double bessel_j_series(double nu, double x);
double bessel_j_asymptotic(double nu, double x);
// Smallest x at which bessel_j uses the asymptotic branch.
double bessel_switch_point(double nu);

}  // namespace internal
}  // namespace hankelobs
