#include "hankelobs/specfun.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hankelobs {
namespace {

// Double-double arithmetic for the power series. The alternating series for
// J_ν(x) cancels terms of size ~I_ν(x), so plain double loses ~x/2.3 digits.
struct DD {
  double hi;
  double lo;
};

DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DD quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

DD add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  DD t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

DD mul(DD a, DD b) {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p) + (a.hi * b.lo + a.lo * b.hi);
  return quick_two_sum(p, e);
}

DD div(DD a, DD b) {
  const double q1 = a.hi / b.hi;
  DD r = add(a, mul(b, {-q1, 0.0}));
  const double q2 = r.hi / b.hi;
  r = add(r, mul(b, {-q2, 0.0}));
  const double q3 = r.hi / b.hi;
  return add(quick_two_sum(q1, q2), {q3, 0.0});
}

void check_order(double nu) {
  if (!(nu >= 0.0)) {
    throw std::domain_error("order nu must be >= 0, got " + std::to_string(nu));
  }
}

// Σ_k (−q)^k / (k! (ν+1)_k) with q = z²/4, summed in double-double.
double scaled_series_sum(double nu, double z) {
  const DD q = mul(two_sum(0.5 * z, 0.0), two_sum(0.5 * z, 0.0));
  DD term{1.0, 0.0};
  DD sum{1.0, 0.0};
  for (int k = 1; k < 500; ++k) {
    const DD denom = mul(two_sum(static_cast<double>(k), 0.0),
                         two_sum(static_cast<double>(k), nu));
    term = div(mul(term, q), denom);
    term = {-term.hi, -term.lo};
    sum = add(sum, term);
    if (k > 0.5 * z &&
        std::abs(term.hi) < 1e-34 * std::max(std::abs(sum.hi), 1e-300)) {
      break;
    }
  }
  return sum.hi + sum.lo;
}

}  // namespace

namespace internal {

double bessel_switch_point(double nu) { return std::max(18.0, nu * nu); }

double bessel_j_series(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const long double prefactor =
      std::exp(static_cast<long double>(nu) * std::log(0.5L * x) -
               std::lgamma(static_cast<long double>(nu) + 1.0L));
  return static_cast<double>(prefactor * scaled_series_sum(nu, x));
}

double bessel_j_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double a = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (8.0 * k * x);
    if (a == 0.0) break;
    const double mag = std::abs(a);
    // Stop at the smallest term once the series has started to converge.
    if (mag > last && last < 1.0) break;
    last = mag;
    switch (k % 4) {
      case 1: q += a; break;
      case 2: p -= a; break;
      case 3: q -= a; break;
      case 0: p += a; break;
    }
    if (mag < 1e-17 * (std::abs(p) + std::abs(q))) break;
  }
  // cos(x − φ), sin(x − φ) with φ = (ν/2 + 1/4)π, expanded so that the large
  // argument is reduced by libm rather than after a rounded subtraction.
  const double phi = (0.5 * nu + 0.25) * std::numbers::pi;
  const double cx = std::cos(x);
  const double sx = std::sin(x);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double cw = cx * cp + sx * sp;
  const double sw = sx * cp - cx * sp;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cw - q * sw);
}

}  // namespace internal

double bessel_j(double nu, double x) {
  check_order(nu);
  if (!(x >= 0.0)) {
    throw std::domain_error("bessel_j requires x >= 0");
  }
  if (x < internal::bessel_switch_point(nu)) {
    return internal::bessel_j_series(nu, x);
  }
  return internal::bessel_j_asymptotic(nu, x);
}

double bessel_j_scaled(double nu, double z) {
  check_order(nu);
  if (z < 1.0) {
    return std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0)) *
           scaled_series_sum(nu, z);
  }
  return bessel_j(nu, z) / std::pow(z, nu);
}

double gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("gamma requires x > 0");
  }
  return std::tgamma(x);
}

double k_nu(double nu) {
  check_order(nu);
  if (nu > 0.5) {
    return 2.0 * (gamma(2.0 * nu) / gamma(nu + 0.5) + std::pow(2.0, nu));
  }
  return std::max(1.0, std::pow(2.0, 1.0 - nu) / std::sqrt(std::numbers::pi));
}

double c_nu(double nu) {
  check_order(nu);
  if (nu == 0.0) {
    const double k = k_nu(0.0);
    return 1.0 / (k * k);
  }
  const double s =
      2.0 * gamma(2.0 * nu) / gamma(nu + 0.5) + std::pow(2.0, nu + 1.0);
  return 1.0 / (s * s);
}

double kernel_derivative_fd(double nu, int k, double x, double y) {
  auto phi = [nu, y](double s) { return bessel_j_scaled(nu, s * y); };
  const double h = 1e-4 * x;
  switch (k) {
    case 0:
      return phi(x);
    case 1:
      return (-phi(x + 2 * h) + 8 * phi(x + h) - 8 * phi(x - h) +
              phi(x - 2 * h)) /
             (12 * h);
    case 2:
      return (-phi(x + 2 * h) + 16 * phi(x + h) - 30 * phi(x) +
              16 * phi(x - h) - phi(x - 2 * h)) /
             (12 * h * h);
    default:
      throw std::invalid_argument("kernel_derivative_fd supports k <= 2");
  }
}

bool kernel_derivative_bound_check(
    double nu, int k, const std::vector<std::pair<double, double>>& samples) {
  constexpr double kFdTol = 1e-5;
  for (const auto& [x, y] : samples) {
    const double d = kernel_derivative_fd(nu, k, x, y);
    if (std::abs(d) > std::pow(y, k) + kFdTol) return false;
  }
  return true;
}

}  // namespace hankelobs
