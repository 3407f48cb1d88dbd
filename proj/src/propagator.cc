#include "hankelobs/propagator.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hankelobs/specfun.h"

namespace hankelobs {
namespace {

std::string resolution_message(double t, double min_t) {
  std::ostringstream os;
  os << "chirp route: t = " << t
     << " is below the resolution floor; minimal admissible t = " << min_t;
  return os.str();
}

// Cubic Lagrange interpolation of samples at midpoint nodes (i+½)h.
Complex interpolate(const ComplexVector& v, double h, double p) {
  const int n = static_cast<int>(v.size());
  const double s = p / h - 0.5;
  int i0 = static_cast<int>(std::floor(s)) - 1;
  i0 = std::clamp(i0, 0, n - 4);
  Complex acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) l *= (s - (i0 + b)) / static_cast<double>(a - b);
    }
    acc += l * v[i0 + a];
  }
  return acc;
}

Complex chirp_prefactor(double nu, double t) {
  return std::polar(1.0 / std::sqrt(2.0 * t), -(nu + 1.0) * std::numbers::pi / 2);
}

}  // namespace

ResolutionError::ResolutionError(double t, double min_t)
    : std::domain_error(resolution_message(t, min_t)), min_t_(min_t) {}

double min_admissible_time(const RadialGrid& grid) {
  return grid.spacing() * grid.x_max() / (2.0 * std::numbers::pi);
}

ComplexVector evolve_chirp(const HankelOperator& op, double t,
                           const Eigen::Ref<const ComplexVector>& u0) {
  const RadialGrid& grid = op.grid();
  const double min_t = min_admissible_time(grid);
  if (!(t > 0.0) || t < min_t) throw ResolutionError(t, min_t);
  const RealVector& x = grid.nodes();
  ComplexVector g(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    g[i] = std::polar(1.0, x[i] * x[i] / (4.0 * t)) * u0[i];
  }
  // F(p) ~ p^{ν+½} near 0; interpolating F(p)/p^{ν+½}, which is smooth,
  // keeps the cubic rule accurate where x/2t crowds the first nodes.
  const double power = op.nu() + 0.5;
  ComplexVector transformed = op.apply(g);
  for (int i = 0; i < grid.n(); ++i) transformed[i] /= std::pow(x[i], power);
  const Complex pre = chirp_prefactor(op.nu(), t);
  ComplexVector u(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    const double p = x[i] / (2.0 * t);
    if (p > grid.x_max()) {
      u[i] = 0.0;
      continue;
    }
    u[i] = pre * std::polar(std::pow(p, power), x[i] * x[i] / (4.0 * t)) *
           interpolate(transformed, grid.spacing(), p);
  }
  return u;
}

GridFunction evolve_chirp(const EvolutionConfig& cfg, const GridFunction& u0) {
  require_same_grid(*cfg.grid, u0.grid());
  const HankelPtr op = hankel_operator(cfg.nu, cfg.grid);
  return GridFunction(cfg.grid, evolve_chirp(*op, cfg.t, u0.values()));
}

namespace {

ComplexVector spectral_phase(const RadialGrid& grid, double t) {
  const RealVector& p = grid.nodes();
  ComplexVector phase(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    phase[i] = std::polar(1.0, -t * p[i] * p[i]);
  }
  return phase;
}

}  // namespace

ComplexVector evolve_spectral(const HankelOperator& op, double t,
                              const Eigen::Ref<const ComplexVector>& u0) {
  const ComplexVector spectrum =
      spectral_phase(op.grid(), t).cwiseProduct(op.apply(u0));
  return op.apply(spectrum);
}

ComplexMatrix evolve_spectral_columns(
    const HankelOperator& op, double t,
    const Eigen::Ref<const ComplexMatrix>& u0) {
  const ComplexMatrix spectrum =
      spectral_phase(op.grid(), t).asDiagonal() * op.apply_columns(u0);
  return op.apply_columns(spectrum);
}

GridFunction evolve_spectral(const EvolutionConfig& cfg,
                             const GridFunction& u0) {
  require_same_grid(*cfg.grid, u0.grid());
  const HankelPtr op = hankel_operator(cfg.nu, cfg.grid);
  return GridFunction(cfg.grid, evolve_spectral(*op, cfg.t, u0.values()));
}

ComplexVector evolve_chirp_at(double nu, double t, const RealVector& nodes,
                              const RealVector& weights,
                              const ComplexVector& u0,
                              const RealVector& targets) {
  if (!(t > 0.0)) throw std::invalid_argument("evolve_chirp_at needs t > 0");
  ComplexVector g(nodes.size());
  for (Eigen::Index j = 0; j < nodes.size(); ++j) {
    g[j] = std::polar(1.0, nodes[j] * nodes[j] / (4.0 * t)) * u0[j];
  }
  const ComplexVector transformed =
      hankel_at(nu, nodes, weights, g, targets / (2.0 * t));
  const Complex pre = chirp_prefactor(nu, t);
  ComplexVector u(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    u[i] = pre * std::polar(1.0, targets[i] * targets[i] / (4.0 * t)) *
           transformed[i];
  }
  return u;
}

double moment(const GridFunction& f, int k) {
  if (k < 0 || k > 8) throw std::invalid_argument("moment: need 0 <= k <= 8");
  return weighted_l2_norm_sq(f, Weight::power(k));
}

double sobolev_norm_sq_proxy(const GridFunction& f, int order) {
  const RadialGrid& grid = f.grid();
  int stride = static_cast<int>(std::lround(0.1 / grid.spacing()));
  stride = std::max(1, stride | 1);
  const int n_coarse = grid.n() / stride;
  GridPtr coarse =
      make_grid(n_coarse, n_coarse * stride * grid.spacing(), Quadrature::kMidpoint);
  ComplexVector v(n_coarse);
  for (int j = 0; j < n_coarse; ++j) v[j] = f.values()[j * stride + stride / 2];
  GridFunction d(coarse, std::move(v));
  double total = l2_norm_sq(d);
  for (int m = 1; m <= order; ++m) {
    d = derivative(d);
    total += l2_norm_sq(d);
  }
  return total;
}

std::vector<double> moment_bound_ratio(double nu, int k,
                                       const GridFunction& u0,
                                       const std::vector<double>& T_list) {
  if (k < 0) throw std::invalid_argument("moment_bound_ratio: need k >= 0");
  std::vector<double> ratios;
  if (l2_norm_sq(u0) == 0.0) {
    ratios.assign(T_list.size(), 0.0);
    return ratios;
  }
  const double data = sobolev_norm_sq_proxy(u0, 4 * k) +
                      weighted_l2_norm_sq(u0, Weight::power(4 * k)) +
                      weighted_l2_norm_sq(u0, Weight::inverse_power(2 * k));
  const HankelPtr op = hankel_operator(nu, u0.grid_ptr());
  for (double T : T_list) {
    if (!(T > 0.0)) throw std::invalid_argument("moment_bound_ratio: T > 0");
    const GridFunction uT(u0.grid_ptr(), evolve_spectral(*op, T, u0.values()));
    ratios.push_back(moment(uT, k) / (std::pow(T + 1.0 / T, 2.0 * k) * data));
  }
  return ratios;
}

}  // namespace hankelobs
