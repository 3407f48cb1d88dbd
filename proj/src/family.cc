#include "hankelobs/family.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hankelobs {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

RealVector bump_values(const RealVector& x, double a, double b, double sigma) {
  RealVector v = RealVector::Zero(x.size());
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = (x[i] - mid) / half;
    if (std::abs(z) < 1.0) v[i] = std::exp(-sigma / (1.0 - z * z));
  }
  return v;
}

}  // namespace

GridFunction gaussian_bump(const GridPtr& grid, double nu, double center,
                           double s) {
  return GridFunction::sample(grid, [&](double x) -> Complex {
    return std::exp((nu + 0.5) * std::log(x) - s * (x - center) * (x - center));
  });
}

GridFunction gaussian_eigenfunction(const GridPtr& grid, double nu, double s) {
  return gaussian_bump(grid, nu, 0.0, s);
}

GridFunction normalized(const GridFunction& f) {
  const double norm = std::sqrt(l2_norm_sq(f));
  if (norm == 0.0) return f;
  return GridFunction(f.grid_ptr(), f.values() / norm);
}

GridFunction compact_bump(const GridPtr& grid, double a, double b,
                          double sigma) {
  if (!(a >= 0.0 && b > a)) {
    throw std::invalid_argument("compact_bump needs 0 <= a < b");
  }
  const RealVector v = bump_values(grid->nodes(), a, b, sigma);
  if (v.isZero()) {
    throw std::invalid_argument("compact_bump support [" + std::to_string(a) +
                                ", " + std::to_string(b) +
                                "] contains no grid node");
  }
  return normalized(GridFunction(grid, v.cast<Complex>()));
}

std::vector<GridFunction> gaussian_family(const GridPtr& grid, double nu,
                                          int count, std::uint64_t seed,
                                          const GaussianFamilyParams& params) {
  std::mt19937_64 rng(seed);
  std::vector<GridFunction> family;
  family.reserve(count);
  for (int m = 0; m < count; ++m) {
    const int terms =
        std::uniform_int_distribution<int>(1, params.max_terms)(rng);
    ComplexVector v = ComplexVector::Zero(grid->n());
    for (int j = 0; j < terms; ++j) {
      const double c = uniform(rng, params.center_min, params.center_max);
      const double s = uniform(rng, params.width_min, params.width_max);
      const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      v += std::polar(1.0, phase) * gaussian_bump(grid, nu, c, s).values();
    }
    family.push_back(normalized(GridFunction(grid, std::move(v))));
  }
  return family;
}

std::vector<GridFunction> bump_family(const GridPtr& grid, int count,
                                      std::uint64_t seed,
                                      const BumpFamilyParams& params) {
  if (params.window_max - params.window_min < params.length_max) {
    throw std::invalid_argument("bump_family window shorter than length_max");
  }
  std::mt19937_64 rng(seed);
  std::vector<GridFunction> family;
  family.reserve(count);
  const RealVector& x = grid->nodes();
  for (int m = 0; m < count; ++m) {
    const double len = uniform(rng, params.length_min, params.length_max);
    const double left =
        uniform(rng, params.window_min, params.window_max - len);
    const double kappa =
        params.max_momentum > 0.0
            ? uniform(rng, -params.max_momentum, params.max_momentum)
            : 0.0;
    const RealVector v = bump_values(x, left, left + len, params.sigma);
    ComplexVector c(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      c[i] = std::polar(v[i], kappa * x[i]);
    }
    family.push_back(normalized(GridFunction(grid, std::move(c))));
  }
  return family;
}

SpectralPair from_spectrum(const HankelOperator& op,
                           const GridFunction& spectrum, double N) {
  require_same_grid(op.grid(), spectrum.grid());
  const RealVector& y = op.grid().nodes();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] > N && spectrum.values()[i] != Complex(0.0)) {
      throw std::invalid_argument("spectrum is not supported in [0, N]");
    }
  }
  return {GridFunction(op.grid_ptr(), op.apply(spectrum.values())), spectrum};
}

std::vector<SpectralPair> spectral_bump_family(const HankelOperator& op,
                                               double N, int count,
                                               std::uint64_t seed,
                                               double max_momentum) {
  std::mt19937_64 rng(seed);
  std::vector<SpectralPair> family;
  family.reserve(count);
  const GridPtr& grid = op.grid_ptr();
  const GridFunction bump = compact_bump(grid, 0.0, N);
  const RealVector& y = grid->nodes();
  for (int m = 0; m < count; ++m) {
    const double kappa = uniform(rng, 0.0, max_momentum);
    GridFunction spectrum = bump;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      spectrum.mutable_values()[i] *= std::polar(1.0, kappa * y[i]);
    }
    family.push_back(from_spectrum(op, spectrum, N));
  }
  return family;
}

}  // namespace hankelobs
