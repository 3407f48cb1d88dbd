#pragma once

#include <cstdint>
#include <vector>

#include "hankelobs/grid.h"
#include "hankelobs/hankel.h"

namespace hankelobs {

/// x^{ν+½} e^{−s(x−c)²}, unnormalized.
GridFunction gaussian_bump(const GridPtr& grid, double nu, double center,
                           double s);

/// x^{ν+½} e^{−s x²}. At s = ½ this is a fixed point of F_ν.
GridFunction gaussian_eigenfunction(const GridPtr& grid, double nu,
                                    double s = 0.5);

/// exp(−σ/(1−z²)) with z the affine image of [a, b] onto [−1, 1], zero
/// outside (a, b), scaled to unit norm on the grid.
GridFunction compact_bump(const GridPtr& grid, double a, double b,
                          double sigma = 1.0);

/// Scales f to unit L² norm; the zero function is returned unchanged.
GridFunction normalized(const GridFunction& f);

// Defaults keep members and their transforms below 1e-8 of the mass on the
// first and last 5% of a 2048-point grid with x_max = 24, and keep the
// evolved state inside that grid up to t = 2.
struct GaussianFamilyParams {
  double center_min = 5.0;
  double center_max = 7.0;
  double width_min = 0.7;  // s in e^{−s(x−c)²}
  double width_max = 1.0;
  int max_terms = 3;
};

/// Unit-norm superpositions of 1..max_terms Gaussian bumps with random
/// centres, widths and unimodular phases.
std::vector<GridFunction> gaussian_family(const GridPtr& grid, double nu,
                                          int count, std::uint64_t seed,
                                          const GaussianFamilyParams& params = {});

struct BumpFamilyParams {
  // Supports [l, l + len] with len in [length_min, length_max] and
  // window_min <= l, l + len <= window_max.
  double window_min = 0.5;
  double window_max = 4.0;
  double length_min = 2.0;
  double length_max = 3.0;
  // Carrier e^{iκx} with |κ| <= max_momentum.
  double max_momentum = 0.0;
  double sigma = 1.0;
};

/// Unit-norm shifted and dilated C^∞ bumps.
std::vector<GridFunction> bump_family(const GridPtr& grid, int count,
                                      std::uint64_t seed,
                                      const BumpFamilyParams& params = {});

/// f together with its transform, for data whose transform is prescribed.
struct SpectralPair {
  GridFunction f;
  GridFunction transform;
};

/// f = F_ν(spectrum), with spectrum supported in [0, N] (checked on nodes).
SpectralPair from_spectrum(const HankelOperator& op,
                           const GridFunction& spectrum, double N);

/// Pairs whose transforms are the unit-norm bump on [0, N] times a carrier
/// e^{iκy}, κ uniform in [0, max_momentum]. The carrier places f near x = κ.
std::vector<SpectralPair> spectral_bump_family(const HankelOperator& op,
                                               double N, int count,
                                               std::uint64_t seed,
                                               double max_momentum = 6.0);

}  // namespace hankelobs
