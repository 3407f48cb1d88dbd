#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hankelobs/grid.h"
#include "hankelobs/report.h"

namespace hankelobs {

/// A counterexample sequence and what was measured along it.
struct SharpnessRun {
  std::string family;  // t6_concentration, t7_exp_tail, ls1_gaussian_gap
  double nu = 0.0;
  std::vector<std::pair<std::string, double>> params;
  std::vector<double> indices;
  // Named columns, one value per index.
  std::vector<std::pair<std::string, std::vector<double>>> metrics;
  double fitted_rate = 0.0;
  // The family's own criterion (slope window, uniform bound, positive gap).
  bool passed = false;
  std::vector<std::string> flags;

  const std::vector<double>& metric(const std::string& name) const;
};

Json to_json(const SharpnessRun& run);
/// Header "index,<metric>,..." then one row per index.
void write_csv(std::ostream& out, const SharpnessRun& run);

/// Gauss-Legendre nodes and weights on [−1, 1] (Golub-Welsch).
std::pair<RealVector, RealVector> gauss_legendre(int order);

/// Composite Gauss-Legendre rule on every interval of a bounded set, with
/// panels no wider than max_panel.
std::pair<RealVector, RealVector> composite_gauss_legendre(
    const IntervalSet& set, double max_panel, int order = 16);

/// Unit-norm C^∞ profile exp(−1/(1−(s−1)²)) on its own grid over (0, 2].
GridFunction default_profile(int n = 512);

struct ConcentrationOptions {
  double T = 1.0;
  // Also integrate ∫∫_B|u(t; g_k)|² over t in [T/16, T] (the time-interval
  // variant), by Simpson with this many nodes; 0 disables it.
  int time_nodes = 0;
};

/// u_k = e^{−ix²/4T} k^{½} g(k(x − x₀)), x₀ the centre of A. Metrics: norm,
/// mass off A, ∫_B|u(T; u_k)|², fitted_rate the log-log slope of the last.
/// passed: slope in [−1.4, −0.6].
SharpnessRun t6_family(double nu, const IntervalSet& A, const IntervalSet& B,
                       const GridFunction& g, const std::vector<int>& k_list,
                       ConcentrationOptions options = {});

/// Same u_k; metrics: norm, ∫e^{λx}|u_k|² against the cap ∫e^{λ(x+x₀)}|g|²,
/// ∫_A|u(T; u_k)|². passed: the moment stays below the cap and the A
/// metric decreases.
SharpnessRun t7_family(double nu, const IntervalSet& A, double T,
                       double lambda, const GridFunction& g,
                       const std::vector<int>& k_list);

/// f_N(x) at the targets, where F_ν f_N(y) = y^{ν+½}(N/2)^{−ν−1} e^{−y²/N}
/// on [0, N].
RealVector ls1_profile(double nu, double N, const RealVector& targets);

/// gap(N) = log(N^{m/2}‖f_N‖ / ‖f_N‖_{L²(A)}), m = ⌈ν⌉. fitted_rate is the
/// slope of gap against N. passed: rate >= 0.4 min(1, d₀²/4) and the slope
/// of log‖f_N‖ against log N is at least −(m+1)/2 − 0.2.
SharpnessRun ls1_gap(double nu, const IntervalSet& A,
                     const std::vector<double>& N_list);

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hankelobs
