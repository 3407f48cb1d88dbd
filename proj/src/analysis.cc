#include "hankelobs/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hankelobs/propagator.h"
#include "hankelobs/specfun.h"

namespace hankelobs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  if (m == kInf) return kInf;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

const Interval& single_interval(const IntervalSet& set, const char* name) {
  require(set.intervals().size() == 1,
          std::string(name) + " must be a single interval");
  const Interval& iv = set.intervals().front();
  require(iv.b > iv.a && std::isfinite(iv.b),
          std::string(name) + " must be a bounded interval of positive length");
  return iv;
}

IntervalSet half_line_complement(double b) {
  return IntervalSet({{0.0, b}}).complement();
}

ComplexVector evolve_to(const GridFunction& u0, double nu, double t) {
  const HankelPtr op = hankel_operator(nu, u0.grid_ptr());
  return evolve_for_analysis(*op, t, u0.values());
}

double set_mass(const GridPtr& grid, const ComplexVector& v,
                const IntervalSet& on) {
  return l2_norm_sq(GridFunction(grid, v), on);
}

InequalityInstance base_instance(const std::string& name,
                                 const std::string& form, double nu,
                                 const RadialGrid& grid) {
  InequalityInstance inst;
  inst.name = name;
  inst.form = form;
  inst.nu = nu;
  inst.grid_n = grid.n();
  inst.grid_x_max = grid.x_max();
  return inst;
}

void check_nu(double nu) {
  require(nu >= 0.0, "nu must be >= 0");
}

bool rhs_covers(const InequalityInstance& inst, double C, double theta) {
  return inst.lhs <= std::exp(inst.log_rhs(C, theta));
}

std::vector<double> theta_grid() {
  std::vector<double> t;
  for (int k = 1; k <= 19; ++k) t.push_back(0.05 * k);
  return t;
}

// Σ_{k>=m} k^{−s} for s > 1, m >= 1: Euler-Maclaurin through the B₂ term. The
// next correction is negative for completely monotone summands, so this is
// an upper bound.
double zeta_tail_upper(double s, double m) {
  return std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s) +
         s * std::pow(m, -s - 1.0) / 12.0;
}

}  // namespace

double implied_constant(const InequalityInstance& inst, double theta) {
  if (inst.lhs <= 0.0 || rhs_covers(inst, 0.0, theta)) return 0.0;
  double hi = 1.0;
  while (!rhs_covers(inst, hi, theta)) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  double lo = hi == 1.0 ? 0.0 : 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (rhs_covers(inst, mid, theta)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ConstantEstimate fit_constant(const std::vector<InequalityInstance>& family) {
  require(!family.empty(), "fit_constant needs a nonempty family");
  const bool uses_theta = family.front().uses_theta;
  const std::vector<double> thetas =
      uses_theta ? theta_grid() : std::vector<double>{kNaN};
  ConstantEstimate est;
  est.form = family.front().form;
  est.samples = static_cast<int>(family.size());
  est.fitted_C = kInf;
  double best_theta = kNaN;
  for (double theta : thetas) {
    double c = 0.0;
    for (const auto& inst : family) {
      c = std::max(c, implied_constant(inst, theta));
      if (c >= est.fitted_C) break;
    }
    if (c < est.fitted_C) {
      est.fitted_C = c;
      best_theta = theta;
    }
  }
  if (uses_theta) {
    // An unfittable family still reports the first θ tried.
    est.theta = std::isnan(best_theta) ? thetas.front() : best_theta;
  }
  double max_ratio = 0.0;
  for (const auto& inst : family) {
    const double rhs =
        std::exp(inst.log_rhs(est.fitted_C, est.theta.value_or(kNaN)));
    if (inst.lhs > 0.0) max_ratio = std::max(max_ratio, inst.lhs / rhs);
  }
  est.max_ratio = max_ratio;
  return est;
}

InequalityReport evaluate(const InequalityInstance& inst,
                          const ConstantEstimate& estimate,
                          std::uint64_t seed) {
  InequalityReport r;
  r.name = inst.name;
  r.nu = inst.nu;
  r.params = inst.params;
  r.seed = seed;
  r.grid_n = inst.grid_n;
  r.grid_x_max = inst.grid_x_max;
  for (const auto& f : inst.flags) r.add_flag(f);

  double C = estimate.fitted_C;
  double theta = inst.uses_theta ? estimate.theta.value_or(kNaN) : kNaN;
  if (inst.fixed_constant) {
    C = *inst.fixed_constant;
    theta = kNaN;
    r.estimate.form = inst.form;
    r.estimate.fitted_C = C;
    r.estimate.samples = 0;
  } else {
    r.estimate = estimate;
  }
  const double log_rhs = inst.log_rhs(C, theta);
  const double log_base = inst.log_base(theta);
  r.lhs = inst.lhs;
  r.rhs = std::exp(log_rhs);
  if (std::isinf(r.rhs)) r.add_flag("rhs_overflow");
  r.constant = std::exp(log_rhs - log_base);
  const double base = std::exp(log_base);
  r.ratio = r.lhs == 0.0 ? 0.0 : r.lhs / base;
  r.passed = r.lhs <= r.rhs;
  if (inst.fixed_constant) {
    r.estimate.max_ratio = r.lhs == 0.0 ? 0.0 : r.lhs / r.rhs;
  }
  return r;
}

InequalityReport evaluate(const InequalityInstance& inst, std::uint64_t seed) {
  if (inst.fixed_constant) return evaluate(inst, ConstantEstimate{}, seed);
  return evaluate(inst, fit_constant({inst}), seed);
}

FamilyCertificate certify(const std::vector<InequalityInstance>& family,
                          std::uint64_t seed) {
  require(!family.empty(), "certify needs a nonempty family");
  FamilyCertificate cert;
  if (family.front().fixed_constant) {
    cert.estimate.form = family.front().form;
    cert.estimate.samples = 0;
  } else {
    cert.estimate = fit_constant(family);
  }
  cert.passed = true;
  for (const auto& inst : family) {
    cert.reports.push_back(evaluate(inst, cert.estimate, seed));
    cert.passed = cert.passed && cert.reports.back().passed;
  }
  if (family.front().fixed_constant) {
    double max_ratio = 0.0;
    for (const auto& r : cert.reports) {
      max_ratio = std::max(max_ratio, r.estimate.max_ratio);
    }
    cert.estimate.max_ratio = max_ratio;
  }
  return cert;
}

double fit_spread(const ConstantEstimate& a, const ConstantEstimate& b) {
  const double m = std::max(a.fitted_C, b.fitted_C);
  if (m == 0.0) return 0.0;
  return std::abs(a.fitted_C - b.fitted_C) / m;
}

double interpolation_exponent(const Interval& A, const Interval& B,
                              double scale) {
  require(A.b > A.a && B.b > B.a, "degenerate interval");
  require(scale > 0.0, "scale must be positive");
  const double a = A.b - A.a;
  const double b = B.b - B.a;
  const double x0 = 0.5 * (A.a + A.b);
  const double x1 = 0.5 * (B.a + B.b);
  return 1.0 + (std::abs(x0 - x1) + 0.5 * a + 0.5 * b) /
                   std::min(scale, 0.5 * b);
}

ComplexVector evolve_for_analysis(const HankelOperator& op, double t,
                                  const ComplexVector& u0) {
  if (t == 0.0) return u0;
  return evolve_chirp(op, t, u0);
}

// ---------------------------------------------------------------------------

InequalityInstance uncertainty_instance(double nu, const IntervalSet& A,
                                        const IntervalSet& B,
                                        const GridFunction& f) {
  check_nu(nu);
  require(A.bounded() && B.bounded(), "A and B must be bounded");
  const HankelPtr op = hankel_operator(nu, f.grid_ptr());
  const ComplexVector Ff = op->apply(f.values());
  const double off_a = std::sqrt(l2_norm_sq(f, A.complement()));
  const double off_b =
      std::sqrt(set_mass(f.grid_ptr(), Ff, B.complement()));
  const double base = off_a + off_b;
  const double kappa =
      k_nu(nu) * std::sqrt(2.0 * std::numbers::pi * A.measure() * B.measure());

  auto inst = base_instance("t2", "C", nu, f.grid());
  inst.params = {{"measure_A", A.measure()},
                 {"measure_B", B.measure()},
                 {"k_nu", k_nu(nu)},
                 {"regime_kappa", kappa}};
  inst.lhs = std::sqrt(l2_norm_sq(f));
  const double log_base = std::log(base);
  inst.log_rhs = [log_base](double C, double) {
    return std::log(C) + log_base;
  };
  inst.log_base = [log_base](double) { return log_base; };
  if (kappa < 1.0) {
    inst.form = "1 + 1/(1 - k_nu sqrt(2 pi |A||B|))";
    inst.fixed_constant = 1.0 + 1.0 / (1.0 - kappa);
  }
  return inst;
}

InequalityReport verify_uncertainty(double nu, const IntervalSet& A,
                                    const IntervalSet& B,
                                    const GridFunction& f) {
  return evaluate(uncertainty_instance(nu, A, B, f));
}

InequalityInstance two_point_instance(const VerificationSpec& spec,
                                      TwoPointCase which,
                                      const GridFunction& u0) {
  const double nu = spec.nu;
  check_nu(nu);
  require(spec.S >= 0.0 && spec.T > spec.S, "need T > S >= 0");
  require(spec.A.bounded() && spec.B.bounded(), "A and B must be bounded");
  const double dt = spec.T - spec.S;
  const double area = spec.A.measure() * spec.B.measure();

  auto inst = base_instance("t1", "", nu, u0.grid());
  inst.params = {{"S", spec.S},
                 {"T", spec.T},
                 {"measure_A", spec.A.measure()},
                 {"measure_B", spec.B.measure()}};

  std::optional<double> printed;
  double exponent = 0.0;
  switch (which) {
    case TwoPointCase::kHalfInteger: {
      const double twice = 2.0 * nu;
      require(std::abs(twice - std::round(twice)) < 1e-12,
              "case (i) needs nu in {0, 1/2, 1, 3/2, ...}");
      inst.name = "t1i";
      inst.form = "C exp(C mu(A) mu(B) / (T-S)^(2nu+2))";
      const double mu_a = mu_nu_measure(spec.A, nu);
      const double mu_b = mu_nu_measure(spec.B, nu);
      exponent = mu_a * mu_b / std::pow(dt, 2.0 * nu + 2.0);
      inst.params.push_back({"mu_A", mu_a});
      inst.params.push_back({"mu_B", mu_b});
      break;
    }
    case TwoPointCase::kSmallSet: {
      inst.name = "t1ii";
      inst.form =
          "(2 sqrt(C_nu(T-S)) - sqrt(pi|A||B|)) / "
          "(sqrt(C_nu(T-S)) - sqrt(pi|A||B|))";
      const double cn = c_nu(nu);
      const double s = std::sqrt(std::numbers::pi * area);
      const double q = std::sqrt(cn * dt);
      if (!(s < q)) {
        std::ostringstream os;
        os << "t1ii regime violated: pi|A||B| = " << s * s
           << " >= C_nu (T-S) = " << q * q;
        throw RegimeError(os.str());
      }
      printed = (2.0 * q - s) / (q - s);
      inst.params.push_back({"C_nu", cn});
      if ((area < cn) != (s * s < q * q)) {
        inst.flags.push_back("regime_reading_mismatch");
      }
      break;
    }
    case TwoPointCase::kHalfLines: {
      require(spec.A.intervals().size() == 1 &&
                  spec.A.intervals()[0].a == 0.0 &&
                  spec.B.intervals().size() == 1 &&
                  spec.B.intervals()[0].a == 0.0,
              "case (iii) needs A = [0, a] and B = [0, b]");
      inst.name = "t1iii";
      inst.form = "C exp(C (1 + ab/(T-S)))";
      exponent = 1.0 + spec.A.measure() * spec.B.measure() / dt;
      break;
    }
  }

  const HankelPtr op = hankel_operator(nu, u0.grid_ptr());
  const ComplexVector uS = evolve_for_analysis(*op, spec.S, u0.values());
  const ComplexVector uT = evolve_for_analysis(*op, spec.T, u0.values());
  const double obs = set_mass(u0.grid_ptr(), uS, spec.A.complement()) +
                     set_mass(u0.grid_ptr(), uT, spec.B.complement());
  inst.lhs = l2_norm_sq(u0);
  const double log_obs = std::log(obs);
  if (printed) {
    inst.fixed_constant = printed;
    inst.log_rhs = [log_obs](double C, double) {
      return std::log(C) + log_obs;
    };
  } else {
    inst.log_rhs = [log_obs, exponent](double C, double) {
      return std::log(C) + C * exponent + log_obs;
    };
  }
  inst.log_base = [log_obs](double) { return log_obs; };
  return inst;
}

InequalityReport verify_two_point(const VerificationSpec& spec,
                                  TwoPointCase which, const GridFunction& u0) {
  return evaluate(two_point_instance(spec, which, u0));
}

InequalityInstance time_interval_instance(double nu, double r, double T,
                                          const GridFunction& u0,
                                          TimeQuadrature quadrature) {
  check_nu(nu);
  require(r > 0.0 && T > 0.0, "need r > 0 and T > 0");
  require(quadrature.nodes >= 17 && quadrature.nodes % 2 == 1,
          "Simpson rule needs an odd node count >= 17");
  const int m = quadrature.nodes;
  const HankelPtr op = hankel_operator(nu, u0.grid_ptr());
  const RealVector& p = u0.grid().nodes();
  const ComplexVector spectrum = op->apply(u0.values());
  ComplexMatrix phased(p.size(), m);
  for (int j = 0; j < m; ++j) {
    const double t = T * j / (m - 1);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      phased(i, j) = std::polar(1.0, -t * p[i] * p[i]) * spectrum[i];
    }
  }
  const ComplexMatrix u = op->apply_columns(phased);
  const RealVector outside =
      half_line_complement(r).indicator(u0.grid()).cwiseProduct(
          u0.grid().weights());
  const double h = T / (m - 1);
  double obs = 0.0;
  for (int j = 0; j < m; ++j) {
    const double w = (j == 0 || j == m - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    obs += w * h / 3.0 * outside.dot(u.col(j).cwiseAbs2());
  }

  auto inst = base_instance("c3", "C (1+1/T) exp(C r^2 (1+1/T))", nu,
                            u0.grid());
  inst.params = {{"r", r}, {"T", T}, {"time_nodes", static_cast<double>(m)},
                 {"skipped_mass", 0.0}};
  inst.lhs = l2_norm_sq(u0);
  const double log_obs = std::log(obs);
  const double g = 1.0 + 1.0 / T;
  inst.log_rhs = [=](double C, double) {
    return std::log(C) + std::log(g) + C * r * r * g + log_obs;
  };
  inst.log_base = [log_obs](double) { return log_obs; };
  return inst;
}

InequalityReport verify_time_interval(double nu, double r, double T,
                                      const GridFunction& u0) {
  return evaluate(time_interval_instance(nu, r, T, u0));
}

InequalityInstance t3_instance(const VerificationSpec& spec,
                               const GridFunction& u0, T3Variant variant) {
  const double nu = spec.nu;
  check_nu(nu);
  require(spec.lambda > 0.0 && spec.b > 0.0 && spec.T > 0.0,
          "need lambda, b, T > 0");
  const ComplexVector uT = evolve_to(u0, nu, spec.T);
  const double log_obs =
      std::log(set_mass(u0.grid_ptr(), uT, half_line_complement(spec.b)));
  auto inst = base_instance("", "", nu, u0.grid());
  inst.lhs = l2_norm_sq(u0);

  if (variant == T3Variant::kExponential) {
    inst.name = "t3i";
    inst.form =
        "C (1 + (b/(lambda T))^(2nu+2)) obs^(theta^(1+b/(lambda T))) "
        "W^(1-theta^(1+b/(lambda T)))";
    inst.uses_theta = true;
    const double log_w =
        std::log(weighted_l2_norm_sq(u0, Weight::exp_linear(spec.lambda)));
    const double ratio = spec.b / (spec.lambda * spec.T);
    const double log_pre = std::log1p(std::pow(ratio, 2.0 * nu + 2.0));
    auto log_base = [=](double theta) {
      const double q = std::pow(theta, 1.0 + ratio);
      return q * log_obs + (1.0 - q) * log_w;
    };
    inst.log_base = log_base;
    inst.log_rhs = [=](double C, double theta) {
      return std::log(C) + log_pre + log_base(theta);
    };
    inst.params = {{"lambda", spec.lambda}, {"b", spec.b}, {"T", spec.T}};
    return inst;
  }

  require(spec.beta > 1.0, "t3ii needs beta > 1");
  require(spec.gamma > 0.0 && spec.gamma < 1.0, "t3ii needs gamma in (0,1)");
  inst.name = "t3ii";
  inst.form =
      "C exp((C^beta b^beta / (lambda (1-gamma) T^beta))^(1/(beta-1))) "
      "obs^gamma W_beta^(1-gamma)";
  const double log_w = std::log(
      weighted_l2_norm_sq(u0, Weight::exp_power(spec.lambda, spec.beta)));
  const double gamma = spec.gamma;
  const double beta = spec.beta;
  const double log_base = gamma * log_obs + (1.0 - gamma) * log_w;
  const double scale = std::pow(spec.b / spec.T, beta) /
                       (spec.lambda * (1.0 - gamma));
  inst.log_base = [log_base](double) { return log_base; };
  inst.log_rhs = [=](double C, double) {
    return std::log(C) +
           std::pow(std::pow(C, beta) * scale, 1.0 / (beta - 1.0)) + log_base;
  };
  inst.params = {{"lambda", spec.lambda}, {"b", spec.b},    {"T", spec.T},
                 {"beta", beta},          {"gamma", gamma}};
  return inst;
}

InequalityReport verify_t3(const VerificationSpec& spec, const GridFunction& u0,
                           T3Variant variant) {
  return evaluate(t3_instance(spec, u0, variant));
}

InequalityInstance t4_instance(const VerificationSpec& spec,
                               const GridFunction& u0) {
  const double nu = spec.nu;
  check_nu(nu);
  require(spec.lambda > 0.0 && spec.T > 0.0, "need lambda, T > 0");
  const Interval& A = single_interval(spec.A, "A");
  const Interval& B = single_interval(spec.B, "B");
  const double lt = spec.lambda * spec.T;
  const double p = interpolation_exponent(A, B, lt);
  const double b = B.b - B.a;
  const double e = 2.0 * nu + 2.0;

  const ComplexVector uT = evolve_to(u0, nu, spec.T);
  auto inst = base_instance(
      "t4",
      "C (a2^(2nu+2) - a1^(2nu+2)) ((lambda T) ^ b)^(-(2nu+2)) "
      "obs_B^(theta^p) W^(1-theta^p)",
      nu, u0.grid());
  inst.uses_theta = true;
  inst.lhs = set_mass(u0.grid_ptr(), uT, spec.A);
  const double log_obs = std::log(set_mass(u0.grid_ptr(), uT, spec.B));
  const double log_w =
      std::log(weighted_l2_norm_sq(u0, Weight::exp_linear(spec.lambda)));
  const double log_pre = std::log(std::pow(A.b, e) - std::pow(A.a, e)) -
                         e * std::log(std::min(lt, b));
  auto log_base = [=](double theta) {
    const double q = std::pow(theta, p);
    return q * log_obs + (1.0 - q) * log_w;
  };
  inst.log_base = log_base;
  inst.log_rhs = [=](double C, double theta) {
    return std::log(C) + log_pre + log_base(theta);
  };
  inst.params = {{"lambda", spec.lambda}, {"T", spec.T}, {"p", p}};
  return inst;
}

InequalityReport verify_t4(const VerificationSpec& spec,
                           const GridFunction& u0) {
  return evaluate(t4_instance(spec, u0));
}

InequalityInstance t5_instance(const VerificationSpec& spec,
                               const GridFunction& u0) {
  const double nu = spec.nu;
  check_nu(nu);
  require(spec.b > 0.0 && spec.T > 0.0 && spec.N > 0.0, "need b, T, N > 0");
  const double total = l2_norm_sq(u0);
  const double outside = l2_norm_sq(u0, half_line_complement(spec.N));
  if (outside > 1e-10 * total) {
    throw std::invalid_argument("t5: u0 has mass outside [0, N]");
  }
  const ComplexVector uT = evolve_to(u0, nu, spec.T);
  auto inst = base_instance("t5", "exp(C (1 + bN/T))", nu, u0.grid());
  inst.lhs = total;
  const double log_obs =
      std::log(set_mass(u0.grid_ptr(), uT, half_line_complement(spec.b)));
  const double x = 1.0 + spec.b * spec.N / spec.T;
  inst.log_rhs = [=](double C, double) { return C * x + log_obs; };
  inst.log_base = [log_obs](double) { return log_obs; };
  inst.params = {{"b", spec.b}, {"T", spec.T}, {"N", spec.N}, {"bN_over_T",
                 spec.b * spec.N / spec.T}};
  return inst;
}

InequalityReport verify_t5(const VerificationSpec& spec,
                           const GridFunction& u0) {
  return evaluate(t5_instance(spec, u0));
}

InequalityInstance t8_instance(const VerificationSpec& spec,
                               const GridFunction& u0) {
  const double nu = spec.nu;
  check_nu(nu);
  require(spec.epsilon > 0.0 && spec.epsilon < 1.0, "t8 needs eps in (0,1)");
  require(spec.lambda > 0.0 && spec.lambda2 > 0.0 && spec.T > 0.0,
          "need lambda1, lambda2, T > 0");
  const Interval& B = single_interval(spec.B, "B");
  const double b = B.b - B.a;
  const double x0 = 0.5 * (B.a + B.b);
  const double m = std::min(spec.lambda * spec.T, 0.5 * b);
  const double eps = spec.epsilon;
  const double l2 = spec.lambda2;

  const ComplexVector uT = evolve_to(u0, nu, spec.T);
  auto inst = base_instance(
      "t8",
      "exp(C (1 + (x0 + b/2 + 1/lambda2)/m)) (eps W1 + eps "
      "exp(eps^(-1 - C/(lambda2 m))) obs_B), m = (lambda1 T) ^ (b/2)",
      nu, u0.grid());
  inst.lhs = weighted_l2_norm_sq(GridFunction(u0.grid_ptr(), uT),
                                 Weight::exp_decay(l2));
  const double log_w1 =
      std::log(weighted_l2_norm_sq(u0, Weight::exp_linear(spec.lambda)));
  const double log_obs = std::log(set_mass(u0.grid_ptr(), uT, spec.B));
  const double x = 1.0 + (x0 + 0.5 * b + 1.0 / l2) / m;
  const double log_eps = std::log(eps);
  inst.log_rhs = [=](double C, double) {
    const double inner = std::pow(eps, -1.0 - C / (l2 * m));
    return C * x + log_sum_exp(log_eps + log_w1, log_eps + inner + log_obs);
  };
  inst.log_base = [f = inst.log_rhs](double) { return f(0.0, kNaN); };
  inst.params = {{"lambda1", spec.lambda}, {"lambda2", l2}, {"T", spec.T},
                 {"epsilon", eps},         {"m", m}};
  return inst;
}

InequalityReport verify_t8(const VerificationSpec& spec,
                           const GridFunction& u0) {
  return evaluate(t8_instance(spec, u0));
}

InequalityInstance t9_instance(const VerificationSpec& spec,
                               const GridFunction& u0) {
  const double nu = spec.nu;
  check_nu(nu);
  const double eps = spec.epsilon;
  if (!(eps >= 0.15 && eps < 1.0)) {
    throw std::range_error("t9 needs eps in [0.15, 1); e^(eps^-2) overflows");
  }
  require(spec.lambda > 0.0 && spec.T > 0.0, "need lambda, T > 0");
  if (origin_mass_fraction(u0) > 1e-20) {
    throw std::invalid_argument("t9: u0 must vanish near x = 0");
  }
  const Interval& B = single_interval(spec.B, "B");
  const double b = B.b - B.a;
  const double x0 = 0.5 * (B.a + B.b);
  const double m = std::min(spec.lambda * spec.T, 0.5 * b);
  const int K = static_cast<int>(std::floor(nu)) + 3;
  const double T = spec.T;

  const ComplexVector uT = evolve_to(u0, nu, T);
  const double w = weighted_l2_norm_sq(u0, Weight::exp_linear(spec.lambda));
  const double sobolev = sobolev_norm_sq_proxy(u0, 4 * K);
  const double inverse = weighted_l2_norm_sq(u0, Weight::inverse_power(2 * K));
  const double log_obs = std::log(set_mass(u0.grid_ptr(), uT, spec.B));
  const double log_data = std::log(w + sobolev + inverse);
  const double log_pre =
      K * std::log(T + 1.0 / T) + 4.0 * K * std::log1p(T);
  const double power = 1.0 + (x0 + 0.5 * b + 1.0) / m;
  const double log_eps = std::log(eps);
  const double eps_exponent = 1.0 / (eps * eps);

  auto inst = base_instance(
      "t9",
      "(T+1/T)^K (1+T)^(4K) exp(C^(1 + (x0+b/2+1)/m)) (eps (W + H^(4K) + "
      "x^(-4K)) + eps exp(eps^-2) obs_B), K = [nu]+3",
      nu, u0.grid());
  inst.lhs = l2_norm_sq(u0);
  inst.log_rhs = [=](double C, double) {
    return log_pre + std::pow(C, power) +
           log_sum_exp(log_eps + log_data, log_eps + eps_exponent + log_obs);
  };
  inst.log_base = [f = inst.log_rhs](double) { return f(0.0, kNaN); };
  inst.params = {{"lambda", spec.lambda},
                 {"T", T},
                 {"epsilon", eps},
                 {"K", static_cast<double>(K)},
                 {"eps_exponent", eps_exponent},
                 {"sobolev_sq", sobolev},
                 {"inverse_moment", inverse}};
  return inst;
}

InequalityReport verify_t9(const VerificationSpec& spec,
                           const GridFunction& u0) {
  return evaluate(t9_instance(spec, u0));
}

InequalityInstance l7_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform) {
  const double nu = spec.nu;
  check_nu(nu);
  require_same_grid(f.grid(), transform.grid());
  require(spec.lambda > 0.0, "need lambda > 0");
  const Interval& A = single_interval(spec.A, "A");
  const Interval& B = single_interval(spec.B, "B");
  const double p = interpolation_exponent(A, B, spec.lambda);
  const double b = B.b - B.a;
  const double e = 2.0 * nu + 2.0;
  auto inst = base_instance(
      "l7",
      "C (a2^(2nu+2) - a1^(2nu+2)) (lambda^(-2nu-2) + b^(-2nu-2)) "
      "obs_B^(theta^p) W^(1-theta^p)",
      nu, f.grid());
  inst.uses_theta = true;
  inst.lhs = l2_norm_sq(f, spec.A);
  const double log_obs = std::log(l2_norm_sq(f, spec.B));
  const double log_w = std::log(
      weighted_l2_norm_sq(transform, Weight::exp_linear(spec.lambda)));
  const double log_pre =
      std::log(std::pow(A.b, e) - std::pow(A.a, e)) +
      std::log(std::pow(spec.lambda, -e) + std::pow(b, -e));
  auto log_base = [=](double theta) {
    const double q = std::pow(theta, p);
    return q * log_obs + (1.0 - q) * log_w;
  };
  inst.log_base = log_base;
  inst.log_rhs = [=](double C, double theta) {
    return std::log(C) + log_pre + log_base(theta);
  };
  inst.params = {{"lambda", spec.lambda}, {"p", p}};
  return inst;
}

InequalityInstance c1_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform) {
  const double nu = spec.nu;
  check_nu(nu);
  require_same_grid(f.grid(), transform.grid());
  require(spec.lambda > 0.0 && spec.b > 0.0, "need lambda, b > 0");
  const double ratio = spec.b / spec.lambda;
  auto inst = base_instance(
      "c1",
      "C (1 + (b/lambda)^(2nu+2)) obs^(theta^(1+b/lambda)) "
      "W^(1-theta^(1+b/lambda))",
      nu, f.grid());
  inst.uses_theta = true;
  inst.lhs = l2_norm_sq(f);
  const double log_obs = std::log(l2_norm_sq(f, half_line_complement(spec.b)));
  const double log_w = std::log(
      weighted_l2_norm_sq(transform, Weight::exp_linear(spec.lambda)));
  const double log_pre = std::log1p(std::pow(ratio, 2.0 * nu + 2.0));
  auto log_base = [=](double theta) {
    const double q = std::pow(theta, 1.0 + ratio);
    return q * log_obs + (1.0 - q) * log_w;
  };
  inst.log_base = log_base;
  inst.log_rhs = [=](double C, double theta) {
    return std::log(C) + log_pre + log_base(theta);
  };
  inst.params = {{"lambda", spec.lambda}, {"b", spec.b}};
  return inst;
}

InequalityInstance c2_instance(const VerificationSpec& spec,
                               const GridFunction& f,
                               const GridFunction& transform) {
  const double nu = spec.nu;
  check_nu(nu);
  require_same_grid(f.grid(), transform.grid());
  require(spec.b > 0.0 && spec.N > 0.0, "need b, N > 0");
  const RealVector& y = transform.grid().nodes();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    require(y[i] <= spec.N || transform.values()[i] == Complex(0.0),
            "c2: transform is not supported in [0, N]");
  }
  auto inst = base_instance("c2", "exp(C (1 + bN))", nu, f.grid());
  inst.lhs = l2_norm_sq(f);
  const double log_obs = std::log(l2_norm_sq(f, half_line_complement(spec.b)));
  const double x = 1.0 + spec.b * spec.N;
  inst.log_rhs = [=](double C, double) { return C * x + log_obs; };
  inst.log_base = [log_obs](double) { return log_obs; };
  inst.params = {{"b", spec.b}, {"N", spec.N}};
  return inst;
}

InterpolationReports verify_interpolation(const VerificationSpec& spec,
                                          const GridFunction& f,
                                          const GridFunction& transform) {
  return {evaluate(l7_instance(spec, f, transform)),
          evaluate(c1_instance(spec, f, transform)),
          evaluate(c2_instance(spec, f, transform))};
}

InequalityReport lr_bound_check(SummationVariant variant,
                                const SummationParams& params) {
  const double x = params.x;
  const double theta = params.theta;
  require(x > 0.0 && x < 1.0, "x must lie in (0,1)");
  require(theta > 0.0 && theta < 1.0, "theta must lie in (0,1)");
  const double log_x = std::log(x);
  const double abs_log_x = -log_x;
  const double abs_log_theta = -std::log(theta);

  InequalityReport r;
  r.params = {{"x", x}, {"theta", theta}};
  double lhs = 0.0;
  double log_rhs = 0.0;
  if (variant == SummationVariant::kExponential) {
    const double a = params.a;
    require(a > 0.0, "a must be positive");
    r.name = "lr_a";
    r.estimate.form = "e^a/|ln theta| Gamma(a/|ln theta|) |ln x|^(-a/|ln theta|)";
    r.params.push_back({"a", a});
    // Tail Σ_{k>K} e^{−ak} = e^{−a(K+1)}/(1−e^{−a}) < 1e-14.
    const double log_denom = std::log(-std::expm1(-a));
    const int K = static_cast<int>(
        std::min(1e7, std::ceil((14.0 * std::log(10.0) - log_denom) / a)));
    for (int k = 1; k <= K; ++k) {
      lhs += std::exp(std::pow(theta, k) * log_x - a * k);
    }
    r.params.push_back({"terms", static_cast<double>(K)});
    const double s = a / abs_log_theta;
    log_rhs = a - std::log(abs_log_theta) + std::lgamma(s) -
              s * std::log(abs_log_x);
  } else {
    const double eps = params.epsilon;
    const double alpha = params.alpha;
    require(eps > 0.0 && alpha > 0.0, "epsilon and alpha must be positive");
    r.name = "lr_b";
    r.estimate.form =
        "4/eps alpha^eps e^(eps ln eps + eps + e/(alpha theta)) "
        "(ln(alpha |ln x| + e))^(-eps)";
    r.params.push_back({"epsilon", eps});
    r.params.push_back({"alpha", alpha});
    // Past K the factor x^{θ^k} is within 1e-16 of 1; the remaining sum is
    // bounded by the Hurwitz zeta tail.
    const double k_flat = std::log(1e-16 / abs_log_x) / std::log(theta);
    const int K = static_cast<int>(std::clamp(std::ceil(k_flat), 1.0, 1e7));
    for (int k = 1; k <= K; ++k) {
      lhs += std::exp(std::pow(theta, k) * log_x -
                      (1.0 + eps) * std::log(static_cast<double>(k)));
    }
    lhs += zeta_tail_upper(1.0 + eps, K + 1.0);
    r.params.push_back({"terms", static_cast<double>(K)});
    log_rhs = std::log(4.0 / eps) + eps * std::log(alpha) +
              eps * std::log(eps) + eps +
              std::numbers::e / (alpha * theta) -
              eps * std::log(std::log(alpha * abs_log_x + std::numbers::e));
  }
  r.lhs = lhs;
  r.rhs = std::exp(log_rhs);
  r.constant = 1.0;
  r.ratio = lhs / r.rhs;
  r.passed = r.lhs <= r.rhs;
  r.estimate.fitted_C = 1.0;
  r.estimate.samples = 0;
  r.estimate.max_ratio = r.ratio;
  return r;
}

}  // namespace hankelobs
