#include "hankelobs/control.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "hankelobs/propagator.h"

namespace hankelobs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResidualTarget = 1e-3;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate(const ControlProblem& p) {
  require(p.nu >= 0.0, "nu must be >= 0");
  require_same_grid(p.u0.grid(), p.uT.grid());
  require(p.T > 0.0, "horizon T must be positive");
  require(p.epsilon > 0.0, "epsilon must be positive");
  require(!p.impulses.empty(), "at least one impulse is needed");
  for (std::size_t i = 0; i < p.impulses.size(); ++i) {
    const double t = p.impulses[i].time;
    require(t >= 0.0 && t <= p.T, "impulse times must lie in [0, T]");
    require(i == 0 || t > p.impulses[i - 1].time,
            "impulse times must be strictly increasing");
    require(!p.impulses[i].mask.empty(), "impulse mask is empty");
    require(p.impulses[i].mask.indicator(p.u0.grid()).sum() > 0.0,
            "impulse mask contains no grid node");
  }
  if (p.target_N) require(*p.target_N > 0.0, "target N must be positive");
  require(p.cg.max_iter > 0 && p.cg.tol > 0.0, "invalid CG options");
}

// Left end b of a mask [b, ∞) = [0, b]^c.
double single_gap(const ControlProblem& p) {
  require(p.impulses.size() == 1, "this problem takes a single impulse");
  const auto& ivs = p.impulses.front().mask.intervals();
  require(ivs.size() == 1 && std::isinf(ivs.front().b) && ivs.front().a > 0.0,
          "mask must be [0, b]^c with b > 0");
  return ivs.front().a;
}

double norm(const RadialGrid& grid, const ComplexVector& v) {
  return std::sqrt(std::max(0.0, inner(grid, v, v).real()));
}

struct CgResult {
  ComplexVector x;
  int iterations = 0;
  double condition = kNaN;
};

// Extreme eigenvalues of the Lanczos matrix built from the CG coefficients.
double lanczos_condition(const std::vector<double>& alpha,
                         const std::vector<double>& beta) {
  const int m = static_cast<int>(alpha.size());
  if (m == 0) return kNaN;
  RealMatrix t = RealMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    t(j, j) = 1.0 / alpha[j] + (j > 0 ? beta[j - 1] / alpha[j - 1] : 0.0);
    if (j + 1 < m) {
      t(j, j + 1) = std::sqrt(beta[j]) / alpha[j];
      t(j + 1, j) = t(j, j + 1);
    }
  }
  const RealVector ev = Eigen::SelfAdjointEigenSolver<RealMatrix>(
                            t, Eigen::EigenvaluesOnly)
                            .eigenvalues();
  return ev.maxCoeff() / ev.minCoeff();
}

// CG for an operator self-adjoint and positive in the grid inner product.
CgResult conjugate_gradient(
    const RadialGrid& grid,
    const std::function<ComplexVector(const ComplexVector&)>& apply,
    const ComplexVector& b, const CgOptions& options) {
  CgResult out;
  out.x = ComplexVector::Zero(b.size());
  const double b_norm = norm(grid, b);
  if (b_norm == 0.0) return out;
  ComplexVector r = b;
  ComplexVector p = r;
  double rs = inner(grid, r, r).real();
  std::vector<double> alphas, betas;
  for (int k = 1; k <= options.max_iter; ++k) {
    const ComplexVector ap = apply(p);
    const double alpha = rs / inner(grid, p, ap).real();
    out.x += alpha * p;
    r -= alpha * ap;
    const double rs_next = inner(grid, r, r).real();
    alphas.push_back(alpha);
    out.iterations = k;
    if (std::sqrt(rs_next) <= options.tol * b_norm) {
      out.condition = lanczos_condition(alphas, betas);
      return out;
    }
    const double beta = rs_next / rs;
    betas.push_back(beta);
    p = r + beta * p;
    rs = rs_next;
  }
  const double condition = lanczos_condition(alphas, betas);
  std::ostringstream os;
  os << "CG did not converge in " << options.max_iter
     << " iterations (relative residual " << std::sqrt(rs) / b_norm
     << ", condition estimate " << condition << ")";
  throw ConvergenceError(os.str(), condition);
}

RealVector target_indicator(const ControlProblem& p) {
  const RadialGrid& grid = p.u0.grid();
  if (!p.target_N) return RealVector::Ones(grid.n());
  return IntervalSet({{0.0, *p.target_N}}).indicator(grid);
}

// Controls f_i = iχ_iψ(t_i) from the dual variable g, then the bookkeeping
// every HUM solve shares.
ControlSolution finish_dual(const ControlProblem& p, const Gramian& gram,
                            const ComplexVector& g, const ComplexVector& z) {
  const RadialGrid& grid = gram.grid();
  const GridPtr& gp = p.u0.grid_ptr();
  ControlSolution s{
      .controls = {}, .achieved = GridFunction(gp), .terms = {}, .flags = {}};
  for (const ComplexVector& h : gram.observe(g)) {
    s.controls.emplace_back(gp, Complex(0.0, 1.0) * h);
  }
  for (const GridFunction& f : s.controls) s.cost += l2_norm_sq(f);
  s.achieved = forward_controlled(p, s.controls);
  const RealVector keep = target_indicator(p);
  const ComplexVector miss =
      keep.cwiseProduct(s.achieved.values() - p.uT.values());
  s.residual = norm(grid, miss);
  s.rhs_norm = norm(grid, z);
  s.relative_residual = s.rhs_norm > 0.0 ? s.residual / s.rhs_norm : 0.0;
  s.terms.push_back({"epsilon", p.epsilon});
  s.terms.push_back({"dual_norm", norm(grid, g)});
  s.terms.push_back({"cost_over_rhs_sq",
                     s.rhs_norm > 0.0 ? s.cost / (s.rhs_norm * s.rhs_norm)
                                      : 0.0});
  return s;
}

ComplexVector reachability_gap(const ControlProblem& p) {
  return p.uT.values() - forward_controlled(p, {}).values();
}

}  // namespace

double ControlSolution::term(const std::string& name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return value;
  }
  throw std::out_of_range("no term named " + name);
}

Json to_json(const ControlSolution& s,
             const std::vector<std::string>& control_refs) {
  Json terms = Json::object();
  for (const auto& [k, v] : s.terms) terms[k] = v;
  Json j;
  j["controls"] = control_refs;
  j["cost"] = s.cost;
  j["residual"] = s.residual;
  j["rhs_norm"] = s.rhs_norm;
  j["relative_residual"] = s.relative_residual;
  j["iterations"] = s.iterations;
  j["gramian_condition"] = s.gramian_condition;
  j["terms"] = std::move(terms);
  j["passed"] = s.passed;
  j["flags"] = s.flags;
  j["grid"] = {{"n", s.achieved.grid().n()},
               {"x_max", s.achieved.grid().x_max()}};
  return j;
}

Complex inner(const RadialGrid& grid, const ComplexVector& a,
              const ComplexVector& b) {
  return a.dot(grid.weights().cast<Complex>().cwiseProduct(b));
}

Gramian::Gramian(const ControlProblem& problem)
    : op_(hankel_operator(problem.nu, problem.u0.grid_ptr())),
      T_(problem.T) {
  validate(problem);
  for (const Impulse& imp : problem.impulses) {
    times_.push_back(imp.time);
    masks_.push_back(imp.mask.indicator(problem.u0.grid()));
  }
}

ComplexVector Gramian::flow(double t, const ComplexVector& v) const {
  if (t == 0.0) return v;
  return evolve_spectral(*op_, t, v);
}

std::vector<ComplexVector> Gramian::observe(const ComplexVector& g) const {
  std::vector<ComplexVector> out(times_.size());
  ComplexVector h = g;
  double now = T_;
  for (std::size_t i = times_.size(); i-- > 0;) {
    h = flow(times_[i] - now, h);
    now = times_[i];
    out[i] = masks_[i].cast<Complex>().cwiseProduct(h);
  }
  return out;
}

ComplexVector Gramian::synthesize(const std::vector<ComplexVector>& h) const {
  ComplexVector v = ComplexVector::Zero(op_->grid().n());
  double now = times_.front();
  for (std::size_t i = 0; i < times_.size(); ++i) {
    v = flow(times_[i] - now, v);
    now = times_[i];
    v += masks_[i].cast<Complex>().cwiseProduct(h[i]);
  }
  return flow(T_ - now, v);
}

ComplexVector Gramian::apply(const ComplexVector& g) const {
  return synthesize(observe(g));
}

ComplexMatrix Gramian::assemble() const {
  const int n = op_->grid().n();
  ComplexMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    m.col(j) = apply(ComplexVector::Unit(n, j));
  }
  return m;
}

GridFunction forward_controlled(const ControlProblem& problem,
                                const std::vector<GridFunction>& controls) {
  validate(problem);
  require(controls.empty() || controls.size() == problem.impulses.size(),
          "one control per impulse is needed");
  const HankelPtr op = hankel_operator(problem.nu, problem.u0.grid_ptr());
  const RadialGrid& grid = problem.u0.grid();
  auto flow = [&](double t, const ComplexVector& v) -> ComplexVector {
    return t == 0.0 ? v : evolve_spectral(*op, t, v);
  };
  ComplexVector u = problem.u0.values();
  double now = 0.0;
  for (std::size_t i = 0; i < problem.impulses.size(); ++i) {
    const Impulse& imp = problem.impulses[i];
    u = flow(imp.time - now, u);
    now = imp.time;
    if (!controls.empty()) {
      require_same_grid(grid, controls[i].grid());
      u -= Complex(0.0, 1.0) *
           imp.mask.indicator(grid).cast<Complex>().cwiseProduct(
               controls[i].values());
    }
  }
  return GridFunction(problem.u0.grid_ptr(), flow(problem.T - now, u));
}

ControlSolution solve_two_impulse(const ControlProblem& problem) {
  require(problem.impulses.size() == 2, "two impulses are needed");
  require(!problem.target_N, "use solve_truncated_target for a target on [0, N]");
  const Gramian gram(problem);
  const ComplexVector z = reachability_gap(problem);
  const double eps = problem.epsilon;
  const CgResult cg = conjugate_gradient(
      gram.grid(),
      [&](const ComplexVector& g) -> ComplexVector {
        return gram.apply(g) + eps * g;
      },
      z, problem.cg);
  ControlSolution s = finish_dual(problem, gram, cg.x, z);
  s.iterations = cg.iterations;
  s.gramian_condition = cg.condition;
  s.passed = s.relative_residual <= kResidualTarget;
  return s;
}

ControlSolution solve_two_impulse_dense(const ControlProblem& problem) {
  require(problem.impulses.size() == 2, "two impulses are needed");
  require(!problem.target_N, "use solve_truncated_target for a target on [0, N]");
  const Gramian gram(problem);
  const ComplexVector z = reachability_gap(problem);
  const int n = gram.grid().n();
  const ComplexMatrix m =
      gram.assemble() + problem.epsilon * ComplexMatrix::Identity(n, n);
  const ComplexVector g = m.partialPivLu().solve(z);
  ControlSolution s = finish_dual(problem, gram, g, z);
  // W^{½}MW^{−½} is Hermitian when M is self-adjoint in the grid product.
  const RealVector sw = gram.grid().weights().cwiseSqrt();
  const ComplexMatrix h = sw.asDiagonal() * m * sw.cwiseInverse().asDiagonal();
  const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(
                            0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly)
                            .eigenvalues();
  s.gramian_condition = ev.maxCoeff() / ev.minCoeff();
  s.passed = s.relative_residual <= kResidualTarget;
  return s;
}

ControlSolution solve_epsilon_weighted(const ControlProblem& problem,
                                       const WeightedControlParams& params) {
  validate(problem);
  require(!problem.target_N, "the weighted problem has no truncated target");
  const double b = single_gap(problem);
  require(params.lambda > 0.0, "lambda must be positive");
  require(params.theta > 0.0 && params.theta < 1.0, "theta must lie in (0, 1)");
  require(params.C >= 0.0, "C must be >= 0");
  const double s_time = problem.impulses.front().time;
  require(s_time < problem.T, "the impulse must come before T");
  const double span = params.lambda * (problem.T - s_time);
  const double q = std::pow(params.theta, 1.0 + b / span);
  const double eps = problem.epsilon;
  const double alpha = std::pow(eps, (1.0 - q) / q);

  const Gramian gram(problem);
  const RadialGrid& grid = gram.grid();
  const RealVector weight =
      (-params.lambda * grid.nodes().array()).exp().matrix();
  const ComplexVector z = reachability_gap(problem);
  const auto observe1 = [&](const ComplexVector& v) {
    return gram.observe(v).front();
  };
  // (αε + L*WL) f = iL*Wz.
  const ComplexVector rhs =
      Complex(0.0, 1.0) * observe1(weight.cast<Complex>().cwiseProduct(z));
  const CgResult cg = conjugate_gradient(
      grid,
      [&](const ComplexVector& f) -> ComplexVector {
        const ComplexVector lf = gram.synthesize({f});
        return alpha * eps * f +
               observe1(weight.cast<Complex>().cwiseProduct(lf));
      },
      rhs, CgOptions{problem.cg.max_iter, params.gradient_tol});

  const GridPtr& gp = problem.u0.grid_ptr();
  ControlSolution s{.controls = {GridFunction(gp, cg.x)},
                    .achieved = GridFunction(gp),
                    .terms = {},
                    .flags = {}};
  s.cost = l2_norm_sq(s.controls.front());
  s.achieved = forward_controlled(problem, s.controls);
  const ComplexVector miss = s.achieved.values() - problem.uT.values();
  s.residual = norm(grid, miss);
  s.rhs_norm = norm(grid, z);
  s.relative_residual = s.rhs_norm > 0.0 ? s.residual / s.rhs_norm : 0.0;
  s.iterations = cg.iterations;
  s.gramian_condition = cg.condition;

  const double tracking =
      grid.weights().dot(weight.cwiseProduct(miss.cwiseAbs2()));
  const double functional = alpha * s.cost + tracking / eps;
  const double bound =
      params.C *
      (1.0 + std::pow(b, 2.0 * problem.nu + 2.0) /
                 std::pow(span, 2.0 * problem.nu + 2.0)) *
      s.rhs_norm * s.rhs_norm;
  s.terms = {{"epsilon", eps},          {"q", q},
             {"alpha", alpha},          {"cost_term", alpha * s.cost},
             {"tracking_error", tracking}, {"tracking_term", tracking / eps},
             {"functional", functional}, {"bound", bound}};
  s.passed = functional <= bound;
  if (!s.passed) s.flags.push_back("functional_above_bound");
  return s;
}

ControlSolution solve_truncated_target(const ControlProblem& problem,
                                       std::optional<double> C) {
  validate(problem);
  require(problem.target_N.has_value(), "target N is required");
  const double b = single_gap(problem);
  const double s_time = problem.impulses.front().time;
  require(s_time < problem.T, "the impulse must come before T");
  const Gramian gram(problem);
  const RealVector keep = target_indicator(problem);
  const ComplexVector pz =
      keep.cast<Complex>().cwiseProduct(reachability_gap(problem));
  const double eps = problem.epsilon;
  const CgResult cg = conjugate_gradient(
      gram.grid(),
      [&](const ComplexVector& g) -> ComplexVector {
        return keep.cast<Complex>().cwiseProduct(
                   gram.apply(keep.cast<Complex>().cwiseProduct(g))) +
               eps * g;
      },
      pz, problem.cg);
  ControlSolution s = finish_dual(problem, gram, cg.x, pz);
  s.iterations = cg.iterations;
  s.gramian_condition = cg.condition;
  const double exponent = 1.0 + b * *problem.target_N / (problem.T - s_time);
  s.terms.push_back({"bN_over_T_minus_s", exponent - 1.0});
  if (C) {
    const double full = norm(gram.grid(), reachability_gap(problem));
    const double log_bound = *C * exponent + 2.0 * std::log(full);
    s.terms.push_back({"log_cost_bound", log_bound});
    if (s.cost > 0.0 && std::log(s.cost) > log_bound) {
      s.flags.push_back("cost_above_bound");
    }
  }
  s.passed = s.relative_residual <= kResidualTarget;
  return s;
}

double penalized_objective(const ControlProblem& problem,
                           const std::vector<GridFunction>& controls) {
  const GridFunction u = forward_controlled(problem, controls);
  const RealVector keep = target_indicator(problem);
  const ComplexVector miss = keep.cwiseProduct(u.values() - problem.uT.values());
  double cost = 0.0;
  for (const GridFunction& f : controls) cost += l2_norm_sq(f);
  return cost + norm(problem.u0.grid(), miss) *
                    norm(problem.u0.grid(), miss) / problem.epsilon;
}

}  // namespace hankelobs
