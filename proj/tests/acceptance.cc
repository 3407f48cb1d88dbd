// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Default configuration n = 2048, x_max = 24.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli_runner.h"
#include "hankelobs/analysis.h"
#include "hankelobs/control.h"
#include "hankelobs/family.h"
#include "hankelobs/hankel.h"
#include "hankelobs/propagator.h"
#include "hankelobs/sharpness.h"
#include "hankelobs/specfun.h"
#include "hankelobs/suite.h"
#include "test_util.h"

namespace hankelobs {
namespace {

using std::numbers::pi;
using test::grid_norm;
using test::rel_diff;

const std::vector<double> kOrders = {0.0, 0.5, 1.0, 2.5};
constexpr int kN = 2048;
constexpr double kXMax = 24.0;

// Accumulates checks for one criterion; the first few failures are kept for
// the summary line.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) failed_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failures_ == 0; }

  std::string summary() const {
    std::ostringstream os;
    os << checks_ << " checks";
    for (const auto& n : notes_) os << "; " << n;
    if (failures_ > 0) {
      os << "; " << failures_ << " failed:";
      for (const auto& f : failed_) os << " [" << f << "]";
    }
    return os.str();
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::vector<std::string> failed_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  }
  return out;
}

void special_functions(Tally& t) {
  double worst = 0.0;
  for (double x : log_space(1e-3, 100.0, 1000)) {
    const double closed = std::sqrt(2.0 / (pi * x)) * std::sin(x);
    worst = std::max(worst, std::abs(bessel_j(0.5, x) - closed));
  }
  t.check(worst <= 1e-10, "J_1/2 closed form " + fmt("%.2e", worst));
  t.note("J_1/2 max abs error " + fmt("%.1e", worst));

  for (double nu : kOrders) {
    for (double x : log_space(1e-3, 1e3, 200)) {
      t.check(std::abs(bessel_j(nu, x)) <= k_nu(nu) / std::sqrt(x),
              "decay bound nu=" + fmt("%g", nu) + " x=" + fmt("%g", x));
    }
    std::vector<std::pair<double, double>> samples;
    for (double x : log_space(0.1, 5.0, 20)) {
      for (double y : log_space(0.1, 5.0, 20)) samples.push_back({x, y});
    }
    for (int k = 0; k <= 2; ++k) {
      t.check(kernel_derivative_bound_check(nu, k, samples),
              "kernel derivative nu=" + fmt("%g", nu) + " k=" + fmt("%g", k));
    }
  }
}

void hankel_operator_checks(Tally& t) {
  const GridPtr g = make_grid(kN, kXMax);
  double worst_defect = 0.0;
  double worst_eigen = 0.0;
  for (double nu : kOrders) {
    const HankelPtr op = hankel_operator(nu, g);
    for (const GridFunction& f : gaussian_family(g, nu, 20, 201)) {
      t.check(band_limited(f), "family member not band-limited");
      const double norm = std::sqrt(l2_norm_sq(f));
      const double image = std::sqrt(l2_norm_sq(forward(*op, f)));
      const double plancherel = std::abs(image - norm) / norm;
      const double involution = involution_defect(*op, f);
      worst_defect = std::max({worst_defect, plancherel, involution});
      t.check(plancherel <= 1e-4, "Plancherel nu=" + fmt("%g", nu));
      t.check(involution <= 1e-4, "involution nu=" + fmt("%g", nu));
    }
    const GridFunction phi = gaussian_eigenfunction(g, nu);
    const double eigen = rel_diff(forward(*op, phi), phi);
    worst_eigen = std::max(worst_eigen, eigen);
    t.check(eigen <= 1e-6, "eigenfunction nu=" + fmt("%g", nu));
  }
  t.note("max defect " + fmt("%.1e", worst_defect));
  t.note("eigenfunction " + fmt("%.1e", worst_eigen));

  double min_order = std::numeric_limits<double>::infinity();
  for (double nu : kOrders) {
    std::vector<double> defects;
    for (int n : {512, 1024, 2048}) {
      const GridPtr gn = make_grid(n, kXMax);
      const HankelPtr op = hankel_operator(nu, gn);
      double worst = 0.0;
      for (const GridFunction& f : gaussian_family(gn, nu, 5, 202)) {
        worst = std::max(worst, involution_defect(*op, f));
      }
      defects.push_back(worst);
    }
    for (std::size_t i = 1; i < defects.size(); ++i) {
      // Both at rounding level: nothing left to converge.
      if (defects[i - 1] < 1e-12 && defects[i] < 1e-12) continue;
      const double order = std::log2(defects[i - 1] / defects[i]);
      min_order = std::min(min_order, order);
      t.check(order >= 1.5, "order nu=" + fmt("%g", nu) + " " +
                                fmt("%.2f", order));
    }
  }
  t.note("min refinement order " + fmt("%.2f", min_order));
}

// Dirichlet half-line free propagator by images, Gauss-Legendre in y.
template <typename F>
GridFunction image_method(const GridPtr& grid, double t, double a, double b,
                          F&& u0) {
  const auto [y, w] = composite_gauss_legendre(IntervalSet({{a, b}}), 0.05, 16);
  const Complex pref = std::polar(1.0 / std::sqrt(4.0 * pi * t), -pi / 4.0);
  return GridFunction::sample(grid, [&](double x) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double dm = x - y[j], dp = x + y[j];
      acc += w[j] * u0(y[j]) *
             (std::polar(1.0, dm * dm / (4.0 * t)) -
              std::polar(1.0, dp * dp / (4.0 * t)));
    }
    return pref * acc;
  });
}

void propagator_checks(Tally& t) {
  const GridPtr g = make_grid(kN, kXMax);
  double worst_cross = 0.0, worst_cons = 0.0;
  for (double nu : kOrders) {
    const HankelPtr op = hankel_operator(nu, g);
    auto spectral = [&](double time, const GridFunction& u) {
      return GridFunction(g, evolve_spectral(*op, time, u.values()));
    };
    for (const GridFunction& u0 : gaussian_family(g, nu, 5, 301)) {
      for (double time : {0.5, 1.0, 2.0}) {
        const GridFunction c(g, evolve_chirp(*op, time, u0.values()));
        const GridFunction s = spectral(time, u0);
        const double cross = rel_diff(c, s);
        const double cons =
            std::max(std::abs(std::sqrt(l2_norm_sq(c)) - 1.0),
                     std::abs(std::sqrt(l2_norm_sq(s)) - 1.0));
        worst_cross = std::max(worst_cross, cross);
        worst_cons = std::max(worst_cons, cons);
        t.check(cross <= 1e-3, "chirp vs spectral nu=" + fmt("%g", nu));
        t.check(cons <= 1e-4, "conservation nu=" + fmt("%g", nu));
      }
    }
    auto rng = test::seeded(302);
    for (const GridFunction& u0 : gaussian_family(g, nu, 3, 303)) {
      const double t1 = test::uniform(rng, 0.1, 1.0);
      const double t2 = test::uniform(rng, 0.1, 1.0);
      const GridFunction mid = spectral(t2, u0);
      const GridFunction direct = spectral(t1 + t2, u0);
      const double tol = 2.0 * std::max({involution_defect(*op, u0),
                                         involution_defect(*op, mid),
                                         involution_defect(*op, direct), 1e-13});
      t.check(rel_diff(spectral(t1, mid), direct) <= tol,
              "group law nu=" + fmt("%g", nu));
      const GridFunction there = spectral(t1, u0);
      const double back = 2.0 * std::max({involution_defect(*op, u0),
                                          involution_defect(*op, there), 1e-13});
      t.check(rel_diff(spectral(-t1, there), u0) <= back,
              "time reversal nu=" + fmt("%g", nu));
    }
  }
  auto gauss = [](double x) { return x * std::exp(-0.8 * (x - 6.0) * (x - 6.0)); };
  const GridFunction smooth =
      GridFunction::sample(g, [&](double x) { return Complex(gauss(x)); });
  const HankelPtr half = hankel_operator(0.5, g);
  double worst_image = 0.0;
  for (double time : {0.5, 1.0, 2.0}) {
    const GridFunction oracle = image_method(g, time, 0.0, 14.0, gauss);
    const double c =
        rel_diff(GridFunction(g, evolve_chirp(*half, time, smooth.values())),
                 oracle);
    const double s =
        rel_diff(GridFunction(g, evolve_spectral(*half, time, smooth.values())),
                 oracle);
    worst_image = std::max({worst_image, c, s});
    t.check(c <= 1e-3 && s <= 1e-3, "image method t=" + fmt("%g", time));
  }
  t.note("cross-route " + fmt("%.1e", worst_cross));
  t.note("conservation " + fmt("%.1e", worst_cons));
  t.note("image method " + fmt("%.1e", worst_image));
}

void explicit_constants(Tally& t) {
  const GridPtr g = make_grid(kN, kXMax);
  int fitted = 0;
  for (double nu : kOrders) {
    const HankelPtr op = hankel_operator(nu, g);
    // Two-point form: A = B = [0, a] at half the smallness threshold.
    VerificationSpec vs;
    vs.nu = nu;
    vs.S = 0.0;
    vs.T = 1.0;
    const double a = std::sqrt(0.25 * c_nu(nu) * (vs.T - vs.S) / pi);
    vs.A = IntervalSet({{0.0, a}});
    vs.B = vs.A;
    t.check(pi * a * a <= 0.5 * c_nu(nu) * (vs.T - vs.S), "T1(ii) regime");
    std::vector<InequalityInstance> two;
    for (const GridFunction& u : gaussian_family(g, nu, 50, 401)) {
      two.push_back(two_point_instance(vs, TwoPointCase::kSmallSet, u));
    }
    const FamilyCertificate c2 = certify(two, 401);
    fitted += c2.estimate.samples;
    t.check(c2.passed && c2.reports.size() == 50,
            "T1(ii) nu=" + fmt("%g", nu));

    // Uncertainty form with κ = k_ν √(2π|A||B|) = 1/2.
    const double r = 0.5 / (k_nu(nu) * std::sqrt(2.0 * pi));
    const IntervalSet small({{0.0, r}});
    std::vector<InequalityInstance> unc;
    for (const GridFunction& u : gaussian_family(g, nu, 50, 402)) {
      t.check(band_limited(u), "R2 data band-limited");
      unc.push_back(uncertainty_instance(nu, small, small, u));
    }
    t.check(unc.front().fixed_constant.has_value(), "R2 constant is printed");
    const FamilyCertificate cu = certify(unc, 402);
    fitted += cu.estimate.samples;
    t.check(cu.passed && cu.reports.size() == 50, "R2 nu=" + fmt("%g", nu));
  }
  const SuiteResult hardy = run_suite("hardy", {}, g, 50, 403);
  t.check(hardy.passed && hardy.reports.size() == 50, "Hardy");
  t.check(fitted == 0, "fitted parameters used");
  t.note("fitted parameters " + fmt("%g", fitted));
}

void fitted_constants(Tally& t) {
  const GridPtr g = make_grid(kN, kXMax);
  const std::vector<std::string> ids = {"t1i", "t1iii", "t3i", "t3ii",
                                        "t4",  "t5",    "t8",  "t9",
                                        "l7",  "c1",    "c2"};
  double worst_change = 0.0;
  for (double nu : kOrders) {
    const HankelPtr op = hankel_operator(nu, g);
    for (const std::string& id : ids) {
      const VerificationSpec spec = default_spec(id, nu);
      const std::string tag = id + " nu=" + fmt("%g", nu);
      const FamilyCertificate first =
          certify(build_family(id, spec, g, 30, 501), 501);
      const FamilyCertificate second =
          certify(build_family(id, spec, g, 30, 502), 502);
      t.check(first.passed, tag + " certify");
      for (const ConstantEstimate* e : {&first.estimate, &second.estimate}) {
        t.check(e->samples == 30 && std::isfinite(e->fitted_C) &&
                    e->fitted_C >= 0.0,
                tag + " finite C");
        if (e->theta) {
          t.check(*e->theta > 0.0 && *e->theta < 1.0, tag + " theta range");
        }
      }
      const double c1 = first.estimate.fitted_C;
      const double c2 = second.estimate.fitted_C;
      const double change = c1 > 0.0 ? std::abs(c2 - c1) / c1
                                     : (c2 == 0.0 ? 0.0 : INFINITY);
      worst_change = std::max(worst_change, change);
      t.check(change <= 0.5, tag + " refit change " + fmt("%.2f", change));
    }
  }
  t.note("max refit change " + fmt("%.2f", worst_change));
}

void summation_bounds(Tally& t) {
  for (const char* id : {"lr_a", "lr_b"}) {
    const SuiteResult r = run_suite(id, {}, nullptr, 0, 0);
    t.check(r.passed && r.reports.size() == 125, id);
  }
}

void sharpness_checks(Tally& t) {
  const GridFunction profile = default_profile();
  const std::vector<int> ks = {4, 8, 16, 32, 64};
  for (double nu : kOrders) {
    const SharpnessRun r6 = t6_family(nu, IntervalSet({{1.0, 2.0}}),
                                      IntervalSet({{4.0, 6.0}}), profile, ks);
    t.check(r6.fitted_rate >= -1.4 && r6.fitted_rate <= -0.6,
            "t6 slope nu=" + fmt("%g", nu) + " " + fmt("%.2f", r6.fitted_rate));
    t.note("t6 nu=" + fmt("%g", nu) + " slope " + fmt("%.2f", r6.fitted_rate));
    const SharpnessRun r7 =
        t7_family(nu, IntervalSet({{1.0, 2.0}}), 1.0, 1.0, profile, ks);
    // Cap ∫e^{λ(s+x₀)}|g(s)|² ds with λ = 1, x₀ = 1.5.
    const RealVector& s = profile.grid().nodes();
    const double cap = profile.grid().weights().dot(
        (s.array() + 1.5).exp().matrix().cwiseProduct(
            profile.values().cwiseAbs2()));
    for (double m : r7.metric("exp_moment")) {
      t.check(m <= cap * (1.0 + 1e-6), "t7 cap nu=" + fmt("%g", nu));
    }
    t.check(r7.passed, "t7 run nu=" + fmt("%g", nu));
  }
  const std::vector<double> Ns = {8.0, 12.0, 16.0, 20.0};
  for (double d0 : {0.5, 1.0, 2.0}) {
    const double floor = 0.4 * std::min(1.0, d0 * d0 / 4.0);
    for (double nu : {0.5, 1.0}) {
      const SharpnessRun r = ls1_gap(nu, IntervalSet({{d0, kXMax}}), Ns);
      const std::string tag = "ls1 d0=" + fmt("%g", d0) + " nu=" + fmt("%g", nu);
      t.check(r.fitted_rate >= floor, tag + " slope " + fmt("%.3f", r.fitted_rate));
      t.check(r.passed, tag + " norm trend");
      t.note(tag + " slope " + fmt("%.2f", r.fitted_rate));
    }
  }
}

ControlProblem two_impulse_problem(const GridPtr& g, const IntervalSet& A,
                                   const IntervalSet& B, std::uint64_t seed) {
  const auto fam = gaussian_family(g, 1.0, 2, seed);
  return ControlProblem{.nu = 1.0,
                        .u0 = fam[0],
                        .uT = fam[1],
                        .impulses = {{0.0, A.complement()},
                                     {1.0, B.complement()}},
                        .T = 1.0,
                        .epsilon = 1e-6,
                        .target_N = std::nullopt,
                        .cg = {}};
}

void control_checks(Tally& t) {
  const IntervalSet A({{1.0, 1.3}}), B({{2.0, 2.3}});
  const GridPtr g128 = make_grid(128, kXMax);
  const ControlProblem p128 = two_impulse_problem(g128, A, B, 801);
  const Gramian gram(p128);
  auto rng = test::seeded(802);
  double worst_sym = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ComplexVector a = test::random_complex(rng, g128->n());
    const ComplexVector b = test::random_complex(rng, g128->n());
    const Complex l = inner(*g128, gram.apply(a), b);
    const Complex r = inner(*g128, a, gram.apply(b));
    const double sym = std::abs(l - r) / std::abs(l);
    const Complex q = inner(*g128, gram.apply(a), a);
    const double scale = std::pow(grid_norm(*g128, a), 2);
    worst_sym = std::max(worst_sym, sym);
    t.check(sym <= 1e-10, "Gramian symmetry");
    t.check(q.real() >= -1e-10 * scale && std::abs(q.imag()) <= 1e-10 * scale,
            "Gramian positivity");
  }
  t.note("symmetry defect " + fmt("%.1e", worst_sym));

  const ControlSolution cg = solve_two_impulse(p128);
  const ControlSolution dense = solve_two_impulse_dense(p128);
  double diff = 0.0, ref = 0.0;
  for (int i = 0; i < 2; ++i) {
    diff += (cg.controls[i].values() - dense.controls[i].values()).squaredNorm();
    ref += dense.controls[i].values().squaredNorm();
  }
  t.check(std::sqrt(diff / ref) <= 1e-8, "CG vs dense");
  t.note("CG vs dense " + fmt("%.1e", std::sqrt(diff / ref)));

  const GridPtr g256 = make_grid(256, kXMax);
  const ControlSolution s = solve_two_impulse(two_impulse_problem(g256, A, B, 803));
  t.check(s.relative_residual <= 1e-3, "two-impulse residual");
  t.note("residual " + fmt("%.1e", s.relative_residual));

  const IntervalSet small({{0.0, 0.05}});
  const ControlProblem ps = two_impulse_problem(g256, small, small, 804);
  VerificationSpec vs;
  vs.nu = 1.0;
  vs.A = small;
  vs.B = small;
  vs.S = 0.0;
  vs.T = 1.0;
  const InequalityReport t1 =
      evaluate(two_point_instance(vs, TwoPointCase::kSmallSet, ps.u0), {});
  const double c_obs = t1.constant;
  const ControlSolution so = solve_two_impulse(ps);
  t.check(so.relative_residual <= 1e-3, "small-set residual");
  t.check(so.cost <= c_obs * so.rhs_norm * so.rhs_norm, "cost within C_obs");
  t.note("cost/(C_obs|z|^2) " +
         fmt("%.2f", so.cost / (c_obs * so.rhs_norm * so.rhs_norm)));

  const double best = penalized_objective(p128, cg.controls);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GridFunction> moved = cg.controls;
    for (GridFunction& f : moved) {
      ComplexVector d = test::random_complex(rng, g128->n());
      d *= 1e-3 / grid_norm(*g128, d);
      f = GridFunction(g128, f.values() + d);
    }
    t.check(penalized_objective(p128, moved) >= best, "perturbation");
  }
}

void cli_checks(Tally& t) {
  using nlohmann::json;
  const std::vector<std::string> runs = {
      "--seed 3 evolve --nu 1 --t 1 --u0 gauss:6,1",
      "--seed 3 verify t1ii --nu 1 --A 0,0.05 --B 0,0.05 --T 1 --family 50",
      "--seed 3 sharpness t6 --nu 1",
      "--n 256 --seed 3 control two-impulse --nu 1"};
  for (const std::string& args : runs) {
    const auto a = test::run_cli(args);
    const auto b = test::run_cli(args);
    t.check(a.code == 0, args + " exit " + fmt("%g", a.code));
    t.check(!a.out.empty() && a.out == b.out, args + " determinism");
    t.check(json::accept(a.out), args + " json");
  }
  const std::vector<std::pair<std::string, int>> failing = {
      {"verify nosuch", 2},
      {"evolve --nu 0.5 --t 0.001 --u0 bump:3,5", 2},
      {"verify t1ii --nu 1 --A 0,1 --B 0,1 --T 1", 2},
      {"--n 128 control two-impulse --A 2,1", 2},
      {"--n 128 control two-impulse --max-iter 1", 3},
  };
  for (const auto& [args, code] : failing) {
    const auto r = test::run_cli(args);
    t.check(r.code == code, args + " exit " + fmt("%g", r.code));
    t.check(!r.err.empty(), args + " message");
  }
}

}  // namespace
}  // namespace hankelobs

int main() {
  using namespace hankelobs;
  using Clock = std::chrono::steady_clock;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Tally&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "special functions", 5, special_functions},
      {2, "Hankel operator", 60, hankel_operator_checks},
      {3, "propagator", 120, propagator_checks},
      {4, "explicit-constant inequalities", 600, explicit_constants},
      {5, "fitted-constant inequalities", 1200, fitted_constants},
      {6, "summation bounds", 5, summation_bounds},
      {7, "sharpness", 300, sharpness_checks},
      {8, "control", 600, control_checks},
      {9, "CLI", 60, cli_checks},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    Tally tally;
    const auto start = Clock::now();
    try {
      c.run(tally);
    } catch (const std::exception& e) {
      tally.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - start).count();
    tally.check(secs <= c.budget_s, "runtime over budget");
    std::printf("%s criterion %d (%s): %s; %.1f s\n",
                tally.ok() ? "PASS" : "FAIL", c.id, c.name,
                tally.summary().c_str(), secs);
    std::fflush(stdout);
    all = all && tally.ok();
  }
  return all ? 0 : 1;
}
