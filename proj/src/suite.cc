#include "hankelobs/suite.h"

#include <algorithm>
#include <stdexcept>

#include "hankelobs/family.h"
#include "hankelobs/hankel.h"

namespace hankelobs {
namespace {

using Builder = std::function<InequalityInstance(const GridFunction&)>;

std::vector<InequalityInstance> over(const std::vector<GridFunction>& data,
                                     const Builder& build) {
  std::vector<InequalityInstance> out;
  out.reserve(data.size());
  for (const GridFunction& u : data) out.push_back(build(u));
  return out;
}

std::vector<InequalityInstance> over_spectral(
    const std::vector<SpectralPair>& data,
    InequalityInstance (*build)(const VerificationSpec&, const GridFunction&,
                                const GridFunction&),
    const VerificationSpec& spec) {
  std::vector<InequalityInstance> out;
  out.reserve(data.size());
  for (const SpectralPair& p : data) out.push_back(build(spec, p.f, p.transform));
  return out;
}

SuiteResult lr_sweep(const std::string& id) {
  const bool exponential = id == "lr_a";
  const std::vector<double> xs = {0.05, 0.25, 0.5, 0.75, 0.95};
  const std::vector<double> thetas = {0.1, 0.3, 0.5, 0.7, 0.9};
  const std::vector<double> thirds = {0.25, 0.5, 1.0, 2.0, 4.0};
  SuiteResult r{.id = id, .estimate = std::nullopt, .reports = {}, .passed = true};
  for (double x : xs) {
    for (double theta : thetas) {
      for (double third : thirds) {
        SummationParams p;
        p.x = x;
        p.theta = theta;
        if (exponential) {
          p.a = third;
        } else {
          p.epsilon = third;
        }
        r.reports.push_back(lr_bound_check(
            exponential ? SummationVariant::kExponential
                        : SummationVariant::kPower,
            p));
        r.passed = r.passed && r.reports.back().passed;
      }
    }
  }
  return r;
}

}  // namespace

const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = {
      "t1i", "t1ii", "t1iii", "t2", "c3",   "t3i",  "t3ii", "t4",   "t5",
      "t8",  "t9",   "l7",    "c1", "c2",   "lr_a", "lr_b", "hardy"};
  return ids;
}

bool is_inequality_id(const std::string& id) {
  const auto& ids = inequality_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

VerificationSpec default_spec(const std::string& id, double nu) {
  if (!is_inequality_id(id)) {
    throw std::invalid_argument("unknown inequality id " + id);
  }
  VerificationSpec s;
  s.nu = nu;
  if (id == "t1i") {
    s.A = IntervalSet({{0.0, 1.0}});
    s.B = IntervalSet({{0.0, 1.0}});
  } else if (id == "t1ii") {
    s.A = IntervalSet({{0.0, 0.05}});
    s.B = IntervalSet({{0.0, 0.05}});
  } else if (id == "t1iii") {
    s.A = IntervalSet({{0.0, 2.0}});
    s.B = IntervalSet({{0.0, 2.0}});
  } else if (id == "t2") {
    s.A = IntervalSet({{0.0, 0.2}});
    s.B = IntervalSet({{0.0, 0.2}});
  } else if (id == "t3i") {
    s.b = 2.0;
  } else if (id == "t3ii") {
    s.b = 2.0;
    s.beta = 1.5;
    s.gamma = 0.5;
  } else if (id == "t4") {
    s.A = IntervalSet({{1.0, 2.0}});
    s.B = IntervalSet({{4.0, 6.0}});
  } else if (id == "t5") {
    s.b = 1.0;
    s.N = 3.0;
  } else if (id == "t8") {
    s.B = IntervalSet({{10.0, 12.0}});
    s.lambda = 0.1;
    s.lambda2 = 0.1;
    s.epsilon = 0.5;
  } else if (id == "t9") {
    s.B = IntervalSet({{4.0, 6.0}});
    s.epsilon = 0.3;
  } else if (id == "l7" || id == "c1" || id == "c2") {
    s.A = IntervalSet({{1.0, 2.0}});
    s.B = IntervalSet({{4.0, 6.0}});
    s.b = 1.0;
    s.N = 4.0;
  }
  return s;
}

std::vector<InequalityInstance> build_family(const std::string& id,
                                             const VerificationSpec& spec,
                                             const GridPtr& grid, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("family size must be >= 1");
  const double nu = spec.nu;
  // Held so every member reuses one operator.
  const HankelPtr op = hankel_operator(nu, grid);
  auto gauss = [&] { return gaussian_family(grid, nu, count, seed); };
  auto bumps = [&](const BumpFamilyParams& p) {
    return bump_family(grid, count, seed, p);
  };
  if (id == "t1i" || id == "t1ii" || id == "t1iii") {
    const TwoPointCase which = id == "t1i"    ? TwoPointCase::kHalfInteger
                               : id == "t1ii" ? TwoPointCase::kSmallSet
                                              : TwoPointCase::kHalfLines;
    return over(gauss(), [&](const GridFunction& u) {
      return two_point_instance(spec, which, u);
    });
  }
  if (id == "t2") {
    return over(gauss(), [&](const GridFunction& u) {
      return uncertainty_instance(nu, spec.A, spec.B, u);
    });
  }
  if (id == "c3") {
    return over(gauss(), [&](const GridFunction& u) {
      return time_interval_instance(nu, spec.r, spec.T, u);
    });
  }
  if (id == "t3i" || id == "t3ii") {
    const T3Variant v =
        id == "t3i" ? T3Variant::kExponential : T3Variant::kSuperExponential;
    return over(bumps({}), [&](const GridFunction& u) {
      return t3_instance(spec, u, v);
    });
  }
  if (id == "t4") {
    return over(bumps({}), [&](const GridFunction& u) {
      return t4_instance(spec, u);
    });
  }
  if (id == "t5") {
    BumpFamilyParams p;
    p.window_min = std::min(0.2, 0.1 * spec.N);
    p.window_max = spec.N;
    p.length_max = std::min(2.5, spec.N - p.window_min);
    p.length_min = std::min(1.0, p.length_max);
    return over(bumps(p), [&](const GridFunction& u) {
      return t5_instance(spec, u);
    });
  }
  if (id == "t8") {
    return over(bumps({}), [&](const GridFunction& u) {
      return t8_instance(spec, u);
    });
  }
  if (id == "t9") {
    BumpFamilyParams p;
    p.window_min = 2.0;
    p.window_max = 10.0;
    p.length_max = 4.0;
    return over(bumps(p), [&](const GridFunction& u) {
      return t9_instance(spec, u);
    });
  }
  if (id == "l7" || id == "c1" || id == "c2") {
    const auto data = spectral_bump_family(*op, spec.N, count, seed);
    auto* build = id == "l7"   ? &l7_instance
                  : id == "c1" ? &c1_instance
                               : &c2_instance;
    return over_spectral(data, build, spec);
  }
  throw std::invalid_argument("no instance family for id " + id);
}

SuiteResult run_suite(const std::string& id, const VerificationSpec& spec,
                      const GridPtr& grid, int count, std::uint64_t seed) {
  if (!is_inequality_id(id)) {
    throw std::invalid_argument("unknown inequality id " + id);
  }
  if (id == "lr_a" || id == "lr_b") return lr_sweep(id);
  SuiteResult r{.id = id, .estimate = std::nullopt, .reports = {}, .passed = true};
  if (id == "hardy") {
    if (count < 1) throw std::invalid_argument("family size must be >= 1");
    for (const GridFunction& u : bump_family(grid, count, seed)) {
      InequalityReport rep = hardy_check(u);
      rep.seed = seed;
      r.reports.push_back(std::move(rep));
      r.passed = r.passed && r.reports.back().passed;
    }
    return r;
  }
  const auto family = build_family(id, spec, grid, count, seed);
  const FamilyCertificate cert = certify(family, seed);
  if (!family.front().fixed_constant) r.estimate = cert.estimate;
  r.reports = cert.reports;
  r.passed = cert.passed;
  return r;
}

Json to_json(const SuiteResult& result) {
  Json j;
  j["id"] = result.id;
  j["estimate"] = result.estimate ? to_json(*result.estimate) : Json(nullptr);
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  j["reports"] = std::move(reports);
  j["passed"] = result.passed;
  return j;
}

}  // namespace hankelobs
