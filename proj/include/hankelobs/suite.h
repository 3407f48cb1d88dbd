#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hankelobs/analysis.h"
#include "hankelobs/grid.h"
#include "hankelobs/report.h"

namespace hankelobs {

/// Inequality ids understood by run_suite, in display order.
const std::vector<std::string>& inequality_ids();
bool is_inequality_id(const std::string& id);

/// The parameters each id runs with unless overridden.
VerificationSpec default_spec(const std::string& id, double nu);

/// Random data the id is exercised on: Gaussian superpositions for the
/// two-point, uncertainty and time-interval forms, shifted bumps for the
/// weighted forms, transforms of carrier-modulated bumps for the
/// interpolation forms.
std::vector<InequalityInstance> build_family(const std::string& id,
                                             const VerificationSpec& spec,
                                             const GridPtr& grid, int count,
                                             std::uint64_t seed);

struct SuiteResult {
  std::string id;
  std::optional<ConstantEstimate> estimate;  // absent for printed constants
  std::vector<InequalityReport> reports;
  bool passed = false;
};

/// Fits where needed and evaluates every member. lr_a and lr_b ignore the
/// grid and count and sweep their 5×5×5 parameter grids; hardy runs on
/// compactly supported bumps.
SuiteResult run_suite(const std::string& id, const VerificationSpec& spec,
                      const GridPtr& grid, int count, std::uint64_t seed);

Json to_json(const SuiteResult& result);

}  // namespace hankelobs
