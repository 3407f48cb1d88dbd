#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace hankelobs {

using Json = nlohmann::ordered_json;

/// Witness for an inequality whose constant is only asserted to exist.
struct ConstantEstimate {
  std::string form;
  double fitted_C = 0.0;
  std::optional<double> theta;
  int samples = 0;
  // max over the family of lhs/rhs at the fitted constant; <= 1 when certified.
  double max_ratio = 0.0;
};

struct InequalityReport {
  std::string name;
  double nu = 0.0;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  // Effective multiplicative constant: rhs / (rhs without constant).
  double constant = 0.0;
  // lhs / (rhs without constant).
  double ratio = 0.0;
  bool passed = false;
  ConstantEstimate estimate;
  std::uint64_t seed = 0;
  int grid_n = 0;
  double grid_x_max = 0.0;
  std::vector<std::string> flags;

  void add_flag(const std::string& flag);
};

Json to_json(const ConstantEstimate& estimate);
Json to_json(const InequalityReport& report);

}  // namespace hankelobs
