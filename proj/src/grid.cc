#include "hankelobs/grid.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

namespace hankelobs {
namespace {

constexpr int kCorrectedNodes = 6;

// c_j with Σ_j c_j (j−½)^q = e_q, q = 0..5. e_q is the midpoint-rule error
// at the left end for F(y) = y^q in units of h^{q+1}: −B_{2m}(½)/(2m)!·q!
// for odd q = 2m−1, zero for even q.
RealVector origin_corrections() {
  Eigen::Matrix<double, kCorrectedNodes, kCorrectedNodes> vandermonde;
  Eigen::Matrix<double, kCorrectedNodes, 1> rhs;
  for (int q = 0; q < kCorrectedNodes; ++q) {
    for (int j = 0; j < kCorrectedNodes; ++j) {
      vandermonde(q, j) = std::pow(j + 0.5, q);
    }
  }
  rhs << 0.0, -1.0 / 24.0, 0.0, 7.0 / 960.0, 0.0, -31.0 / 8064.0;
  return vandermonde.fullPivLu().solve(rhs);
}

}  // namespace

RadialGrid::RadialGrid(int n, double x_max, Quadrature rule)
    : n_(n), x_max_(x_max), rule_(rule) {
  const double h = x_max / n;
  nodes_ = (RealVector::LinSpaced(n, 0, n - 1).array() + 0.5) * h;
  weights_ = RealVector::Constant(n, h);
  if (rule == Quadrature::kOriginCorrected && n >= kCorrectedNodes) {
    static const RealVector c = origin_corrections();
    weights_.head(kCorrectedNodes).array() += h * c.array();
  }
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return n_ == other.n_ && x_max_ == other.x_max_ && rule_ == other.rule_;
}

GridPtr make_grid(int n, double x_max, Quadrature rule) {
  if (n < 16) {
    throw std::invalid_argument("make_grid: n must be >= 16, got " +
                                std::to_string(n));
  }
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw std::invalid_argument("make_grid: x_max must be positive and finite");
  }
  return std::make_shared<const RadialGrid>(n, x_max, rule);
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b) {
  if (!a.same_as(b)) {
    throw std::invalid_argument("grid mismatch");
  }
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const Interval& iv : intervals) {
    if (!(iv.a >= 0.0) || !(iv.a < iv.b)) {
      throw std::invalid_argument("invalid interval [" + std::to_string(iv.a) +
                                  ", " + std::to_string(iv.b) + "]");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& l, const Interval& r) { return l.a < r.a; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.a <= intervals_.back().b) {
      intervals_.back().b = std::max(intervals_.back().b, iv.b);
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalSet IntervalSet::from_endpoints(const std::vector<double>& endpoints) {
  if (endpoints.size() % 2 != 0) {
    throw std::invalid_argument("interval endpoints must come in pairs");
  }
  std::vector<Interval> intervals;
  for (size_t i = 0; i < endpoints.size(); i += 2) {
    intervals.push_back({endpoints[i], endpoints[i + 1]});
  }
  return IntervalSet(std::move(intervals));
}

bool IntervalSet::bounded() const {
  return intervals_.empty() || std::isfinite(intervals_.back().b);
}

bool IntervalSet::contains(double x) const {
  for (const Interval& iv : intervals_) {
    if (iv.a <= x && x < iv.b) return true;
  }
  return false;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const Interval& iv : intervals_) m += iv.b - iv.a;
  return m;
}

IntervalSet IntervalSet::complement() const {
  std::vector<Interval> out;
  double start = 0.0;
  for (const Interval& iv : intervals_) {
    if (iv.a > start) out.push_back({start, iv.a});
    start = iv.b;
  }
  if (std::isfinite(start)) {
    out.push_back({start, std::numeric_limits<double>::infinity()});
  }
  return IntervalSet(std::move(out));
}

RealVector IntervalSet::indicator(const RadialGrid& grid) const {
  RealVector mask(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    mask[i] = contains(grid.nodes()[i]) ? 1.0 : 0.0;
  }
  return mask;
}

std::string IntervalSet::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < intervals_.size(); ++i) {
    if (i) os << " U ";
    os << "[" << intervals_[i].a << "," << intervals_[i].b << "]";
  }
  return intervals_.empty() ? "{}" : os.str();
}

double mu_nu_measure(const IntervalSet& set, double nu) {
  if (!set.bounded()) {
    throw std::invalid_argument("mu_nu_measure: unbounded interval set");
  }
  const double p = 2.0 * nu + 2.0;
  double m = 0.0;
  for (const Interval& iv : set.intervals()) {
    m += (std::pow(iv.b, p) - std::pow(iv.a, p)) / p;
  }
  return m;
}

Weight Weight::exp_linear(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("weight needs lambda >= 0");
  return Weight(Kind::kExpLinear, lambda, 1.0, 0);
}

Weight Weight::exp_power(double lambda, double beta) {
  if (!(lambda >= 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("weight needs lambda >= 0, beta > 0");
  }
  return Weight(Kind::kExpPower, lambda, beta, 0);
}

Weight Weight::exp_decay(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("weight needs lambda >= 0");
  return Weight(Kind::kExpDecay, lambda, 1.0, 0);
}

Weight Weight::power(int k) {
  if (k < 0) throw std::invalid_argument("weight needs k >= 0");
  return Weight(Kind::kPower, 0.0, 1.0, k);
}

Weight Weight::inverse_power(int k) {
  if (k < 0) throw std::invalid_argument("weight needs k >= 0");
  return Weight(Kind::kInversePower, 0.0, 1.0, k);
}

double Weight::log_value(double x) const {
  switch (kind_) {
    case Kind::kExpLinear: return lambda_ * x;
    case Kind::kExpPower: return lambda_ * std::pow(x, beta_);
    case Kind::kExpDecay: return -lambda_ * x;
    case Kind::kPower: return 2.0 * k_ * std::log(x);
    case Kind::kInversePower: return -2.0 * k_ * std::log(x);
  }
  return 0.0;
}

double weighted_l2_norm_sq(const GridFunction& f, const Weight& weight) {
  const RadialGrid& grid = f.grid();
  const double log_limit = std::log(std::numeric_limits<double>::max());
  RealVector density(grid.n());
  for (int i = 0; i < grid.n(); ++i) {
    const double a = std::norm(f.values()[i]);
    if (a == 0.0) {
      density[i] = 0.0;
      continue;
    }
    const double log_term = weight.log_value(grid.nodes()[i]) + std::log(a);
    if (log_term > log_limit - 30.0) {
      throw std::range_error(
          "weighted_l2_norm_sq: weight times |f|^2 overflows at x = " +
          std::to_string(grid.nodes()[i]));
    }
    density[i] = std::exp(log_term);
  }
  return integrate(grid, density);
}

namespace {

double edge_fraction(const GridFunction& f, bool far_end) {
  const double total = l2_norm_sq(f);
  if (total == 0.0) return 0.0;
  const int n = f.size();
  const int m = std::max(1, static_cast<int>(std::ceil(0.05 * n)));
  const int start = far_end ? n - m : 0;
  const double part = f.grid().weights().segment(start, m).dot(
      f.values().segment(start, m).cwiseAbs2());
  return part / total;
}

}  // namespace

double boundary_mass_fraction(const GridFunction& f) {
  return edge_fraction(f, true);
}

double origin_mass_fraction(const GridFunction& f) {
  return edge_fraction(f, false);
}

bool band_limited(const GridFunction& f) {
  return boundary_mass_fraction(f) <= 1e-8 && origin_mass_fraction(f) <= 1e-8;
}

bool touches_boundary(const GridFunction& f, double tol) {
  const auto& v = f.values();
  const int n = f.size();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  const double edge = std::max({std::abs(v[0]), std::abs(v[1]),
                                std::abs(v[n - 2]), std::abs(v[n - 1])});
  return edge > tol * scale;
}

InequalityReport hardy_check(const GridFunction& u) {
  const RadialGrid& grid = u.grid();
  const RealVector inv_x2 = grid.nodes().array().square().inverse();
  const double lhs = 0.25 * integrate(grid, u.values().cwiseAbs2()
                                                .cwiseProduct(inv_x2));
  const double rhs = l2_norm_sq(derivative(u));
  InequalityReport r;
  r.name = "hardy";
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = 1.0;
  r.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
  r.passed = lhs <= rhs * (1.0 + 1e-6);
  r.estimate.form = "1/4 (sharp)";
  r.estimate.fitted_C = 1.0;
  r.estimate.samples = 1;
  r.estimate.max_ratio = r.ratio;
  r.grid_n = grid.n();
  r.grid_x_max = grid.x_max();
  if (touches_boundary(u)) r.add_flag("support_touches_boundary");
  return r;
}

void write_csv(std::ostream& out, const GridFunction& f) {
  const auto old_precision = out.precision(17);
  out << "x,re,im\n";
  for (int i = 0; i < f.size(); ++i) {
    out << f.grid().nodes()[i] << "," << f.values()[i].real() << ","
        << f.values()[i].imag() << "\n";
  }
  out.precision(old_precision);
}

GridFunction read_csv(std::istream& in, Quadrature rule) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,re,im", 0) != 0) {
    throw std::invalid_argument("grid CSV must start with header x,re,im");
  }
  std::vector<double> xs;
  std::vector<Complex> vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') ||
        !std::getline(row, c)) {
      throw std::invalid_argument("malformed grid CSV row: " + line);
    }
    xs.push_back(std::stod(a));
    vs.emplace_back(std::stod(b), std::stod(c));
  }
  if (xs.size() < 2) throw std::invalid_argument("grid CSV has too few rows");
  const int n = static_cast<int>(xs.size());
  const double h = 2.0 * xs[0];
  GridPtr grid = make_grid(n, h * n, rule);
  for (int i = 0; i < n; ++i) {
    if (std::abs(grid->nodes()[i] - xs[i]) > 1e-9 * grid->x_max()) {
      throw std::invalid_argument("grid CSV nodes are not midpoint nodes");
    }
  }
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v[i] = vs[i];
  return GridFunction(grid, std::move(v));
}

Json to_json(const GridFunction& f) {
  Json values = Json::array();
  for (int i = 0; i < f.size(); ++i) {
    values.push_back({f.values()[i].real(), f.values()[i].imag()});
  }
  return Json{{"n", f.grid().n()}, {"x_max", f.grid().x_max()},
              {"values", std::move(values)}};
}

GridFunction grid_function_from_json(const Json& j, Quadrature rule) {
  GridPtr grid = make_grid(j.at("n").get<int>(), j.at("x_max").get<double>(),
                           rule);
  const Json& values = j.at("values");
  if (static_cast<int>(values.size()) != grid->n()) {
    throw std::invalid_argument("grid JSON: values length does not match n");
  }
  ComplexVector v(grid->n());
  for (int i = 0; i < grid->n(); ++i) {
    v[i] = Complex(values[i].at(0).get<double>(), values[i].at(1).get<double>());
  }
  return GridFunction(grid, std::move(v));
}

void InequalityReport::add_flag(const std::string& flag) {
  if (std::find(flags.begin(), flags.end(), flag) == flags.end()) {
    flags.push_back(flag);
  }
}

Json to_json(const ConstantEstimate& e) {
  Json j{{"form", e.form}, {"fitted_C", e.fitted_C}};
  j["theta"] = e.theta ? Json(*e.theta) : Json(nullptr);
  j["samples"] = e.samples;
  j["max_ratio"] = e.max_ratio;
  return j;
}

Json to_json(const InequalityReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  Json j;
  j["name"] = r.name;
  j["nu"] = r.nu;
  j["params"] = std::move(params);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["constant"] = to_json(r.estimate);
  j["constant"]["effective"] = r.constant;
  j["ratio"] = r.ratio;
  j["passed"] = r.passed;
  j["seed"] = r.seed;
  j["grid"] = Json{{"n", r.grid_n}, {"x_max", r.grid_x_max}};
  j["flags"] = r.flags;
  return j;
}

}  // namespace hankelobs
