#include "hankelobs/hankel.h"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "hankelobs/specfun.h"

namespace hankelobs {

std::shared_ptr<const HankelOperator> HankelOperator::build(double nu,
                                                            GridPtr grid) {
  if (!(nu >= 0.0)) throw std::domain_error("Hankel order must be >= 0");
  const int n = grid->n();
  if (n > 16384) {
    throw std::length_error("HankelOperator: n > 16384 exceeds memory guard");
  }
  const RealVector& x = grid->nodes();
  // x_i x_j is symmetric, so J is evaluated once per unordered pair.
  RealMatrix kernel(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const double s = x[i] * x[j];
      kernel(i, j) = std::sqrt(s) * bessel_j(nu, s);
    }
  }
  kernel.triangularView<Eigen::StrictlyUpper>() = kernel.transpose();
  kernel = kernel * grid->weights().asDiagonal();
  return std::shared_ptr<const HankelOperator>(
      new HankelOperator(nu, std::move(grid), std::move(kernel)));
}

ComplexMatrix HankelOperator::apply_columns(
    const Eigen::Ref<const ComplexMatrix>& v) const {
  if (v.rows() != kernel_.cols()) {
    throw std::invalid_argument("HankelOperator::apply: size mismatch");
  }
  const Eigen::Index m = v.cols();
  RealMatrix parts(v.rows(), 2 * m);
  parts.leftCols(m) = v.real();
  parts.rightCols(m) = v.imag();
  const RealMatrix out = kernel_ * parts;
  ComplexMatrix result(v.rows(), m);
  result.real() = out.leftCols(m);
  result.imag() = out.rightCols(m);
  return result;
}

ComplexVector HankelOperator::apply(
    const Eigen::Ref<const ComplexVector>& v) const {
  if (v.size() != kernel_.cols()) {
    throw std::invalid_argument("HankelOperator::apply: size mismatch");
  }
  RealMatrix parts(v.size(), 2);
  parts.col(0) = v.real();
  parts.col(1) = v.imag();
  const RealMatrix out = kernel_ * parts;
  ComplexVector result(v.size());
  result.real() = out.col(0);
  result.imag() = out.col(1);
  return result;
}

HankelPtr hankel_operator(double nu, const GridPtr& grid) {
  using Key = std::tuple<double, int, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::weak_ptr<const HankelOperator>> cache;
  const Key key{nu, grid->n(), grid->x_max(), static_cast<int>(grid->rule())};
  std::lock_guard<std::mutex> lock(mutex);
  if (auto hit = cache[key].lock()) return hit;
  HankelPtr op = HankelOperator::build(nu, grid);
  cache[key] = op;
  return op;
}

GridFunction forward(const HankelOperator& op, const GridFunction& f) {
  require_same_grid(op.grid(), f.grid());
  return GridFunction(op.grid_ptr(), op.apply(f.values()));
}

double involution_defect(const HankelOperator& op, const GridFunction& f) {
  require_same_grid(op.grid(), f.grid());
  const double norm = std::sqrt(l2_norm_sq(f));
  if (norm == 0.0) return 0.0;
  const ComplexVector back = op.apply(op.apply(f.values()));
  return std::sqrt(integrate(op.grid(), (back - f.values()).cwiseAbs2())) /
         norm;
}

GridFunction modified_forward(const HankelOperator& op, const GridFunction& g) {
  require_same_grid(op.grid(), g.grid());
  const RealVector power =
      op.grid().nodes().array().pow(op.nu() + 0.5).matrix();
  const ComplexVector f = g.values().cwiseProduct(power.cast<Complex>());
  ComplexVector out = op.apply(f);
  out.array() /= power.array().cast<Complex>();
  return GridFunction(op.grid_ptr(), std::move(out));
}

ComplexVector hankel_at(double nu, const RealVector& nodes,
                        const RealVector& weights, const ComplexVector& values,
                        const RealVector& targets) {
  if (nodes.size() != weights.size() || nodes.size() != values.size()) {
    throw std::invalid_argument("hankel_at: node/weight/value size mismatch");
  }
  const ComplexVector wf = weights.cast<Complex>().cwiseProduct(values);
  ComplexVector out(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < nodes.size(); ++j) {
      const double s = targets[i] * nodes[j];
      acc += std::sqrt(s) * bessel_j(nu, s) * wf[j];
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace hankelobs
