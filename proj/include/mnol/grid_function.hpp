#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>

namespace mnol {

/// A real function on the box [lo, hi]^dim with declared Lipschitz and sup
/// bounds. Sampled functions are certified against those bounds by audit().
struct GridFunction {
  int dim = 1;
  double box_lo = -1.0;
  double box_hi = 1.0;
  std::function<double(std::span<const double>)> evaluator;
  double lipschitz = 0.0;
  double sup = 0.0;

  double operator()(std::span<const double> x) const { return evaluator(x); }
  double operator()(const Eigen::VectorXd& x) const { return evaluator({x.data(), static_cast<std::size_t>(x.size())}); }
  double operator()(double x) const { return evaluator({&x, 1}); }

  bool contains(std::span<const double> x, double tol = 1e-12) const;

  /// Value at x (dim 1) with x clamped into the box, i.e. the function
  /// continued by its boundary values.
  double eval_clamped(double x) const;
  /// Value at x (dim 1) with x wrapped into [lo, hi), i.e. the periodic
  /// continuation with period hi - lo.
  double eval_periodic(double x) const;
};

GridFunction constant_function(double value, int dim = 1, double lo = -1.0, double hi = 1.0);

/// One-dimensional function on [lo, hi] from a plain callable.
GridFunction make_function(std::function<double(double)> f, double lo, double hi, double lipschitz, double sup);

struct AuditResult {
  double max_abs = 0.0;
  double max_slope = 0.0;  ///< largest |f(a) - f(b)| / |a - b| over axis-adjacent points
  bool sup_ok = false;
  bool lipschitz_ok = false;
  bool ok() const { return sup_ok && lipschitz_ok; }
};

/// Evaluates f on a tensor grid (1000 points per axis for dim <= 2, 100 for
/// higher dimensions) and checks |f| <= sup and the adjacent-point slope
/// against lipschitz (1 + 1e-9).
AuditResult audit(const GridFunction& f, int points_per_axis = 0);

enum class SamplerKind { kRandomFourier, kPiecewiseLinear, kConstant };

/// Function-space description: f(x) = offset + g(x) with |g| <= sup_beta and
/// Lip(g) <= lipschitz on [-gamma, gamma]^dim. The constant sampler draws
/// offset + sup_beta U(-1, 1).
struct FunctionSpaceSpec {
  int dim = 1;
  double gamma = 1.0;
  double lipschitz = 1.0;
  double sup_beta = 1.0;
  SamplerKind kind = SamplerKind::kRandomFourier;
  int modes = 8;
  double decay = 2.0;
  double offset = 0.0;

  double value_lo() const { return offset - sup_beta; }
  double value_hi() const { return offset + sup_beta; }
  double sup_bound() const;
  void validate() const;
};

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& name);

}  // namespace mnol
