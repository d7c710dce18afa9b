#include "mnol/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mnol/errors.hpp"

namespace mnol {

bool GridFunction::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim) return false;
  return std::all_of(x.begin(), x.end(), [&](double v) { return v >= box_lo - tol && v <= box_hi + tol; });
}

double GridFunction::eval_clamped(double x) const { return (*this)(std::clamp(x, box_lo, box_hi)); }

double GridFunction::eval_periodic(double x) const {
  const double period = box_hi - box_lo;
  double r = std::fmod(x - box_lo, period);
  if (r < 0.0) r += period;
  return (*this)(box_lo + r);
}

GridFunction constant_function(double value, int dim, double lo, double hi) {
  GridFunction f;
  f.dim = dim;
  f.box_lo = lo;
  f.box_hi = hi;
  f.evaluator = [value](std::span<const double>) { return value; };
  f.lipschitz = 0.0;
  f.sup = std::abs(value);
  return f;
}

GridFunction make_function(std::function<double(double)> fn, double lo, double hi, double lipschitz, double sup) {
  GridFunction f;
  f.dim = 1;
  f.box_lo = lo;
  f.box_hi = hi;
  f.evaluator = [fn = std::move(fn)](std::span<const double> x) { return fn(x[0]); };
  f.lipschitz = lipschitz;
  f.sup = sup;
  return f;
}

AuditResult audit(const GridFunction& f, int points_per_axis) {
  if (points_per_axis <= 0) points_per_axis = f.dim <= 2 ? 1000 : 100;
  const auto n = static_cast<std::size_t>(points_per_axis);
  const double h = (f.box_hi - f.box_lo) / static_cast<double>(n - 1);
  auto coord = [&](std::size_t i) { return i + 1 == n ? f.box_hi : f.box_lo + static_cast<double>(i) * h; };

  std::size_t total = 1;
  for (int d = 0; d < f.dim; ++d) total *= n;
  std::vector<double> values(total);
  std::vector<double> point(static_cast<std::size_t>(f.dim));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int d = f.dim - 1; d >= 0; --d) {
      point[d] = coord(rem % n);
      rem /= n;
    }
    values[flat] = f(point);
  }

  AuditResult r;
  for (double v : values) r.max_abs = std::max(r.max_abs, std::abs(v));
  std::size_t stride = 1;
  for (int d = f.dim - 1; d >= 0; --d) {
    for (std::size_t flat = 0; flat < total; ++flat) {
      if ((flat / stride) % n + 1 == n) continue;
      const double gap = coord((flat / stride) % n + 1) - coord((flat / stride) % n);
      r.max_slope = std::max(r.max_slope, std::abs(values[flat + stride] - values[flat]) / gap);
    }
    stride *= n;
  }
  r.sup_ok = r.max_abs <= f.sup * (1.0 + 1e-12) + 1e-300;
  r.lipschitz_ok = r.max_slope <= f.lipschitz * (1.0 + 1e-9) + 1e-300;
  return r;
}

double FunctionSpaceSpec::sup_bound() const { return std::abs(offset) + sup_beta; }

void FunctionSpaceSpec::validate() const {
  if (dim <= 0) throw ConfigError("function space: dim must be positive");
  if (!(gamma > 0.0)) throw ConfigError("function space: gamma must be positive");
  if (!(sup_beta >= 0.0)) throw ConfigError("function space: sup_beta must be nonnegative");
  if (!(lipschitz >= 0.0)) throw ConfigError("function space: lipschitz must be nonnegative");
  if (kind != SamplerKind::kConstant && sup_beta > 0.0 && lipschitz == 0.0)
    throw ConfigError("function space: a nonconstant sampler needs a positive Lipschitz bound");
  if (kind != SamplerKind::kConstant && sup_beta == 0.0)
    throw ConfigError("function space: a nonconstant sampler needs a positive sup bound");
  if (kind != SamplerKind::kConstant && modes < 1) throw ConfigError("function space: modes must be >= 1");
  if (kind == SamplerKind::kPiecewiseLinear && dim != 1)
    throw ConfigError("function space: the piecewise_linear sampler is one-dimensional");
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kRandomFourier: return "random_fourier";
    case SamplerKind::kPiecewiseLinear: return "piecewise_linear";
    case SamplerKind::kConstant: return "constant";
  }
  return "?";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "random_fourier") return SamplerKind::kRandomFourier;
  if (name == "piecewise_linear") return SamplerKind::kPiecewiseLinear;
  if (name == "constant") return SamplerKind::kConstant;
  throw ConfigError("unknown sampler '" + name + "' (expected random_fourier, piecewise_linear or constant)");
}

}  // namespace mnol
