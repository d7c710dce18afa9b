#include "mnol/operator_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mnol/errors.hpp"

namespace mnol {

namespace {

constexpr double kDefaultFractionalRadius = 0.01;
constexpr double kGaussianSupport = 8.0;

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

/// Trapezoid nodes on consecutive pieces with the total budget split by
/// length, so kinks at piece boundaries are never straddled. Monte Carlo
/// ignores the pieces and samples the hull.
Nodes piecewise_nodes(const std::vector<std::pair<double, double>>& pieces, const QuadratureRule& rule) {
  Nodes out;
  double total = 0.0;
  for (auto [lo, hi] : pieces) total += hi - lo;
  if (!(total > 0.0)) return out;
  if (rule.kind == QuadKind::kMonteCarlo) {
    QuadNodes q = quad_nodes(pieces.front().first, pieces.back().second, rule);
    out.x = std::move(q.nodes);
    out.w = std::move(q.weights);
    return out;
  }
  for (auto [lo, hi] : pieces) {
    if (!(hi > lo)) continue;
    QuadratureRule sub = rule;
    sub.node_count =
        std::max(3, static_cast<int>(std::lround((rule.node_count - 1) * (hi - lo) / total)) + 1);
    QuadNodes q = quad_nodes(lo, hi, sub);
    out.x.insert(out.x.end(), q.nodes.begin(), q.nodes.end());
    out.w.insert(out.w.end(), q.weights.begin(), q.weights.end());
  }
  return out;
}

/// Pieces of [lo, hi] cut at the given interior points.
std::vector<std::pair<double, double>> cut(double lo, double hi, std::vector<double> points) {
  std::sort(points.begin(), points.end());
  std::vector<std::pair<double, double>> pieces;
  double left = lo;
  for (double p : points) {
    if (p > left && p < hi) {
      pieces.emplace_back(left, p);
      left = p;
    }
  }
  pieces.emplace_back(left, hi);
  return pieces;
}

double integrate(const Nodes& nodes, const auto& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.x.size(); ++i) sum += nodes.w[i] * f(nodes.x[i]);
  return sum;
}

double extend(const GridFunction& u, double y, Extension ext) {
  return ext == Extension::kPeriodic ? u.eval_periodic(y) : u.eval_clamped(y);
}

void check_time(double nu, double t) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("viscosity nu must be positive, got " + std::to_string(nu));
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time t must be positive, got " + std::to_string(t));
}

void require_1d(const GridFunction& f, const char* what) {
  if (f.dim != 1) throw ShapeError(std::string(what) + " must be one-dimensional");
}

/// Whole-line window around x, cut at the box edges of u when clamping.
Nodes window_nodes(double nu, double t, const GridFunction& u, double x, const QuadratureRule& rule, Extension ext) {
  const double w = rule.truncation_radius.value_or(default_window(nu, t));
  // Nodes are placed at x -/+ d for d on [0, w], so odd moments about x cancel exactly.
  std::vector<double> kinks;
  if (ext == Extension::kClamp)
    for (double k : {u.box_lo, u.box_hi}) kinks.push_back(std::abs(k - x));
  QuadratureRule half = rule;
  half.node_count = std::max(2, (rule.node_count + 1) / 2);
  const Nodes d = piecewise_nodes(cut(0.0, w, kinks), half);
  Nodes out;
  const std::size_t n = d.x.size();
  for (std::size_t i = n; i-- > 0;) {
    out.x.push_back(x - d.x[i]);
    out.w.push_back(d.w[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.x.push_back(x + d.x[i]);
    out.w.push_back(d.w[i]);
  }
  return out;
}

double midpoint_value(const GridFunction& alpha) {
  std::vector<double> mid(static_cast<std::size_t>(alpha.dim), 0.5 * (alpha.box_lo + alpha.box_hi));
  return alpha(mid);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kHomogeneousKernel: return "homogeneous_kernel";
    case FamilyKind::kFractionalKernel: return "fractional_kernel";
    case FamilyKind::kGreenDirichlet: return "green_dirichlet";
    case FamilyKind::kHeatSemigroup: return "heat_semigroup";
    case FamilyKind::kBurgersColeHopf: return "burgers_cole_hopf";
  }
  return "?";
}

FamilyKind parse_family_kind(const std::string& name) {
  for (auto k : {FamilyKind::kHomogeneousKernel, FamilyKind::kFractionalKernel, FamilyKind::kGreenDirichlet,
                 FamilyKind::kHeatSemigroup, FamilyKind::kBurgersColeHopf})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown operator family '" + name + "'");
}

std::string to_string(RadialProfile profile) {
  switch (profile) {
    case RadialProfile::kIndicator: return "indicator";
    case RadialProfile::kHat: return "hat";
    case RadialProfile::kGaussian: return "gaussian";
  }
  return "?";
}

RadialProfile parse_radial_profile(const std::string& name) {
  for (auto p : {RadialProfile::kIndicator, RadialProfile::kHat, RadialProfile::kGaussian})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown radial profile '" + name + "'");
}

std::string to_string(Extension ext) { return ext == Extension::kClamp ? "clamp" : "periodic"; }

Extension parse_extension(const std::string& name) {
  if (name == "clamp") return Extension::kClamp;
  if (name == "periodic") return Extension::kPeriodic;
  throw ConfigError("unknown extension '" + name + "' (expected clamp or periodic)");
}

double radial_profile(RadialProfile profile, double r) {
  switch (profile) {
    case RadialProfile::kIndicator: return r <= 1.0 + 1e-12 ? 0.5 : 0.0;
    case RadialProfile::kHat: return std::max(0.0, 1.0 - r);
    case RadialProfile::kGaussian:
      return r <= kGaussianSupport ? std::exp(-0.5 * r * r) / std::sqrt(2.0 * std::numbers::pi) : 0.0;
  }
  return 0.0;
}

namespace {

void check_green(double a, double x, double y) {
  if (!(a > 0.0)) throw DomainError("Green kernel: a must be positive, got " + std::to_string(a));
  const double tol = 1e-12 * a;
  if (x < -tol || x > a + tol || y < -tol || y > a + tol)
    throw DomainError("Green kernel: arguments must lie in [0, a]");
}

}  // namespace

double green_kernel(double a, double x, double y) {
  check_green(a, x, y);
  return x <= y ? x * (a - y) / a : y * (a - x) / a;
}

double green_kernel_relu_form(double a, double x, double y) {
  check_green(a, x, y);
  const auto relu = [](double v) { return v > 0.0 ? v : 0.0; };
  return (x + y) / 2.0 - (relu(x - y) + relu(y - x)) / 2.0 - x * y / a;
}

double green_apply(double a, const GridFunction& u, double x, const QuadratureRule& rule) {
  check_green(a, x, 0.0);
  require_1d(u, "u");
  if (u.box_lo > 0.0 || u.box_hi < a) throw DomainError("Green operator: u must be defined on [0, a]");
  const Nodes nodes = piecewise_nodes(cut(0.0, a, {x}), rule);
  return integrate(nodes, [&](double y) { return green_kernel(a, std::clamp(x, 0.0, a), y) * u(y); });
}

double kernel_apply(const OperatorFamily& family, const GridFunction& alpha, const GridFunction& u,
                    std::span<const double> x, const QuadratureRule& rule) {
  require_1d(u, "u");
  if (x.size() != 1) throw ShapeError("kernel operator: evaluation point must be one-dimensional");
  const double xv = x[0];
  const double a = alpha(x);
  if (!(a > 0.0)) throw DomainError("kernel operator: alpha(x) must be positive, got " + std::to_string(a));

  if (family.kind == FamilyKind::kHomogeneousKernel) {
    const double reach = (family.profile == RadialProfile::kGaussian ? kGaussianSupport : 1.0) * a;
    const double lo = std::max(u.box_lo, xv - reach);
    const double hi = std::min(u.box_hi, xv + reach);
    if (!(hi > lo)) return 0.0;
    const Nodes nodes = piecewise_nodes(cut(lo, hi, {xv}), rule);
    return integrate(nodes, [&](double y) { return radial_profile(family.profile, std::abs(xv - y) / a) / a * u(y); });
  }
  if (family.kind == FamilyKind::kFractionalKernel) {
    if (!(a < 1.0)) throw DomainError("fractional kernel: alpha(x) must lie in (0, 1), got " + std::to_string(a));
    const double r = rule.truncation_radius.value_or(kDefaultFractionalRadius);
    std::vector<std::pair<double, double>> pieces;
    if (xv - r > u.box_lo) pieces.emplace_back(u.box_lo, xv - r);
    if (xv + r < u.box_hi) pieces.emplace_back(xv + r, u.box_hi);
    if (pieces.empty()) return 0.0;
    const Nodes nodes = piecewise_nodes(pieces, rule);
    const double expo = 1.0 + 2.0 * a;
    return integrate(nodes, [&](double y) {
      const double dist = std::abs(xv - y);
      if (dist < r * (1.0 - 1e-12)) return 0.0;
      return family.fractional_c * std::pow(std::max(dist, r), -expo) * u(y);
    });
  }
  throw ConfigError("kernel_apply needs a kernel family, got " + to_string(family.kind));
}

double heat_kernel(double nu, double t, double z) {
  return std::exp(-z * z / (4.0 * nu * t)) / std::sqrt(4.0 * std::numbers::pi * nu * t);
}

double default_window(double nu, double t) { return 8.0 * std::sqrt(2.0 * nu * t); }

double heat_apply(double nu, double t, const GridFunction& u, double x, const QuadratureRule& rule, Extension ext) {
  check_time(nu, t);
  require_1d(u, "u");
  const Nodes nodes = window_nodes(nu, t, u, x, rule, ext);
  return integrate(nodes, [&](double y) { return heat_kernel(nu, t, x - y) * extend(u, y, ext); });
}

double burgers_cole_hopf(double nu, double t, const GridFunction& u, double x, const QuadratureRule& rule,
                         Extension ext) {
  check_time(nu, t);
  require_1d(u, "u");
  const Nodes nodes = window_nodes(nu, t, u, x, rule, ext);
  const std::size_t n = nodes.x.size();

  // Antiderivative of u up to a constant; constants cancel in the ratio.
  std::vector<double> log_terms(n);
  double phi = 0.0;
  double prev = extend(u, nodes.x[0], ext);
  for (std::size_t i = 0; i < n; ++i) {
    const double cur = extend(u, nodes.x[i], ext);
    if (i > 0) phi += 0.5 * (prev + cur) * (nodes.x[i] - nodes.x[i - 1]);
    prev = cur;
    const double z = x - nodes.x[i];
    log_terms[i] = -z * z / (4.0 * nu * t) - phi / (2.0 * nu);
  }
  const double shift = *std::max_element(log_terms.begin(), log_terms.end());

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = nodes.w[i] * std::exp(log_terms[i] - shift);
    num += (x - nodes.x[i]) * e;
    den += e;
  }
  if (!(den > 1e-300) || !std::isfinite(num))
    throw NumericalError("Cole-Hopf denominator underflow at x=" + std::to_string(x) +
                         "; use a larger nu or a smaller t");
  return num / (t * den);
}

namespace {

double fd_dt_limit(double nu, double dx, double u_max) {
  double limit = dx * dx / (2.0 * nu);
  if (u_max > 0.0) limit = std::min(limit, dx / u_max);
  return limit / 2.0;
}

std::vector<double> fd_initial(const GridFunction& u, int grid_n, double& dx) {
  if (grid_n < 3) throw ConfigError("finite-difference grid needs at least 3 points");
  dx = (u.box_hi - u.box_lo) / grid_n;
  std::vector<double> z(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) z[i] = u(u.box_lo + i * dx);
  return z;
}

double max_abs(const std::vector<double>& z) {
  double m = 0.0;
  for (double v : z) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

int fd_min_steps(double nu, double t, const GridFunction& u, int grid_n) {
  check_time(nu, t);
  require_1d(u, "u");
  double dx = 0.0;
  const auto z = fd_initial(u, grid_n, dx);
  return static_cast<int>(std::ceil(t / fd_dt_limit(nu, dx, max_abs(z)) * (1.0 + 1e-12)));
}

GridFunction burgers_fd_reference(double nu, double t, const GridFunction& u, int grid_n, int steps) {
  check_time(nu, t);
  require_1d(u, "u");
  if (steps < 1) throw ConfigError("finite-difference solver needs at least one step");
  double dx = 0.0;
  std::vector<double> z = fd_initial(u, grid_n, dx);
  const double dt = t / steps;
  const double limit = fd_dt_limit(nu, dx, max_abs(z));
  if (dt > limit)
    throw ConfigError("finite-difference step dt=" + std::to_string(dt) + " exceeds the stability limit " +
                      std::to_string(limit) + "; need at least " + std::to_string(fd_min_steps(nu, t, u, grid_n)) +
                      " steps");

  const auto n = static_cast<std::size_t>(grid_n);
  std::vector<double> next(n);
  const double adv = dt / (4.0 * dx);
  const double diff = nu * dt / (dx * dx);
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double zl = z[(i + n - 1) % n];
      const double zr = z[(i + 1) % n];
      next[i] = z[i] - adv * (zr * zr - zl * zl) + diff * (zr - 2.0 * z[i] + zl);
    }
    z.swap(next);
  }
  if (!std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); }))
    throw NumericalError("finite-difference Burgers solution became non-finite");

  GridFunction out;
  out.dim = 1;
  out.box_lo = u.box_lo;
  out.box_hi = u.box_hi;
  out.sup = max_abs(z);
  for (std::size_t i = 0; i < n; ++i) out.lipschitz = std::max(out.lipschitz, std::abs(z[(i + 1) % n] - z[i]) / dx);
  out.evaluator = [z = std::move(z), lo = u.box_lo, dx, n](std::span<const double> x) {
    const double s = (x[0] - lo) / dx;
    const double fl = std::floor(s);
    const double frac = s - fl;
    const auto i = static_cast<std::size_t>(((static_cast<long long>(fl) % static_cast<long long>(n)) +
                                             static_cast<long long>(n)) %
                                            static_cast<long long>(n));
    return (1.0 - frac) * z[i] + frac * z[(i + 1) % n];
  };
  return out;
}

double family_eval(const OperatorFamily& family, const GridFunction& alpha, const GridFunction& u,
                   std::span<const double> x, const QuadratureRule& rule) {
  switch (family.kind) {
    case FamilyKind::kHomogeneousKernel:
    case FamilyKind::kFractionalKernel: return kernel_apply(family, alpha, u, x, rule);
    case FamilyKind::kGreenDirichlet: {
      if (x.size() != 1) throw ShapeError("Green operator: evaluation point must be one-dimensional");
      const double a = midpoint_value(alpha);
      if (x[0] < 0.0) throw DomainError("Green operator: x must be nonnegative");
      if (x[0] > a) return 0.0;  // zero continuation past the right boundary
      return green_apply(a, u, x[0], rule);
    }
    case FamilyKind::kHeatSemigroup:
    case FamilyKind::kBurgersColeHopf: {
      if (x.size() != 1) throw ShapeError("evaluation point must be one-dimensional");
      const double nu = midpoint_value(alpha);
      return family.kind == FamilyKind::kHeatSemigroup ? heat_apply(nu, family.t, u, x[0], rule, family.extension)
                                                       : burgers_cole_hopf(nu, family.t, u, x[0], rule, family.extension);
    }
  }
  throw ConfigError("unknown operator family");
}

void validate_family_specs(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec,
                           const FunctionSpaceSpec& u_spec) {
  alpha_spec.validate();
  u_spec.validate();
  const std::string name = to_string(family.kind);
  if (u_spec.dim != 1 || alpha_spec.dim != 1) throw ConfigError(name + ": only one-dimensional spaces are supported");
  if (!(alpha_spec.value_lo() > 0.0)) throw ConfigError(name + ": alpha values must be strictly positive");
  switch (family.kind) {
    case FamilyKind::kGreenDirichlet:
      if (alpha_spec.kind != SamplerKind::kConstant) throw ConfigError(name + ": alpha must use the constant sampler");
      if (alpha_spec.value_hi() > u_spec.gamma)
        throw ConfigError(name + ": the largest a must not exceed the u box half-width");
      break;
    case FamilyKind::kHeatSemigroup:
    case FamilyKind::kBurgersColeHopf:
      if (alpha_spec.kind != SamplerKind::kConstant) throw ConfigError(name + ": alpha must use the constant sampler");
      if (!(family.t > 0.0)) throw ConfigError(name + ": t must be positive");
      break;
    case FamilyKind::kFractionalKernel:
      if (!(alpha_spec.value_hi() < 1.0)) throw ConfigError(name + ": alpha values must lie in (0, 1)");
      if (!(family.fractional_c > 0.0)) throw ConfigError(name + ": normalization c must be positive");
      [[fallthrough]];
    case FamilyKind::kHomogeneousKernel:
      if (alpha_spec.gamma < u_spec.gamma) throw ConfigError(name + ": alpha must be defined on the whole u box");
      break;
  }
}

std::pair<double, double> output_domain(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec,
                                        const FunctionSpaceSpec& u_spec) {
  if (family.kind == FamilyKind::kGreenDirichlet) return {0.0, alpha_spec.value_hi()};
  return {-u_spec.gamma, u_spec.gamma};
}

int output_dim(const OperatorFamily&, const FunctionSpaceSpec& u_spec) { return u_spec.dim; }

double output_bound(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec, const FunctionSpaceSpec& u_spec,
                    const QuadratureRule& rule) {
  const double beta_u = u_spec.sup_bound();
  switch (family.kind) {
    case FamilyKind::kGreenDirichlet: {
      const double a = alpha_spec.value_hi();
      return beta_u * a * a / 8.0;
    }
    case FamilyKind::kHeatSemigroup:
    case FamilyKind::kBurgersColeHopf:
    case FamilyKind::kHomogeneousKernel: return beta_u;
    case FamilyKind::kFractionalKernel: {
      const double r = rule.truncation_radius.value_or(kDefaultFractionalRadius);
      const double a_lo = alpha_spec.value_lo();
      const double a_hi = alpha_spec.value_hi();
      // ∫_{|z| ≥ r} |z|^{-1-2α} dz = r^{-2α}/α, maximized over the α range.
      return family.fractional_c * beta_u * std::max(std::pow(r, -2.0 * a_hi), std::pow(r, -2.0 * a_lo)) / a_lo;
    }
  }
  return beta_u;
}

}  // namespace mnol
