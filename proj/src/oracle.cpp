#include "mnol/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mnol/errors.hpp"
#include "mnol/operator_zoo.hpp"

namespace mnol {

namespace {

std::vector<OracleCheck> green_checks() {
  QuadratureRule rule;
  rule.node_count = 1001;
  const GridFunction one = constant_function(1.0, 1, 0.0, 1.0);
  const GridFunction sine =
      make_function([](double y) { return std::sin(std::numbers::pi * y); }, 0.0, 1.0, std::numbers::pi, 1.0);
  double err_one = 0.0;
  double err_sin = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double x = k / 10.0;
    err_one = std::max(err_one, std::abs(green_apply(1.0, one, x, rule) - x * (1.0 - x) / 2.0));
    const double exact = std::sin(std::numbers::pi * x) / (std::numbers::pi * std::numbers::pi);
    err_sin = std::max(err_sin, std::abs(green_apply(1.0, sine, x, rule) - exact));
  }
  return {{"green_constant_source", err_one, 1e-6}, {"green_sine_source", err_sin, 1e-5}};
}

std::vector<OracleCheck> heat_checks() {
  QuadratureRule rule;
  rule.node_count = 1001;
  const double nu = 0.5;
  const double t = 1.0;
  const GridFunction one = constant_function(1.0, 1, -1.0, 1.0);
  const GridFunction bump = make_function([](double y) { return std::exp(-y * y / 2.0); }, -40.0, 40.0, 1.0, 1.0);
  return {{"heat_mass", std::abs(heat_apply(nu, t, one, 0.3, rule) - 1.0), 1e-6},
          {"heat_gaussian", std::abs(heat_apply(nu, t, bump, 0.0, rule) - 1.0 / std::sqrt(2.0)), 1e-5}};
}

std::vector<OracleCheck> burgers_checks(int grid_n) {
  const double nu = 0.1;
  const double t = 0.5;
  const GridFunction sine =
      make_function([](double y) { return std::sin(std::numbers::pi * y); }, -1.0, 1.0, std::numbers::pi, 1.0);
  QuadratureRule rule;
  rule.node_count = 2001;

  const GridFunction fd = burgers_fd_reference(nu, t, sine, grid_n, fd_min_steps(nu, t, sine, grid_n));
  double diff = 0.0;
  double scale = 0.0;
  for (double x : {-0.5, 0.0, 0.5}) {
    const double ch = burgers_cole_hopf(nu, t, sine, x, rule, Extension::kPeriodic);
    diff = std::max(diff, std::abs(ch - fd(x)));
    scale = std::max(scale, std::abs(fd(x)));
  }

  const int fine_n = 2 * grid_n;
  const GridFunction fine = burgers_fd_reference(nu, t, sine, fine_n, fd_min_steps(nu, t, sine, fine_n));
  double refine = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double x = -1.0 + 2.0 * i / grid_n;
    refine = std::max(refine, std::abs(fd(x) - fine(x)));
  }
  return {{"burgers_cole_hopf_vs_fd", diff / scale, 1e-2}, {"burgers_fd_self_convergence", refine, 1e-3}};
}

}  // namespace

std::vector<OracleCheck> run_oracles(const std::string& which, int fd_grid_n) {
  if (which != "all" && which != "green" && which != "heat" && which != "burgers")
    throw ConfigError("unknown oracle check '" + which + "' (expected all, green, heat or burgers)");
  std::vector<OracleCheck> out;
  auto take = [&](std::vector<OracleCheck> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (which == "all" || which == "green") take(green_checks());
  if (which == "all" || which == "heat") take(heat_checks());
  if (which == "all" || which == "burgers") take(burgers_checks(fd_grid_n));
  return out;
}

}  // namespace mnol
