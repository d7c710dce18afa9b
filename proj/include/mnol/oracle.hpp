#pragma once

#include <string>
#include <vector>

namespace mnol {

/// One comparison between a library evaluator and an independent reference.
struct OracleCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return error < tolerance; }
};

/// Reference comparisons: Green operator against closed-form solutions, heat
/// semigroup mass and Gaussian convolution, Cole-Hopf against the
/// finite-difference Burgers solver, and that solver's self-convergence.
/// `which` is "all", "green", "heat" or "burgers".
std::vector<OracleCheck> run_oracles(const std::string& which = "all", int fd_grid_n = 400);

}  // namespace mnol
