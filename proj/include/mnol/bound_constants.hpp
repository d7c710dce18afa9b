#pragma once

namespace mnol {

/// Scalars entering the architecture prescriptions and the entropy and
/// generalization formulas. The named constants and every hidden O(1) factor
/// default to 1.
struct BoundConstants {
  double C = 1.0;
  double C_prime = 1.0;
  double C_dprime = 1.0;
  double C_delta = 1.0;
  double C_zeta = 1.0;
  /// Multiplier applied to every O(.) depth/sparsity/magnitude bullet.
  double big_o = 1.0;
  /// Width assigned to every prescribed subnetwork class (p_i = O(1)).
  int width = 1;

  double sigma = 0.0;
  double beta_V = 1.0;
  double beta_U = 1.0;
  double beta_W = 1.0;
  double gamma_V = 1.0;
  double I = 1.0;

  int d_W = 1;
  int d_U = 1;
  int d_V = 1;
  int n_cW = 1;
  int n_cU = 1;
};

}  // namespace mnol
