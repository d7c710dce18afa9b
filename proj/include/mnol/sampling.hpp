#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mnol/grid_function.hpp"
#include "mnol/mno.hpp"
#include "mnol/operator_zoo.hpp"
#include "mnol/rng.hpp"
#include "mnol/quadrature.hpp"

namespace mnol {

using PointList = std::vector<Eigen::VectorXd>;

/// Draws one function from the space described by `spec`. Random Fourier
/// samples are offset + β·clip₁(Σ c_m cos(π k_m·x/γ + φ_m)/Z) with |c_m| ≤ m^(−decay)
/// and Z large enough that the Lipschitz bound holds by construction. When
/// `certify` is set the sample is audited and a failed audit throws.
GridFunction sample_function(const FunctionSpaceSpec& spec, std::uint64_t seed, bool certify = true);

/// Tensor grid over [−γ, γ]^dim including endpoints, last axis fastest.
/// A single point per axis yields the box center.
PointList uniform_grid(int dim, double gamma, int count_per_axis);
double covering_radius(int dim, double gamma, int count_per_axis);

Eigen::VectorXd discretize(const GridFunction& f, const PointList& points);

/// Everything needed to draw a hierarchical dataset apart from its sizes.
struct DataSpec {
  OperatorFamily family;
  FunctionSpaceSpec alpha_spec;
  FunctionSpaceSpec u_spec;
  int alpha_grid_count = 1;  ///< points per axis of the α discretization grid {y_s}
  int u_grid_count = 8;      ///< points per axis of the u discretization grid {c_s}
  QuadratureRule rule;
  double sigma = 0.0;

  PointList alpha_grid() const { return uniform_grid(alpha_spec.dim, alpha_spec.gamma, alpha_grid_count); }
  PointList u_grid() const { return uniform_grid(u_spec.dim, u_spec.gamma, u_grid_count); }
  int n_cW() const;
  int n_cU() const;
  int d_V() const { return output_dim(family, u_spec); }
  void validate() const;
};

/// Seeded draws shared by dataset generation and evaluation. `stream`
/// separates training draws from fresh test draws.
GridFunction draw_alpha(const DataSpec& spec, std::uint64_t master, std::uint64_t l, Stream stream = Stream::kAlpha);
GridFunction draw_input(const DataSpec& spec, std::uint64_t master, std::uint64_t l, std::uint64_t i,
                        Stream stream = Stream::kInput);
Eigen::VectorXd draw_point(const DataSpec& spec, std::uint64_t master, std::uint64_t l, std::uint64_t i,
                           std::uint64_t j, Stream stream = Stream::kPoint);

struct HierarchicalDataset {
  DataSpec spec;
  int n_alpha = 0;
  int n_u = 0;
  int n_x = 0;
  std::uint64_t master_seed = 0;
  std::vector<Eigen::VectorXd> alpha_disc;                    // [ℓ]
  std::vector<std::vector<Eigen::VectorXd>> u_disc;            // [ℓ][i]
  std::vector<std::vector<std::vector<Eigen::VectorXd>>> x_pts;  // [ℓ][i][j]
  std::vector<std::vector<std::vector<double>>> w_vals;        // [ℓ][i][j]

  std::size_t size() const { return static_cast<std::size_t>(n_alpha) * n_u * n_x; }
  /// Flattened observations in (ℓ, i, j) order.
  std::vector<MnoSample> samples() const;
  /// Throws ShapeError unless all four arrays are congruent with the sizes.
  void check_shapes() const;
};

/// Draws α_ℓ, u_ℓi and x_ℓij from independent indexed streams, evaluates the
/// family and adds N(0, σ²) noise. Work is split over ℓ on `threads` workers.
HierarchicalDataset generate_dataset(const DataSpec& spec, int n_alpha, int n_u, int n_x, std::uint64_t master_seed,
                                     unsigned threads = 1);

}  // namespace mnol
