#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mnol {

enum class QuadKind { kTrapezoid, kMonteCarlo };

struct QuadratureRule {
  QuadKind kind = QuadKind::kTrapezoid;
  int node_count = 1001;
  std::uint64_t seed = 0;  ///< Monte Carlo only
  /// Window half-width for unbounded-domain integrals, or the excluded ball
  /// radius for singular kernels. Unset selects the family default.
  std::optional<double> truncation_radius;

  void validate() const;
};

/// Nodes in increasing order with matching weights on [lo, hi].
struct QuadNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadNodes quad_nodes(double lo, double hi, const QuadratureRule& rule);

/// Composite trapezoid on node_count equispaced nodes, or the mean of f at
/// seeded uniform nodes times the interval length.
double quad_integrate(const std::function<double(double)>& f, double lo, double hi, const QuadratureRule& rule);

/// Tensor-product trapezoid (node_count per axis) or Monte Carlo over [lo, hi]^dim.
double quad_integrate_box(const std::function<double(std::span<const double>)>& f, double lo, double hi, int dim,
                          const QuadratureRule& rule);

std::string to_string(QuadKind kind);
QuadKind parse_quad_kind(const std::string& name);

}  // namespace mnol
