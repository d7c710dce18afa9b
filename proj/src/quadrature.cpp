#include "mnol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mnol/errors.hpp"

namespace mnol {

namespace {

void check_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw DomainError("quadrature: degenerate interval [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

void QuadratureRule::validate() const {
  if (node_count < 2) throw ConfigError("quadrature: node_count must be >= 2");
  if (truncation_radius && !(*truncation_radius > 0.0))
    throw ConfigError("quadrature: truncation_radius must be positive");
}

QuadNodes quad_nodes(double lo, double hi, const QuadratureRule& rule) {
  rule.validate();
  check_interval(lo, hi);
  const auto n = static_cast<std::size_t>(rule.node_count);
  QuadNodes q;
  q.nodes.resize(n);
  q.weights.resize(n);
  if (rule.kind == QuadKind::kTrapezoid) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      q.nodes[i] = i + 1 == n ? hi : lo + static_cast<double>(i) * h;
      q.weights[i] = (i == 0 || i + 1 == n) ? h / 2.0 : h;
    }
  } else {
    std::mt19937_64 rng(rule.seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    for (auto& x : q.nodes) x = unif(rng);
    std::sort(q.nodes.begin(), q.nodes.end());
    std::fill(q.weights.begin(), q.weights.end(), (hi - lo) / static_cast<double>(n));
  }
  return q;
}

double quad_integrate(const std::function<double(double)>& f, double lo, double hi, const QuadratureRule& rule) {
  const QuadNodes q = quad_nodes(lo, hi, rule);
  if (rule.kind == QuadKind::kMonteCarlo) {
    double sum = 0.0;
    for (double x : q.nodes) sum += f(x);
    return sum / static_cast<double>(q.nodes.size()) * (hi - lo);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) sum += q.weights[i] * f(q.nodes[i]);
  return sum;
}

double quad_integrate_box(const std::function<double(std::span<const double>)>& f, double lo, double hi, int dim,
                          const QuadratureRule& rule) {
  if (dim <= 0) throw DomainError("quadrature: dimension must be positive");
  rule.validate();
  check_interval(lo, hi);
  std::vector<double> point(static_cast<std::size_t>(dim));

  if (rule.kind == QuadKind::kMonteCarlo) {
    std::mt19937_64 rng(rule.seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    double sum = 0.0;
    for (int i = 0; i < rule.node_count; ++i) {
      for (auto& c : point) c = unif(rng);
      sum += f(point);
    }
    return sum / rule.node_count * std::pow(hi - lo, dim);
  }

  const QuadNodes axis = quad_nodes(lo, hi, rule);
  const std::size_t n = axis.nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      point[d] = axis.nodes[idx[d]];
      w *= axis.weights[idx[d]];
    }
    sum += w * f(point);
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == n) idx[d--] = 0;
    if (d < 0) break;
  }
  return sum;
}

std::string to_string(QuadKind kind) { return kind == QuadKind::kTrapezoid ? "trapezoid" : "monte_carlo"; }

QuadKind parse_quad_kind(const std::string& name) {
  if (name == "trapezoid") return QuadKind::kTrapezoid;
  if (name == "monte_carlo") return QuadKind::kMonteCarlo;
  throw ConfigError("unknown quadrature kind '" + name + "' (expected trapezoid or monte_carlo)");
}

}  // namespace mnol
