#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "mnol/errors.hpp"

namespace mnol {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Architectural constraints of a ReLU network class: input and output
/// dimension, depth (number of affine layers), maximal width, maximal number
/// of nonzero parameters, maximal parameter magnitude and output sup bound.
struct NetClassSpec {
  int d_in = 1;
  int d_out = 1;
  int depth = 1;
  int width = 1;
  long long sparsity = 1;
  double kappa = 1.0;
  double output_bound = 1.0;

  /// Throws ConfigError if a count is nonpositive or kappa < 1.
  void validate() const {
    if (d_in <= 0 || d_out <= 0 || depth <= 0 || width <= 0 || sparsity <= 0)
      throw ConfigError("network class: all counts must be positive");
    if (!(kappa >= 1.0))
      throw ConfigError("network class: kappa must be >= 1, got " + std::to_string(kappa));
    if (!(output_bound > 0.0)) throw ConfigError("network class: output bound must be positive");
  }

  int layer_in(int layer) const { return layer == 0 ? d_in : width; }
  int layer_out(int layer) const { return layer == depth - 1 ? d_out : width; }

  /// Number of weight and bias entries of a dense network with this shape.
  long long dense_parameter_count() const {
    long long n = 0;
    for (int l = 0; l < depth; ++l)
      n += static_cast<long long>(layer_out(l)) * (layer_in(l) + 1);
    return n;
  }

  bool operator==(const NetClassSpec&) const = default;
};

template <typename Scalar = double>
struct MlpParams {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  NetClassSpec spec;

  int depth() const { return static_cast<int>(weights.size()); }

  template <typename Other>
  MlpParams<Other> cast() const {
    MlpParams<Other> out;
    out.spec = spec;
    for (const auto& w : weights) out.weights.push_back(w.template cast<Other>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<Other>());
    return out;
  }
};

/// Gradient with the same layout as the MlpParams it was computed for.
template <typename Scalar = double>
struct GradBundle {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;

  static GradBundle zeros_like(const MlpParams<Scalar>& params) {
    GradBundle g;
    for (const auto& w : params.weights) g.weights.push_back(Matrix<Scalar>::Zero(w.rows(), w.cols()));
    for (const auto& b : params.biases) g.biases.push_back(Vector<Scalar>::Zero(b.size()));
    return g;
  }

  GradBundle& operator+=(const GradBundle& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      weights[l] += other.weights[l];
      biases[l] += other.biases[l];
    }
    return *this;
  }

  GradBundle& operator*=(Scalar s) {
    for (auto& w : weights) w *= s;
    for (auto& b : biases) b *= s;
    return *this;
  }
};

template <typename Scalar>
Scalar relu(Scalar v) {
  return v > Scalar(0) ? v : Scalar(0);
}

/// All-zero network with the layer shapes of `spec`.
template <typename Scalar = double>
MlpParams<Scalar> zero_mlp(const NetClassSpec& spec) {
  spec.validate();
  MlpParams<Scalar> params;
  params.spec = spec;
  for (int l = 0; l < spec.depth; ++l) {
    params.weights.push_back(Matrix<Scalar>::Zero(spec.layer_out(l), spec.layer_in(l)));
    params.biases.push_back(Vector<Scalar>::Zero(spec.layer_out(l)));
  }
  return params;
}

/// Network whose output is the constant `value` (zero weights, last bias).
template <typename Scalar = double>
MlpParams<Scalar> constant_mlp(const NetClassSpec& spec, Scalar value) {
  auto params = zero_mlp<Scalar>(spec);
  params.biases.back().setConstant(value);
  return params;
}

/// Entries uniform on [-s, s] with s = min(kappa, 1) / sqrt(width).
template <typename Scalar, typename Urbg>
MlpParams<Scalar> random_mlp(const NetClassSpec& spec, Urbg& rng) {
  auto params = zero_mlp<Scalar>(spec);
  const double scale = std::min(spec.kappa, 1.0) / std::sqrt(static_cast<double>(spec.width));
  std::uniform_real_distribution<double> unif(-scale, scale);
  for (int l = 0; l < spec.depth; ++l) {
    for (Eigen::Index i = 0; i < params.weights[l].size(); ++i) params.weights[l].data()[i] = Scalar(unif(rng));
    for (Eigen::Index i = 0; i < params.biases[l].size(); ++i) params.biases[l][i] = Scalar(unif(rng));
  }
  return params;
}

namespace detail {

template <typename Scalar, typename Derived>
void check_input(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  if (params.weights.empty()) throw ShapeError("network has no layers");
  if (x.size() != params.weights.front().cols())
    throw ShapeError("network input has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(params.weights.front().cols()));
}

}  // namespace detail

/// Evaluates W_L ReLU(... ReLU(W_1 x + b_1) ...) + b_L. A depth-1 network is
/// a plain affine map.
template <typename Scalar, typename Derived>
Vector<Scalar> forward(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input(params, x);
  Vector<Scalar> h = x.template cast<Scalar>();
  const int depth = params.depth();
  for (int l = 0; l < depth; ++l) {
    Vector<Scalar> z = params.weights[l] * h + params.biases[l];
    if (l + 1 < depth) z = z.unaryExpr([](Scalar v) { return relu(v); });
    h = std::move(z);
  }
  return h;
}

/// Scalar output of a d_out = 1 network.
template <typename Scalar, typename Derived>
Scalar forward_scalar(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  return forward(params, x)(0);
}

/// Adds the gradient of upstream . q(x) with respect to every parameter into
/// `acc`. The ReLU derivative at 0 is taken as 0.
template <typename Scalar, typename Derived, typename DerivedUp>
void backprop_accumulate(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x,
                         const Eigen::MatrixBase<DerivedUp>& upstream, GradBundle<Scalar>& acc) {
  detail::check_input(params, x);
  const int depth = params.depth();
  if (upstream.size() != params.weights.back().rows())
    throw ShapeError("upstream gradient has length " + std::to_string(upstream.size()) + ", expected " +
                     std::to_string(params.weights.back().rows()));

  // activations[l] is the input of layer l; pre[l] its pre-activation output.
  std::vector<Vector<Scalar>> activations(depth);
  std::vector<Vector<Scalar>> pre(depth);
  activations[0] = x.template cast<Scalar>();
  for (int l = 0; l < depth; ++l) {
    pre[l] = params.weights[l] * activations[l] + params.biases[l];
    if (l + 1 < depth) activations[l + 1] = pre[l].unaryExpr([](Scalar v) { return relu(v); });
  }

  Vector<Scalar> delta = upstream.template cast<Scalar>();
  for (int l = depth - 1; l >= 0; --l) {
    acc.weights[l].noalias() += delta * activations[l].transpose();
    acc.biases[l] += delta;
    if (l > 0) {
      Vector<Scalar> back = params.weights[l].transpose() * delta;
      delta = back.cwiseProduct(
          pre[l - 1].unaryExpr([](Scalar v) { return v > Scalar(0) ? Scalar(1) : Scalar(0); }));
    }
  }
}

/// Gradient of upstream . q(x) with respect to every parameter.
template <typename Scalar, typename Derived, typename DerivedUp>
GradBundle<Scalar> backprop(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x,
                            const Eigen::MatrixBase<DerivedUp>& upstream) {
  detail::check_input(params, x);
  GradBundle<Scalar> grad = GradBundle<Scalar>::zeros_like(params);
  backprop_accumulate(params, x, upstream, grad);
  return grad;
}

/// params += scale * grad
template <typename Scalar>
void add_scaled(MlpParams<Scalar>& params, const GradBundle<Scalar>& grad, Scalar scale) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    params.weights[l] += scale * grad.weights[l];
    params.biases[l] += scale * grad.biases[l];
  }
}

/// Visits every parameter in canonical order: layer by layer, the weight
/// matrix in row-major order followed by the bias vector.
template <typename Params, typename Fn>
void for_each_param(Params& params, Fn&& fn) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    auto& w = params.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) fn(w(r, c));
    auto& b = params.biases[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) fn(b(r));
  }
}

template <typename Scalar>
long long nonzero_count(const MlpParams<Scalar>& params) {
  long long n = 0;
  for_each_param(params, [&](const Scalar& v) { n += (v != Scalar(0)); });
  return n;
}

template <typename Scalar>
Scalar max_abs_param(const MlpParams<Scalar>& params) {
  Scalar m(0);
  for_each_param(params, [&](const Scalar& v) { m = std::max<Scalar>(m, std::abs(v)); });
  return m;
}

/// Maximum parameter discrepancy between two networks of equal shape.
template <typename Scalar>
Scalar param_distance(const MlpParams<Scalar>& a, const MlpParams<Scalar>& b) {
  if (a.weights.size() != b.weights.size()) throw ShapeError("networks differ in depth");
  Scalar d(0);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() || a.weights[l].cols() != b.weights[l].cols())
      throw ShapeError("networks differ in layer shape");
    d = std::max<Scalar>(d, (a.weights[l] - b.weights[l]).cwiseAbs().maxCoeff());
    d = std::max<Scalar>(d, (a.biases[l] - b.biases[l]).cwiseAbs().maxCoeff());
  }
  return d;
}

template <typename Scalar>
bool in_class(const MlpParams<Scalar>& params) {
  return max_abs_param(params) <= Scalar(params.spec.kappa) && nonzero_count(params) <= params.spec.sparsity;
}

/// Clamps every parameter to [-kappa, kappa], then zeroes the
/// smallest-magnitude entries until at most `sparsity` remain nonzero.
/// Ties go to the earliest entry in canonical order (see for_each_param).
template <typename Scalar>
MlpParams<Scalar> project_to_class(MlpParams<Scalar> params) {
  const Scalar kappa(params.spec.kappa);
  for_each_param(params, [&](Scalar& v) { v = std::clamp(v, -kappa, kappa); });

  const long long excess = nonzero_count(params) - params.spec.sparsity;
  if (excess <= 0) return params;

  std::vector<std::tuple<Scalar, std::size_t, Scalar*>> entries;
  std::size_t order = 0;
  for_each_param(params, [&](Scalar& v) {
    if (v != Scalar(0)) entries.emplace_back(std::abs(v), order, &v);
    ++order;
  });
  std::nth_element(entries.begin(), entries.begin() + (excess - 1), entries.end(),
                   [](const auto& a, const auto& b) {
                     return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
                   });
  for (long long i = 0; i < excess; ++i) *std::get<2>(entries[i]) = Scalar(0);
  return params;
}

/// min(max(v, -a), a)
template <typename Scalar>
Scalar clip_scalar(Scalar a, Scalar v) {
  if (!(a > Scalar(0))) throw DomainError("clip level must be positive");
  return std::min(std::max(v, -a), a);
}

/// The same clip realized by a two-layer ReLU network:
/// -ReLU(-ReLU(v + a) + 2a) + a.
template <typename Scalar>
Scalar clip_scalar_relu(Scalar a, Scalar v) {
  if (!(a > Scalar(0))) throw DomainError("clip level must be positive");
  return -relu(-relu(v + a) + Scalar(2) * a) + a;
}

/// Derivative of the ReLU realization: 1 strictly inside (-a, a), else 0.
template <typename Scalar>
Scalar clip_derivative(Scalar a, Scalar v) {
  return (v > -a && v < a) ? Scalar(1) : Scalar(0);
}

struct ClassBounds {
  double output_bound;    ///< kappa^L (p+1)^(L-1) (p |x| + 1)
  double param_lipschitz; ///< L kappa^(L-1) (p+1)^(L-1) (p |x| + 1)
};

/// Closed-form output bound and parameter-Lipschitz constant of a class.
inline ClassBounds class_bounds(const NetClassSpec& spec, double x_inf_norm) {
  if (!(spec.kappa >= 1.0)) throw DomainError("class_bounds requires kappa >= 1");
  if (!(x_inf_norm >= 0.0)) throw DomainError("class_bounds requires a nonnegative input norm");
  const double L = spec.depth;
  const double p = spec.width;
  const double common = std::pow(p + 1.0, L - 1.0) * (p * x_inf_norm + 1.0);
  return {std::pow(spec.kappa, L) * common, L * std::pow(spec.kappa, L - 1.0) * common};
}

}  // namespace mnol
