#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mnol/bound_constants.hpp"
#include "mnol/relu_net.hpp"

namespace mnol {

/// Shape of a clipped separable multiple-operator network
///   Clip_a( sum_{p,k,l} theta_{pkl} l_p(alpha) b_k(u) tau_l(x) ).
/// spec_l reads the alpha discretization (d_in = n_cW), spec_b the input
/// discretization (d_in = n_cU) and spec_tau the query point (d_in = d_V).
struct MnoSpec {
  int P = 1;
  int H = 1;
  int N = 1;
  NetClassSpec spec_l;
  NetClassSpec spec_b;
  NetClassSpec spec_tau;
  double coeff_bound = 1.0;
  double clip_a = 1.0;

  int n_cW() const { return spec_l.d_in; }
  int n_cU() const { return spec_b.d_in; }
  int d_V() const { return spec_tau.d_in; }
  int theta_size() const { return P * H * N; }
  int theta_index(int p, int k, int l) const { return (p * H + k) * N + l; }

  void validate() const {
    if (P <= 0 || H <= 0 || N <= 0) throw ConfigError("mno: P, H, N must be positive");
    spec_l.validate();
    spec_b.validate();
    spec_tau.validate();
    if (spec_l.d_out != 1 || spec_b.d_out != 1 || spec_tau.d_out != 1)
      throw ConfigError("mno: subnetworks must have scalar output");
    if (!(coeff_bound > 0.0)) throw ConfigError("mno: coefficient bound I must be positive");
    if (!(clip_a > 0.0)) throw ConfigError("mno: clip level must be positive");
  }

  bool operator==(const MnoSpec&) const = default;
};

template <typename Scalar = double>
struct MnoParams {
  Vector<Scalar> theta;  ///< flattened P x H x N, index (p * H + k) * N + l
  std::vector<MlpParams<Scalar>> l_nets;
  std::vector<MlpParams<Scalar>> b_nets;
  std::vector<MlpParams<Scalar>> tau_nets;
  MnoSpec spec;

  Scalar& theta_at(int p, int k, int l) { return theta(spec.theta_index(p, k, l)); }
  Scalar theta_at(int p, int k, int l) const { return theta(spec.theta_index(p, k, l)); }

  template <typename Other>
  MnoParams<Other> cast() const {
    MnoParams<Other> out;
    out.spec = spec;
    out.theta = theta.template cast<Other>();
    for (const auto& n : l_nets) out.l_nets.push_back(n.template cast<Other>());
    for (const auto& n : b_nets) out.b_nets.push_back(n.template cast<Other>());
    for (const auto& n : tau_nets) out.tau_nets.push_back(n.template cast<Other>());
    return out;
  }
};

template <typename Scalar = double>
struct MnoGrad {
  Vector<Scalar> theta;
  std::vector<GradBundle<Scalar>> l_nets;
  std::vector<GradBundle<Scalar>> b_nets;
  std::vector<GradBundle<Scalar>> tau_nets;
  Scalar loss = Scalar(0);  ///< batch mean squared error at the evaluation point
};

/// One observation (alpha discretization, input discretization, query, target).
struct MnoSample {
  Eigen::VectorXd alpha;
  Eigen::VectorXd u;
  Eigen::VectorXd x;
  double target = 0.0;
};

/// theta uniform on [-I/sqrt(PHN), I/sqrt(PHN)], subnetworks via random_mlp.
template <typename Scalar, typename Urbg>
MnoParams<Scalar> init_mno(const MnoSpec& spec, Urbg& rng) {
  spec.validate();
  MnoParams<Scalar> params;
  params.spec = spec;
  const double s = spec.coeff_bound / std::sqrt(static_cast<double>(spec.theta_size()));
  std::uniform_real_distribution<double> unif(-s, s);
  params.theta.resize(spec.theta_size());
  for (Eigen::Index i = 0; i < params.theta.size(); ++i) params.theta(i) = Scalar(unif(rng));
  for (int p = 0; p < spec.P; ++p) params.l_nets.push_back(random_mlp<Scalar>(spec.spec_l, rng));
  for (int k = 0; k < spec.H; ++k) params.b_nets.push_back(random_mlp<Scalar>(spec.spec_b, rng));
  for (int l = 0; l < spec.N; ++l) params.tau_nets.push_back(random_mlp<Scalar>(spec.spec_tau, rng));
  return params;
}

namespace detail {

template <typename Scalar>
struct MnoParts {
  Vector<Scalar> l, b, tau;
  Scalar sum = Scalar(0);
};

template <typename DA, typename DU, typename DX>
void check_sample_shapes(const MnoSpec& spec, const Eigen::MatrixBase<DA>& alpha, const Eigen::MatrixBase<DU>& u,
                         const Eigen::MatrixBase<DX>& x) {
  if (alpha.size() != spec.n_cW())
    throw ShapeError("alpha discretization has length " + std::to_string(alpha.size()) + ", expected " +
                     std::to_string(spec.n_cW()));
  if (u.size() != spec.n_cU())
    throw ShapeError("input discretization has length " + std::to_string(u.size()) + ", expected " +
                     std::to_string(spec.n_cU()));
  if (x.size() != spec.d_V())
    throw ShapeError("query point has length " + std::to_string(x.size()) + ", expected " +
                     std::to_string(spec.d_V()));
}

inline bool same_vector(const Eigen::VectorXd* key, const Eigen::VectorXd& v) {
  return key != nullptr && (key == &v || (key->size() == v.size() && (key->array() == v.array()).all()));
}

/// Subnetwork outputs cached across consecutive samples that share their
/// alpha or input discretization.
template <typename Scalar>
struct GroupCache {
  const Eigen::VectorXd* alpha_key = nullptr;
  const Eigen::VectorXd* u_key = nullptr;
  Vector<Scalar> l, b;

  void refresh(const MnoParams<Scalar>& params, const MnoSample& s) {
    if (!same_vector(alpha_key, s.alpha)) {
      l.resize(params.spec.P);
      for (int p = 0; p < params.spec.P; ++p) l(p) = forward_scalar(params.l_nets[p], s.alpha);
      alpha_key = &s.alpha;
    }
    if (!same_vector(u_key, s.u)) {
      b.resize(params.spec.H);
      for (int k = 0; k < params.spec.H; ++k) b(k) = forward_scalar(params.b_nets[k], s.u);
      u_key = &s.u;
    }
  }
};

template <typename Scalar, typename DA, typename DU, typename DX>
MnoParts<Scalar> mno_parts(const MnoParams<Scalar>& params, const Eigen::MatrixBase<DA>& alpha,
                           const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DX>& x) {
  const MnoSpec& spec = params.spec;
  check_sample_shapes(spec, alpha, u, x);
  MnoParts<Scalar> parts;
  parts.l.resize(spec.P);
  parts.b.resize(spec.H);
  parts.tau.resize(spec.N);
  for (int p = 0; p < spec.P; ++p) parts.l(p) = forward_scalar(params.l_nets[p], alpha);
  for (int k = 0; k < spec.H; ++k) parts.b(k) = forward_scalar(params.b_nets[k], u);
  for (int l = 0; l < spec.N; ++l) parts.tau(l) = forward_scalar(params.tau_nets[l], x);
  for (int p = 0; p < spec.P; ++p)
    for (int k = 0; k < spec.H; ++k) {
      const Scalar lb = parts.l(p) * parts.b(k);
      for (int l = 0; l < spec.N; ++l) parts.sum += params.theta_at(p, k, l) * lb * parts.tau(l);
    }
  return parts;
}

}  // namespace detail

/// Model output at one (alpha, u, x); wrapped in clip_scalar(clip_a, .)
/// when `clipped` is set.
template <typename Scalar, typename DA, typename DU, typename DX>
Scalar mno_forward(const MnoParams<Scalar>& params, const Eigen::MatrixBase<DA>& alpha,
                   const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DX>& x, bool clipped = true) {
  const Scalar s = detail::mno_parts(params, alpha, u, x).sum;
  return clipped ? clip_scalar(Scalar(params.spec.clip_a), s) : s;
}

template <typename Scalar>
MnoGrad<Scalar> zero_grad(const MnoParams<Scalar>& params) {
  MnoGrad<Scalar> g;
  g.theta = Vector<Scalar>::Zero(params.theta.size());
  for (const auto& n : params.l_nets) g.l_nets.push_back(GradBundle<Scalar>::zeros_like(n));
  for (const auto& n : params.b_nets) g.b_nets.push_back(GradBundle<Scalar>::zeros_like(n));
  for (const auto& n : params.tau_nets) g.tau_nets.push_back(GradBundle<Scalar>::zeros_like(n));
  return g;
}

/// Clipped outputs for a batch; alpha and input subnetworks are evaluated
/// once per run of consecutive samples sharing the same discretization.
template <typename Scalar>
std::vector<Scalar> mno_predict(const MnoParams<Scalar>& params, std::span<const MnoSample> batch) {
  const MnoSpec& spec = params.spec;
  detail::GroupCache<Scalar> cache;
  std::vector<Scalar> out;
  out.reserve(batch.size());
  Vector<Scalar> tau(spec.N);
  for (const MnoSample& s : batch) {
    detail::check_sample_shapes(spec, s.alpha, s.u, s.x);
    cache.refresh(params, s);
    for (int l = 0; l < spec.N; ++l) tau(l) = forward_scalar(params.tau_nets[l], s.x);
    Scalar sum(0);
    for (int p = 0; p < spec.P; ++p)
      for (int k = 0; k < spec.H; ++k) {
        const Scalar lb = cache.l(p) * cache.b(k);
        for (int l = 0; l < spec.N; ++l) sum += params.theta_at(p, k, l) * lb * tau(l);
      }
    out.push_back(clip_scalar(Scalar(spec.clip_a), sum));
  }
  return out;
}

/// Gradient of (1/|batch|) sum (clipped output - target)^2 with respect to
/// theta and every subnetwork parameter. The clip derivative vanishes at and
/// beyond saturation. Backpropagation is linear in the upstream gradient, so
/// consecutive samples sharing alpha (or u) pass through those networks once.
template <typename Scalar>
MnoGrad<Scalar> mno_grad(const MnoParams<Scalar>& params, std::span<const MnoSample> batch) {
  if (batch.empty()) throw DomainError("mno_grad: empty batch");
  const MnoSpec& spec = params.spec;
  const Scalar a(spec.clip_a);
  const Scalar inv_n = Scalar(1) / Scalar(batch.size());
  MnoGrad<Scalar> g = zero_grad(params);
  Vector<Scalar> up(1);
  Vector<Scalar> tau(spec.N);
  Vector<Scalar> dl_acc = Vector<Scalar>::Zero(spec.P);
  Vector<Scalar> db_acc = Vector<Scalar>::Zero(spec.H);
  Vector<Scalar> dtau(spec.N);
  detail::GroupCache<Scalar> cache;

  auto flush_alpha = [&] {
    if (!cache.alpha_key) return;
    for (int p = 0; p < spec.P; ++p)
      if (dl_acc(p) != Scalar(0)) {
        up(0) = dl_acc(p);
        backprop_accumulate(params.l_nets[p], *cache.alpha_key, up, g.l_nets[p]);
      }
    dl_acc.setZero();
  };
  auto flush_u = [&] {
    if (!cache.u_key) return;
    for (int k = 0; k < spec.H; ++k)
      if (db_acc(k) != Scalar(0)) {
        up(0) = db_acc(k);
        backprop_accumulate(params.b_nets[k], *cache.u_key, up, g.b_nets[k]);
      }
    db_acc.setZero();
  };

  for (const MnoSample& sample : batch) {
    detail::check_sample_shapes(spec, sample.alpha, sample.u, sample.x);
    if (!detail::same_vector(cache.alpha_key, sample.alpha)) flush_alpha();
    if (!detail::same_vector(cache.u_key, sample.u)) flush_u();
    cache.refresh(params, sample);
    for (int l = 0; l < spec.N; ++l) tau(l) = forward_scalar(params.tau_nets[l], sample.x);
    Scalar sum(0);
    for (int p = 0; p < spec.P; ++p)
      for (int k = 0; k < spec.H; ++k) {
        const Scalar lb = cache.l(p) * cache.b(k);
        for (int l = 0; l < spec.N; ++l) sum += params.theta_at(p, k, l) * lb * tau(l);
      }

    const Scalar resid = clip_scalar(a, sum) - Scalar(sample.target);
    g.loss += resid * resid * inv_n;
    const Scalar ds = Scalar(2) * resid * inv_n * clip_derivative(a, sum);
    if (ds == Scalar(0)) continue;

    dtau.setZero();
    for (int p = 0; p < spec.P; ++p)
      for (int k = 0; k < spec.H; ++k)
        for (int l = 0; l < spec.N; ++l) {
          const Scalar th = params.theta_at(p, k, l);
          g.theta(spec.theta_index(p, k, l)) += ds * cache.l(p) * cache.b(k) * tau(l);
          dl_acc(p) += ds * th * cache.b(k) * tau(l);
          db_acc(k) += ds * th * cache.l(p) * tau(l);
          dtau(l) += ds * th * cache.l(p) * cache.b(k);
        }
    for (int l = 0; l < spec.N; ++l) {
      up(0) = dtau(l);
      backprop_accumulate(params.tau_nets[l], sample.x, up, g.tau_nets[l]);
    }
  }
  flush_alpha();
  flush_u();
  return g;
}

/// params += scale * grad
template <typename Scalar>
void add_scaled(MnoParams<Scalar>& params, const MnoGrad<Scalar>& grad, Scalar scale) {
  params.theta += scale * grad.theta;
  for (std::size_t i = 0; i < params.l_nets.size(); ++i) add_scaled(params.l_nets[i], grad.l_nets[i], scale);
  for (std::size_t i = 0; i < params.b_nets.size(); ++i) add_scaled(params.b_nets[i], grad.b_nets[i], scale);
  for (std::size_t i = 0; i < params.tau_nets.size(); ++i) add_scaled(params.tau_nets[i], grad.tau_nets[i], scale);
}

/// Clamps theta to [-I, I] and projects every subnetwork onto its class.
template <typename Scalar>
MnoParams<Scalar> mno_project(MnoParams<Scalar> params) {
  const Scalar I(params.spec.coeff_bound);
  params.theta = params.theta.cwiseMax(-I).cwiseMin(I);
  for (auto& n : params.l_nets) n = project_to_class(std::move(n));
  for (auto& n : params.b_nets) n = project_to_class(std::move(n));
  for (auto& n : params.tau_nets) n = project_to_class(std::move(n));
  return params;
}

template <typename Scalar>
bool mno_in_class(const MnoParams<Scalar>& params) {
  if (params.theta.size() > 0 && params.theta.cwiseAbs().maxCoeff() > Scalar(params.spec.coeff_bound)) return false;
  for (const auto* nets : {&params.l_nets, &params.b_nets, &params.tau_nets})
    for (const auto& n : *nets)
      if (!in_class(n)) return false;
  return true;
}

/// Prescriber constants: `base` targets accuracy eps directly, `halved`
/// targets eps/2 as needed by the generalization bound.
enum class PrescribeMode { kBase, kHalved };

/// Prescribed counts and classes. The counts are the real-valued formula
/// values; the model they describe uses P^n_cW, H^n_cU and N^d_V terms.
struct Prescription {
  PrescribeMode mode = PrescribeMode::kHalved;
  double eps = 0.0;
  double N = 0.0, H = 0.0, P = 0.0;
  double log_N = 0.0, log_H = 0.0, log_P = 0.0;
  double delta = 0.0, zeta = 0.0;  ///< covering radii for {c_s} and {y_s}
  double log_delta = 0.0;
  /// Natural logs of kappa_1..3; kappa may overflow a double for small eps.
  double log_kappa_tau = 0.0, log_kappa_b = 0.0, log_kappa_l = 0.0;
  /// Effective term counts P^n_cW, H^n_cU, N^d_V (natural log).
  double log_terms_l = 0.0, log_terms_b = 0.0, log_terms_tau = 0.0;
  /// Classes F_1 (tau), F_2 (b), F_3 (l), with R_i = 1. Kappa is clamped to
  /// the largest finite double if it overflows; use log_kappa_* then.
  MnoSpec spec;
};

Prescription prescribe_architecture(double eps, int d_V, int n_cW, int n_cU, const BoundConstants& constants,
                                    PrescribeMode mode);

std::string to_string(PrescribeMode mode);
PrescribeMode parse_prescribe_mode(const std::string& name);

}  // namespace mnol
