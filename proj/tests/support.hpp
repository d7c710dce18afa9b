#pragma once

// Reference implementations shared by the unit tests and the acceptance run.
// They use plain loops over std::vector so they do not share code paths with
// the Eigen-based library routines they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mnol/mno.hpp"
#include "mnol/relu_net.hpp"

namespace ref {

using mnol::MlpParams;
using mnol::MnoParams;
using mnol::MnoSample;

/// Network output by explicit loops. Records the smallest |pre-activation|
/// of any hidden unit in `min_hidden`, so callers can stay away from kinks.
inline std::vector<double> net_forward(const MlpParams<double>& p, const std::vector<double>& x,
                                       double* min_hidden = nullptr) {
  std::vector<double> h = x;
  const int depth = p.depth();
  for (int l = 0; l < depth; ++l) {
    const auto& W = p.weights[l];
    const auto& b = p.biases[l];
    std::vector<double> z(W.rows());
    for (int r = 0; r < W.rows(); ++r) {
      double acc = b(r);
      for (int c = 0; c < W.cols(); ++c) acc += W(r, c) * h[c];
      if (l + 1 < depth) {
        if (min_hidden) *min_hidden = std::min(*min_hidden, std::abs(acc));
        acc = acc > 0.0 ? acc : 0.0;
      }
      z[r] = acc;
    }
    h = std::move(z);
  }
  return h;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline double net_scalar(const MlpParams<double>& p, const Eigen::VectorXd& x, double* min_hidden = nullptr) {
  return net_forward(p, to_std(x), min_hidden)[0];
}

/// Unclipped separable sum.
inline double mno_sum(const MnoParams<double>& m, const MnoSample& s, double* min_hidden = nullptr) {
  const auto& sp = m.spec;
  double total = 0.0;
  for (int p = 0; p < sp.P; ++p) {
    const double lv = net_scalar(m.l_nets[p], s.alpha, min_hidden);
    for (int k = 0; k < sp.H; ++k) {
      const double bv = net_scalar(m.b_nets[k], s.u, min_hidden);
      for (int l = 0; l < sp.N; ++l)
        total += m.theta((p * sp.H + k) * sp.N + l) * lv * bv * net_scalar(m.tau_nets[l], s.x, min_hidden);
    }
  }
  return total;
}

inline double clip(double a, double v) { return std::min(std::max(v, -a), a); }

inline double mno_loss(const MnoParams<double>& m, const std::vector<MnoSample>& batch) {
  double acc = 0.0;
  for (const auto& s : batch) {
    const double r = clip(m.spec.clip_a, mno_sum(m, s)) - s.target;
    acc += r * r;
  }
  return acc / static_cast<double>(batch.size());
}

/// Gradient entries in the library's canonical order: per layer, the weight
/// matrix row by row, then the bias.
inline void append(std::vector<double>& out, const mnol::GradBundle<double>& g) {
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    for (int r = 0; r < g.weights[l].rows(); ++r)
      for (int c = 0; c < g.weights[l].cols(); ++c) out.push_back(g.weights[l](r, c));
    for (int r = 0; r < g.biases[l].size(); ++r) out.push_back(g.biases[l](r));
  }
}

inline std::vector<double> flatten(const mnol::MnoGrad<double>& g) {
  std::vector<double> out(g.theta.data(), g.theta.data() + g.theta.size());
  for (const auto& b : g.l_nets) append(out, b);
  for (const auto& b : g.b_nets) append(out, b);
  for (const auto& b : g.tau_nets) append(out, b);
  return out;
}

/// Pointers to every parameter of an MNO, in the same order as flatten().
inline std::vector<double*> param_slots(MnoParams<double>& m) {
  std::vector<double*> out;
  for (Eigen::Index i = 0; i < m.theta.size(); ++i) out.push_back(&m.theta(i));
  for (auto* nets : {&m.l_nets, &m.b_nets, &m.tau_nets})
    for (auto& n : *nets) mnol::for_each_param(n, [&](double& v) { out.push_back(&v); });
  return out;
}

inline std::vector<double*> param_slots(MlpParams<double>& n) {
  std::vector<double*> out;
  mnol::for_each_param(n, [&](double& v) { out.push_back(&v); });
  return out;
}

/// max |g - fd| / max(|g|_inf, |fd|_inf), with central differences.
template <typename Params, typename Loss>
double fd_relative_error(Params params, const std::vector<double>& analytic, Loss&& loss, double h = 1e-6) {
  auto slots = param_slots(params);
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double saved = *slots[i];
    *slots[i] = saved + h;
    const double up = loss(params);
    *slots[i] = saved - h;
    const double down = loss(params);
    *slots[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    diff = std::max(diff, std::abs(fd - analytic[i]));
    scale = std::max({scale, std::abs(fd), std::abs(analytic[i])});
  }
  return scale > 0.0 ? diff / scale : diff;
}

inline Eigen::VectorXd random_vector(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline MlpParams<double> random_net(const mnol::NetClassSpec& spec, std::mt19937_64& rng) {
  auto p = mnol::zero_mlp<double>(spec);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto* v : param_slots(p)) *v = u(rng);
  return p;
}

struct NetCase {
  MlpParams<double> params;
  Eigen::VectorXd x;
  Eigen::VectorXd upstream;
};

/// Random network with depth <= 4, width <= 8 and an input whose hidden
/// pre-activations all sit at least `margin` from zero.
inline NetCase random_net_case(std::mt19937_64& rng, double margin = 1e-3) {
  std::uniform_int_distribution<int> depth(1, 4), width(1, 8), din(1, 3), dout(1, 2);
  for (;;) {
    mnol::NetClassSpec spec;
    spec.depth = depth(rng);
    spec.width = width(rng);
    spec.d_in = din(rng);
    spec.d_out = dout(rng);
    spec.sparsity = spec.dense_parameter_count();
    spec.kappa = 1.0;
    NetCase c{random_net(spec, rng), random_vector(spec.d_in, -2.0, 2.0, rng),
              random_vector(spec.d_out, -1.0, 1.0, rng)};
    double min_hidden = std::numeric_limits<double>::infinity();
    net_forward(c.params, to_std(c.x), &min_hidden);
    if (min_hidden > margin) return c;
  }
}

inline double net_case_error(const NetCase& c) {
  const auto g = mnol::backprop(c.params, c.x, c.upstream);
  std::vector<double> analytic;
  append(analytic, g);
  auto loss = [&](const MlpParams<double>& p) {
    const auto y = net_forward(p, to_std(c.x));
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += c.upstream(i) * y[i];
    return s;
  };
  return fd_relative_error(c.params, analytic, loss);
}

struct MnoCase {
  MnoParams<double> params;
  std::vector<MnoSample> batch;
};

/// Random MNO with P, H, N <= 3 and a batch whose samples share alpha and u
/// vectors in runs, keeping every kink (ReLU and clip) at least `margin` away.
inline MnoCase random_mno_case(std::mt19937_64& rng, double margin = 1e-3) {
  std::uniform_int_distribution<int> count(1, 3), depth(1, 3), width(1, 4), dim(1, 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (;;) {
    mnol::MnoSpec spec;
    spec.P = count(rng);
    spec.H = count(rng);
    spec.N = count(rng);
    auto net = [&](int d_in) {
      mnol::NetClassSpec s;
      s.d_in = d_in;
      s.depth = depth(rng);
      s.width = width(rng);
      s.sparsity = s.dense_parameter_count();
      return s;
    };
    spec.spec_l = net(dim(rng));
    spec.spec_b = net(dim(rng) + 1);
    spec.spec_tau = net(dim(rng));
    spec.coeff_bound = 1.0;
    spec.clip_a = std::uniform_int_distribution<int>(0, 1)(rng) ? 0.3 : 50.0;

    MnoCase c;
    c.params.spec = spec;
    c.params.theta = random_vector(spec.theta_size(), -1.0, 1.0, rng);
    for (int p = 0; p < spec.P; ++p) c.params.l_nets.push_back(random_net(spec.spec_l, rng));
    for (int k = 0; k < spec.H; ++k) c.params.b_nets.push_back(random_net(spec.spec_b, rng));
    for (int l = 0; l < spec.N; ++l) c.params.tau_nets.push_back(random_net(spec.spec_tau, rng));

    const Eigen::VectorXd alphas[2] = {random_vector(spec.n_cW(), -1, 1, rng), random_vector(spec.n_cW(), -1, 1, rng)};
    const Eigen::VectorXd us[2] = {random_vector(spec.n_cU(), -1, 1, rng), random_vector(spec.n_cU(), -1, 1, rng)};
    double min_hidden = std::numeric_limits<double>::infinity();
    double min_clip = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) {
      MnoSample s{alphas[i / 3], us[(i / 2) % 2], random_vector(spec.d_V(), -1, 1, rng), unit(rng)};
      const double sum = mno_sum(c.params, s, &min_hidden);
      min_clip = std::min(std::abs(std::abs(sum) - spec.clip_a), min_clip);
      c.batch.push_back(std::move(s));
    }
    if (min_hidden > margin && min_clip > margin) return c;
  }
}

inline double mno_case_error(const MnoCase& c) {
  const auto g = mnol::mno_grad(c.params, std::span<const MnoSample>(c.batch));
  return fd_relative_error(c.params, flatten(g), [&](const MnoParams<double>& p) { return mno_loss(p, c.batch); });
}

/// ln binom(m, k) via lgamma.
inline double log_binom(double m, double k) { return std::lgamma(m + 1) - std::lgamma(k + 1) - std::lgamma(m - k + 1); }

/// ln of binom(L(p^2+p), K) (floor(L k^L (p+1)^(L-1)(p|x|+1)/eta) + 1)^K.
inline double log_net_covering(int L, int p, long long K, double kappa, double x_norm, double eta) {
  const double m = L * (double(p) * p + p);
  const double kk = std::min<double>(K, m);
  const double scale = L * std::pow(kappa, L) * std::pow(p + 1.0, L - 1.0) * (p * x_norm + 1.0);
  return log_binom(m, kk) + kk * std::log(std::floor(scale / eta) + 1.0);
}

}  // namespace ref
