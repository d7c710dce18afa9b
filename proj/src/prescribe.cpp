#include <algorithm>
#include <cmath>
#include <limits>

#include "mnol/mno.hpp"

namespace mnol {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// ceil that ignores a few ulps of excess from exp(log(.)) round trips.
double guarded_ceil(double v) { return std::ceil(v * (1.0 - 1e-12)); }

int to_count(double log_value) {
  if (log_value >= std::log(static_cast<double>(std::numeric_limits<int>::max())))
    return std::numeric_limits<int>::max();
  return static_cast<int>(std::max(1.0, guarded_ceil(std::exp(log_value))));
}

long long to_size(double v) {
  if (!(v < 9.0e18)) return std::numeric_limits<long long>::max();
  return static_cast<long long>(std::max(1.0, guarded_ceil(v)));
}

// exp with results within a few ulps of an integer snapped to it.
double exp_snapped(double log_value) {
  const double v = std::exp(log_value);
  const double r = std::round(v);
  return std::abs(v - r) <= 1e-12 * std::abs(v) ? r : v;
}

double exp_or_max(double log_value) {
  const double v = std::exp(log_value);
  return std::isfinite(v) ? std::max(1.0, v) : std::numeric_limits<double>::max();
}

// ln of the number of separable terms count^exponent, with the count rounded up.
double log_term_count(double log_count, int exponent) {
  if (log_count < 40.0) return exponent * std::log(std::max(1.0, guarded_ceil(std::exp(log_count))));
  return exponent * log_count;
}

}  // namespace

std::string to_string(PrescribeMode mode) { return mode == PrescribeMode::kBase ? "base" : "halved"; }

PrescribeMode parse_prescribe_mode(const std::string& name) {
  if (name == "base") return PrescribeMode::kBase;
  if (name == "halved") return PrescribeMode::kHalved;
  throw ConfigError("unknown prescriber mode '" + name + "' (expected base or halved)");
}

Prescription prescribe_architecture(double eps, int d_V, int n_cW, int n_cU, const BoundConstants& c,
                                    PrescribeMode mode) {
  if (!(eps > 0.0)) throw DomainError("prescribe_architecture: eps must be positive");
  if (d_V <= 0 || n_cW <= 0 || n_cU <= 0) throw DomainError("prescribe_architecture: dimensions must be positive");
  for (double k : {c.C, c.C_prime, c.C_dprime, c.C_delta, c.C_zeta, c.big_o, c.I, c.beta_V})
    if (!(k > 0.0)) throw DomainError("prescribe_architecture: constants must be positive");
  if (c.width <= 0) throw DomainError("prescribe_architecture: width must be positive");
  const bool halved = mode == PrescribeMode::kHalved;
  if (halved && c.I < c.beta_V) throw ConfigError("prescribe_architecture: requires I >= beta_V");

  const double dv = d_V, nw = n_cW, nu = n_cU;
  const double ln_eps = std::log(eps);
  const double ln_inv_eps = -ln_eps;
  // ln(C'' sqrt(n_cW)) and ln(C sqrt(d_V))
  const double ln_cw = std::log(c.C_dprime) + 0.5 * std::log(nw);
  const double ln_cv = std::log(c.C) + 0.5 * std::log(dv);
  // ln(2^(n_cW+1) (C'' sqrt n_cW)^n_cW) and ln(2^(d_V+1) (C sqrt d_V)^d_V)
  const double A = (nw + 1.0) * kLn2 + nw * ln_cw;
  const double B = (dv + 1.0) * kLn2 + dv * ln_cv;

  Prescription out;
  out.mode = mode;
  out.eps = eps;

  const double two_pow_N = halved ? 2.0 * nw + 3.0 : nw + 2.0;
  out.log_N = two_pow_N * kLn2 + ln_cv + nw * ln_cw - (nw + 1.0) * ln_eps;

  const double two_pow_H = halved ? 3.0 + 2.0 * nw + 3.0 * dv + 2.0 * dv * nw : (dv + 1.0) * (nw + 2.0);
  out.log_H = two_pow_H * kLn2 + std::log(c.C_prime) + 0.5 * std::log(nu) + dv * ln_cv + nw * (dv + 1.0) * ln_cw -
              (dv + 1.0) * (1.0 + nw) * ln_eps;

  out.log_P = (halved ? 2.0 : 1.0) * kLn2 + ln_cw - ln_eps;

  out.N = exp_snapped(out.log_N);
  out.H = exp_snapped(out.log_H);
  out.P = exp_snapped(out.log_P);

  const double two_pow_delta = halved ? 2.0 * dv + 2.0 * nw + 3.0 + dv * nw : dv + nw + 2.0;
  out.log_delta = std::log(c.C_delta) + (1.0 + dv) * (1.0 + nw) * ln_eps - (two_pow_delta * kLn2 + dv * ln_cv + nw * ln_cw);
  out.delta = std::exp(out.log_delta);
  out.zeta = c.C_zeta * (halved ? eps / 2.0 : eps);

  const double extra_ln2 = halved ? 0.0 : 1.0;
  const double ln_big_o = std::log(c.big_o);

  // F_1: query-point networks tau.
  const double L1 = c.big_o * (dv * dv * std::log(dv) + dv * dv * (nw + 1.0) * ln_inv_eps + dv * dv * A +
                               extra_ln2 * dv * dv * kLn2);
  out.log_kappa_tau = ln_big_o + (dv / 2.0 + 1.0) * std::log(dv) - (dv + 1.0) * (nw + 1.0) * ln_eps +
                      (dv + 1.0) * ((nw + 2.0) * kLn2 + nw * ln_cw) + (halved ? (dv + 1.0) * (nw + 1.0) * kLn2 : 0.0);

  // F_2: input-function networks b.
  const double L2 = c.big_o * (nu * nu * std::log(nu) + nu * nu * (dv + 1.0) * (nw + 1.0) * ln_inv_eps + nu * nu * B +
                               nu * nu * (dv + 1.0) * A + extra_ln2 * nu * nu * kLn2);
  const double ln_eps2 = halved ? ln_eps - kLn2 : ln_eps;
  out.log_kappa_b = ln_big_o + (nu / 2.0 + 1.0) * std::log(nu) - (dv + 1.0) * (nu + 1.0) * (nw + 1.0) * ln_eps2 +
                    (nu + 1.0) * ((dv + 2.0) * kLn2 + dv * ln_cv) + (dv + 1.0) * (nu + 1.0) * B;

  // F_3: operator-descriptor networks l.
  const double L3 = c.big_o * (nw * nw * std::log(nw) + nw * nw * ln_inv_eps + extra_ln2 * nw * nw * kLn2);
  out.log_kappa_l = ln_big_o + (nw / 2.0 + 1.0) * std::log(nw) + (nw + 1.0) * kLn2 - (nw + 1.0) * ln_eps +
                    (halved ? (nw + 1.0) * kLn2 : 0.0);

  auto make_class = [&](int d_in, double depth, double log_kappa) {
    NetClassSpec s;
    s.d_in = d_in;
    s.d_out = 1;
    s.depth = static_cast<int>(std::min<long long>(to_size(depth), std::numeric_limits<int>::max()));
    s.width = c.width;
    s.sparsity = to_size(depth);  // K_i carries the same bullet as L_i
    s.kappa = exp_or_max(log_kappa);
    s.output_bound = 1.0;
    return s;
  };

  out.spec.spec_tau = make_class(d_V, L1, out.log_kappa_tau);
  out.spec.spec_b = make_class(n_cU, L2, out.log_kappa_b);
  out.spec.spec_l = make_class(n_cW, L3, out.log_kappa_l);
  out.log_kappa_tau = std::max(0.0, out.log_kappa_tau);
  out.log_kappa_b = std::max(0.0, out.log_kappa_b);
  out.log_kappa_l = std::max(0.0, out.log_kappa_l);
  out.spec.N = to_count(out.log_N);
  out.spec.H = to_count(out.log_H);
  out.spec.P = to_count(out.log_P);
  out.spec.coeff_bound = c.I;
  out.spec.clip_a = c.beta_V;

  out.log_terms_tau = log_term_count(out.log_N, d_V);
  out.log_terms_b = log_term_count(out.log_H, n_cU);
  out.log_terms_l = log_term_count(out.log_P, n_cW);
  return out;
}

}  // namespace mnol
