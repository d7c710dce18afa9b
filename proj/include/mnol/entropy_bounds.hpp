#pragma once

#include <optional>

#include "mnol/bound_constants.hpp"
#include "mnol/mno.hpp"
#include "mnol/relu_net.hpp"

namespace mnol {

/// A nonnegative real held as its natural log. The quantities handled here
/// (covering numbers of theory-mode classes) overflow any fixed-width float.
class LogReal {
 public:
  LogReal() = default;
  static LogReal zero() { return LogReal(); }
  static LogReal from_log(double log_value) { return LogReal(log_value, true); }
  static LogReal from_value(double value);

  bool is_zero() const { return !positive_; }
  /// Natural log; -inf for zero.
  double log() const;
  /// exp(log()), possibly +inf.
  double value() const;

  LogReal operator*(const LogReal& other) const;
  LogReal operator+(const LogReal& other) const;
  /// x^exponent for a finite real exponent.
  LogReal pow(double exponent) const;

 private:
  LogReal(double log_value, bool positive) : log_value_(log_value), positive_(positive) {}
  double log_value_ = 0.0;
  bool positive_ = false;
};

/// A logged upper bound, flagged when a floor had to be dropped because its
/// argument exceeded the exactly representable integer range.
struct LogBound {
  LogReal value;
  bool floor_relaxed = false;
};

/// Network class with depth, width and sparsity as reals and kappa in both
/// linear (possibly +inf) and log form.
struct LogNetClass {
  double depth = 1.0;
  double width = 1.0;
  double sparsity = 1.0;
  double kappa = 1.0;
  double log_kappa = 0.0;
  double output_bound = 1.0;

  static LogNetClass from(const NetClassSpec& spec);
};

/// Clipped product class in log form: log of the term counts P, H, N (as used
/// in the sum, e.g. P^n_cW in theory mode) and the three subnetwork classes.
struct LogMnoClass {
  double log_P = 0.0;
  double log_H = 0.0;
  double log_N = 0.0;
  LogNetClass l;    ///< F_3, alpha networks
  LogNetClass b;    ///< F_2, input networks
  LogNetClass tau;  ///< F_1, query networks
  double I = 1.0;

  static LogMnoClass from(const MnoSpec& spec);
  static LogMnoClass from(const Prescription& prescription);
};

/// Sup-norm radii of the three network inputs: |x| <= gamma_V, |u| <= beta_U,
/// |alpha| <= beta_W.
struct InputNorms {
  double gamma_V = 1.0;
  double beta_U = 1.0;
  double beta_W = 1.0;
};

/// ln of binom(L(p^2+p), K) (floor(L kappa^L (p+1)^(L-1)(p|x|+1)/eta) + 1)^K.
/// K is capped at L(p^2+p).
LogBound log_net_covering(const NetClassSpec& spec, double x_inf_norm, double eta);
LogBound log_net_covering(const LogNetClass& cls, double x_inf_norm, double eta);

/// ln of F(L, p, K, kappa, h) = binom(L(p^2+p), K) (floor(2 kappa / h) + 1)^K.
LogBound log_F(double L, double p, double K, double kappa, double h);
/// Variant for a kappa that may only be known in log form; h given as log.
LogBound log_F(const LogNetClass& cls, double log_h, double h);

/// T = PHN [I R2 R3 L1 k1^(L1-1)(p1+1)^(L1-1)(p1 gV+1) + (b term) + (l term) + R1 R2 R3].
LogReal covering_T(const MnoSpec& spec, const InputNorms& norms);
LogReal covering_T(const LogMnoClass& cls, const InputNorms& norms);

struct MnoCovering {
  LogBound log_N;            ///< ln N(eta)
  double log_log_N = 0.0;    ///< ln ln N(eta), finite even when ln N overflows
  LogReal T;
  double log_h = 0.0;
  double log_coeff_factor = 0.0;  ///< ln(floor(2I/h) + 1)
  LogBound log_F_l, log_F_b, log_F_tau;
};

/// [(floor(2I/h)+1) F3 F2 F1]^(PHN) with h = 2 eta / T.
MnoCovering log_mno_covering(const MnoSpec& spec, const InputNorms& norms, double eta);
MnoCovering log_mno_covering(const LogMnoClass& cls, const InputNorms& norms, double eta);

struct EntropyEps {
  double delta1 = 0.0;
  double delta2 = 0.0;
  /// ln(eps^(-delta1 eps^(-delta2 eps^(-d_W))) (1 + ln(1/eta))).
  double log_bound = 0.0;
  /// Set when 1 + ln(1/eta) <= 0 and was replaced by the smallest normal double.
  bool eta_term_floored = false;
};

EntropyEps entropy_eps(double eps, double eta, int d_W, int d_U, int d_V);

struct BoundTerms {
  double approximation = 0.0;  ///< 4 eps^2
  double covering_scale = 0.0; ///< eta (8 sigma + 6)
  double noise_linear = 0.0;   ///< 8 sigma eta / sqrt(n) sqrt(logN + ln 2)
  double noise_quadratic = 0.0;///< 16 sigma^2 / n (logN + ln 2)
  double operator_sampling = 0.0; ///< 112 beta_V^2 / (3 n_alpha) logN(eta / 4 beta_V)
  double total = 0.0;
};

/// Right-hand side of the expected generalization error bound.
BoundTerms generalization_bound_rhs(double eps, double eta, long long n_alpha, long long n_u, long long n_x,
                                    double sigma, double beta_V, double logN_eta, double logN_eta_scaled);

struct RateSchedule {
  double eps = 0.0;
  double eta = 0.0;
  double rate = 0.0;  ///< 4 eps^2
  double delta2 = 0.0;
};

/// eps = ((d_W / 2 delta2) lnln n / lnlnln n)^(-1/d_W), eta = 4 beta_V / n.
/// Requires lnlnln n > 0, i.e. n >= 16.
RateSchedule rate_schedule(long long n_alpha, int d_W, int d_U, int d_V, double beta_V);

/// ln of eps^(-gamma1 eps^(-gamma2 eps^(-d_W))), eps in (0, 1).
double param_count_scaling(double eps, double gamma1, double gamma2, int d_W);

/// Every scalar the `bounds` report needs. With `model` unset the class is
/// prescribed from `eps` (theory mode).
struct BoundInputs {
  BoundConstants constants;
  double eps = 0.5;
  double eta = 0.01;
  long long n_alpha = 100;
  long long n_u = 1;
  long long n_x = 1;
  PrescribeMode mode = PrescribeMode::kHalved;
  std::optional<MnoSpec> model;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

struct BoundReport {
  BoundInputs inputs;
  std::optional<Prescription> prescription;
  EntropyEps entropy;
  MnoCovering at_eta;
  MnoCovering at_eta_scaled;  ///< eta / (4 beta_V)
  BoundTerms terms;
  std::optional<double> log_param_count;
  std::optional<RateSchedule> rate;
};

BoundReport compute_bound_report(const BoundInputs& inputs);

}  // namespace mnol
