#include "mnol/entropy_bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mnol {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kExactIntegerLimit = 9007199254740992.0;  // 2^53
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// ln(floor(x) + 1) when x is exactly representable, else the relaxation
// ln(x + 1) >= ln(floor(x) + 1). `linear` may be NaN/inf when unknown.
std::pair<double, bool> log_floor_plus_one(double linear, double log_arg) {
  if (std::isfinite(linear) && linear >= 0.0 && linear < kExactIntegerLimit)
    return {std::log(std::floor(linear) + 1.0), false};
  return {log_add_exp(log_arg, 0.0), true};
}

double log_binomial(double n, double k) {
  k = std::min(k, n);
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// A positive quantity tracked both as a double (possibly +inf) and as a log.
struct Dual {
  double lin;
  double log;
};

Dual network_term(const LogNetClass& cls, double norm) {
  // L kappa^(L-1) (p+1)^(L-1) (p norm + 1)
  const double L = cls.depth, p = cls.width;
  const double log_v = std::log(L) + (L - 1.0) * (cls.log_kappa + std::log(p + 1.0)) + std::log(p * norm + 1.0);
  double lin = kInf;
  if (std::isfinite(cls.kappa))
    lin = L * std::pow(cls.kappa, L - 1.0) * std::pow(p + 1.0, L - 1.0) * (p * norm + 1.0);
  return {lin, log_v};
}

Dual covering_T_dual(const LogMnoClass& cls, const InputNorms& norms) {
  const Dual tau = network_term(cls.tau, norms.gamma_V);
  const Dual b = network_term(cls.b, norms.beta_U);
  const Dual l = network_term(cls.l, norms.beta_W);
  const double R1 = cls.tau.output_bound, R2 = cls.b.output_bound, R3 = cls.l.output_bound;
  const double I = cls.I;

  std::array<double, 4> logs = {std::log(I * R2 * R3) + tau.log, std::log(I * R1 * R3) + b.log,
                                std::log(I * R1 * R2) + l.log, std::log(R1 * R2 * R3)};
  double log_bracket = -kInf;
  for (double v : logs) log_bracket = log_add_exp(log_bracket, v);

  const double log_terms = cls.log_P + cls.log_H + cls.log_N;
  const double terms = std::exp(log_terms);
  double lin = kInf;
  if (std::isfinite(terms) && std::isfinite(tau.lin) && std::isfinite(b.lin) && std::isfinite(l.lin)) {
    // Integral counts are recovered exactly so T = 7 stays 7.
    const double rounded = std::round(terms);
    const double t = std::abs(rounded - terms) < 1e-9 * terms ? rounded : terms;
    lin = t * (I * R2 * R3 * tau.lin + I * R1 * R3 * b.lin + I * R1 * R2 * l.lin + R1 * R2 * R3);
  }
  return {lin, log_terms + log_bracket};
}

void check_kappa(const LogNetClass& cls) {
  if (!(cls.log_kappa >= 0.0)) throw DomainError("covering bounds require kappa >= 1");
}

}  // namespace

LogReal LogReal::from_value(double value) {
  if (!(value >= 0.0)) throw DomainError("LogReal: negative value");
  return value == 0.0 ? LogReal() : LogReal(std::log(value), true);
}

double LogReal::log() const { return positive_ ? log_value_ : -kInf; }
double LogReal::value() const { return positive_ ? std::exp(log_value_) : 0.0; }

LogReal LogReal::operator*(const LogReal& other) const {
  if (!positive_ || !other.positive_) return LogReal();
  return LogReal(log_value_ + other.log_value_, true);
}

LogReal LogReal::operator+(const LogReal& other) const {
  if (!positive_) return other;
  if (!other.positive_) return *this;
  return LogReal(log_add_exp(log_value_, other.log_value_), true);
}

LogReal LogReal::pow(double exponent) const {
  if (!positive_) return exponent == 0.0 ? LogReal(0.0, true) : LogReal();
  return LogReal(log_value_ * exponent, true);
}

LogNetClass LogNetClass::from(const NetClassSpec& spec) {
  LogNetClass c;
  c.depth = spec.depth;
  c.width = spec.width;
  c.sparsity = static_cast<double>(spec.sparsity);
  c.kappa = spec.kappa;
  c.log_kappa = std::log(spec.kappa);
  c.output_bound = spec.output_bound;
  return c;
}

LogMnoClass LogMnoClass::from(const MnoSpec& spec) {
  LogMnoClass c;
  c.log_P = std::log(static_cast<double>(spec.P));
  c.log_H = std::log(static_cast<double>(spec.H));
  c.log_N = std::log(static_cast<double>(spec.N));
  c.l = LogNetClass::from(spec.spec_l);
  c.b = LogNetClass::from(spec.spec_b);
  c.tau = LogNetClass::from(spec.spec_tau);
  c.I = spec.coeff_bound;
  return c;
}

LogMnoClass LogMnoClass::from(const Prescription& pr) {
  LogMnoClass c = from(pr.spec);
  c.log_P = pr.log_terms_l;
  c.log_H = pr.log_terms_b;
  c.log_N = pr.log_terms_tau;
  c.l.log_kappa = pr.log_kappa_l;
  c.b.log_kappa = pr.log_kappa_b;
  c.tau.log_kappa = pr.log_kappa_tau;
  c.l.kappa = std::exp(pr.log_kappa_l);
  c.b.kappa = std::exp(pr.log_kappa_b);
  c.tau.kappa = std::exp(pr.log_kappa_tau);
  return c;
}

LogBound log_net_covering(const NetClassSpec& spec, double x_inf_norm, double eta) {
  if (!(spec.kappa >= 1.0)) throw DomainError("log_net_covering requires kappa >= 1");
  return log_net_covering(LogNetClass::from(spec), x_inf_norm, eta);
}

LogBound log_net_covering(const LogNetClass& cls, double x_inf_norm, double eta) {
  if (!(eta > 0.0)) throw DomainError("log_net_covering: eta must be positive");
  check_kappa(cls);
  const double L = cls.depth, p = cls.width;
  const double n = L * (p * p + p);
  const double K = std::min(cls.sparsity, n);
  // L kappa^L (p+1)^(L-1) (p|x|+1) / eta
  const double log_arg = std::log(L) + L * cls.log_kappa + (L - 1.0) * std::log(p + 1.0) +
                         std::log(p * x_inf_norm + 1.0) - std::log(eta);
  double linear = kInf;
  if (std::isfinite(cls.kappa))
    linear = L * std::pow(cls.kappa, L) * std::pow(p + 1.0, L - 1.0) * (p * x_inf_norm + 1.0) / eta;
  const auto [log_factor, relaxed] = log_floor_plus_one(linear, log_arg);
  return {LogReal::from_log(log_binomial(n, K) + K * log_factor), relaxed};
}

LogBound log_F(double L, double p, double K, double kappa, double h) {
  if (!(h > 0.0)) throw DomainError("log_F: h must be positive");
  if (!(kappa >= 1.0)) throw DomainError("log_F requires kappa >= 1");
  LogNetClass cls;
  cls.depth = L;
  cls.width = p;
  cls.sparsity = K;
  cls.kappa = kappa;
  cls.log_kappa = std::log(kappa);
  return log_F(cls, std::log(h), h);
}

LogBound log_F(const LogNetClass& cls, double log_h, double h) {
  check_kappa(cls);
  const double n = cls.depth * (cls.width * cls.width + cls.width);
  const double K = std::min(cls.sparsity, n);
  const double log_arg = kLn2 + cls.log_kappa - log_h;
  const double linear = (std::isfinite(cls.kappa) && h > 0.0) ? 2.0 * cls.kappa / h : kInf;
  const auto [log_factor, relaxed] = log_floor_plus_one(linear, log_arg);
  return {LogReal::from_log(log_binomial(n, K) + K * log_factor), relaxed};
}

LogReal covering_T(const MnoSpec& spec, const InputNorms& norms) {
  return covering_T(LogMnoClass::from(spec), norms);
}

LogReal covering_T(const LogMnoClass& cls, const InputNorms& norms) {
  check_kappa(cls.l);
  check_kappa(cls.b);
  check_kappa(cls.tau);
  const Dual t = covering_T_dual(cls, norms);
  return std::isfinite(t.lin) ? LogReal::from_value(t.lin) : LogReal::from_log(t.log);
}

MnoCovering log_mno_covering(const MnoSpec& spec, const InputNorms& norms, double eta) {
  return log_mno_covering(LogMnoClass::from(spec), norms, eta);
}

MnoCovering log_mno_covering(const LogMnoClass& cls, const InputNorms& norms, double eta) {
  if (!(eta > 0.0)) throw DomainError("log_mno_covering: eta must be positive");
  check_kappa(cls.l);
  check_kappa(cls.b);
  check_kappa(cls.tau);

  MnoCovering out;
  const Dual T = covering_T_dual(cls, norms);
  out.T = std::isfinite(T.lin) ? LogReal::from_value(T.lin) : LogReal::from_log(T.log);
  // h = 2 eta / T
  const double h = std::isfinite(T.lin) ? 2.0 * eta / T.lin : 0.0;
  out.log_h = kLn2 + std::log(eta) - T.log;

  const double coeff_linear = h > 0.0 ? 2.0 * cls.I / h : kInf;
  const auto [log_coeff, coeff_relaxed] = log_floor_plus_one(coeff_linear, kLn2 + std::log(cls.I) - out.log_h);
  out.log_coeff_factor = log_coeff;
  out.log_F_l = log_F(cls.l, out.log_h, h);
  out.log_F_b = log_F(cls.b, out.log_h, h);
  out.log_F_tau = log_F(cls.tau, out.log_h, h);

  const double bracket = log_coeff + out.log_F_l.value.log() + out.log_F_b.value.log() + out.log_F_tau.value.log();
  const double log_terms = cls.log_P + cls.log_H + cls.log_N;
  const double terms = std::exp(log_terms);
  double log_n = terms * bracket;
  if (std::isfinite(terms)) {
    const double rounded = std::round(terms);
    if (std::abs(rounded - terms) < 1e-9 * terms) log_n = rounded * bracket;
  }
  out.log_N.value = LogReal::from_log(log_n);
  out.log_N.floor_relaxed =
      coeff_relaxed || out.log_F_l.floor_relaxed || out.log_F_b.floor_relaxed || out.log_F_tau.floor_relaxed;
  out.log_log_N = bracket > 0.0 ? log_terms + std::log(bracket) : -kInf;
  return out;
}

EntropyEps entropy_eps(double eps, double eta, int d_W, int d_U, int d_V) {
  if (!(eps > 0.0)) throw DomainError("entropy_eps: eps must be positive");
  if (!(eta > 0.0)) throw DomainError("entropy_eps: eta must be positive");
  if (d_W <= 0 || d_U <= 0 || d_V <= 0) throw DomainError("entropy_eps: dimensions must be positive");
  EntropyEps out;
  const long double dw = d_W, du = d_U, dv = d_V;
  const long double delta2 = du * (1.0L + dv) * (1.0L + dw / 2.0L);
  const long double delta1 = delta2 + dw * (dv + 1.0L) / 2.0L + (dv + 1.0L);
  out.delta1 = static_cast<double>(delta1);
  out.delta2 = static_cast<double>(delta2);

  const long double ln_eps = std::log(static_cast<long double>(eps));
  // eps^(-delta2 eps^(-d_W))
  const long double inner = delta2 * std::exp(-dw * ln_eps);
  const long double nested = std::exp(-inner * ln_eps);
  long double eta_term = 1.0L - std::log(static_cast<long double>(eta));
  if (!(eta_term > 0.0L)) {
    eta_term = std::numeric_limits<double>::min();
    out.eta_term_floored = true;
  }
  out.log_bound = static_cast<double>(-delta1 * nested * ln_eps + std::log(eta_term));
  return out;
}

BoundTerms generalization_bound_rhs(double eps, double eta, long long n_alpha, long long n_u, long long n_x,
                                    double sigma, double beta_V, double logN_eta, double logN_eta_scaled) {
  if (n_alpha < 1 || n_u < 1 || n_x < 1) throw DomainError("generalization bound: budgets must be >= 1");
  if (!(eps > 0.0) || !(eta > 0.0)) throw DomainError("generalization bound: eps and eta must be positive");
  if (!(sigma >= 0.0)) throw DomainError("generalization bound: sigma must be nonnegative");
  if (!(beta_V > 0.0)) throw DomainError("generalization bound: beta_V must be positive");
  if (logN_eta < 0.0 || logN_eta_scaled < 0.0 || std::isnan(logN_eta) || std::isnan(logN_eta_scaled))
    throw DomainError("generalization bound: log covering numbers must be nonnegative");

  const double n = static_cast<double>(n_alpha) * static_cast<double>(n_u) * static_cast<double>(n_x);
  BoundTerms t;
  t.approximation = 4.0 * eps * eps;
  t.covering_scale = eta * (8.0 * sigma + 6.0);
  // 0 * inf stays 0 for the noiseless case
  t.noise_linear = sigma == 0.0 ? 0.0 : 8.0 * sigma * eta / std::sqrt(n) * std::sqrt(logN_eta + kLn2);
  t.noise_quadratic = sigma == 0.0 ? 0.0 : 16.0 * sigma * sigma / n * (logN_eta + kLn2);
  t.operator_sampling = 112.0 * beta_V * beta_V / (3.0 * static_cast<double>(n_alpha)) * logN_eta_scaled;
  t.total = t.approximation + t.covering_scale + t.noise_linear + t.noise_quadratic + t.operator_sampling;
  return t;
}

RateSchedule rate_schedule(long long n_alpha, int d_W, int d_U, int d_V, double beta_V) {
  if (d_W <= 0 || d_U <= 0 || d_V <= 0) throw DomainError("rate_schedule: dimensions must be positive");
  if (!(beta_V > 0.0)) throw DomainError("rate_schedule: beta_V must be positive");
  if (n_alpha < 16)
    throw DomainError("rate_schedule: n_alpha must exceed e^e ~ 15.15 (lnlnln n_alpha > 0), got " +
                      std::to_string(n_alpha));
  const long double n = static_cast<long double>(n_alpha);
  const long double ll = std::log(std::log(n));
  const long double lll = std::log(ll);
  RateSchedule r;
  const long double dw = d_W;
  const long double delta2 = static_cast<long double>(d_U) * (1.0L + d_V) * (1.0L + dw / 2.0L);
  r.delta2 = static_cast<double>(delta2);
  r.eps = static_cast<double>(std::pow(dw / (2.0L * delta2) * ll / lll, -1.0L / dw));
  r.eta = 4.0 * beta_V / static_cast<double>(n_alpha);
  r.rate = 4.0 * r.eps * r.eps;
  return r;
}

double param_count_scaling(double eps, double gamma1, double gamma2, int d_W) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("param_count_scaling: eps must lie in (0, 1)");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw DomainError("param_count_scaling: exponents must be positive");
  const long double ln_eps = std::log(static_cast<long double>(eps));
  const long double inner = gamma2 * std::exp(-static_cast<long double>(d_W) * ln_eps);
  return static_cast<double>(-static_cast<long double>(gamma1) * std::exp(-inner * ln_eps) * ln_eps);
}

BoundReport compute_bound_report(const BoundInputs& in) {
  BoundReport report;
  report.inputs = in;
  const BoundConstants& c = in.constants;

  LogMnoClass cls;
  if (in.model) {
    in.model->validate();
    cls = LogMnoClass::from(*in.model);
  } else {
    report.prescription = prescribe_architecture(in.eps, c.d_V, c.n_cW, c.n_cU, c, in.mode);
    cls = LogMnoClass::from(*report.prescription);
  }
  const InputNorms norms{c.gamma_V, c.beta_U, c.beta_W};
  report.at_eta = log_mno_covering(cls, norms, in.eta);
  report.at_eta_scaled = log_mno_covering(cls, norms, in.eta / (4.0 * c.beta_V));
  report.entropy = entropy_eps(in.eps, in.eta, c.d_W, c.d_U, c.d_V);
  report.terms = generalization_bound_rhs(in.eps, in.eta, in.n_alpha, in.n_u, in.n_x, c.sigma, c.beta_V,
                                          report.at_eta.log_N.value.log(), report.at_eta_scaled.log_N.value.log());
  if (in.eps > 0.0 && in.eps < 1.0) report.log_param_count = param_count_scaling(in.eps, in.gamma1, in.gamma2, c.d_W);
  if (in.n_alpha >= 16) report.rate = rate_schedule(in.n_alpha, c.d_W, c.d_U, c.d_V, c.beta_V);
  return report;
}

}  // namespace mnol
