#include "mnol/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "mnol/errors.hpp"
#include "mnol/rng.hpp"

namespace mnol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void scale_add(MnoGrad<double>& vel, double beta, const MnoGrad<double>& g) {
  vel.theta = beta * vel.theta + g.theta;
  auto mix = [beta](std::vector<GradBundle<double>>& v, const std::vector<GradBundle<double>>& d) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] *= beta;
      v[i] += d[i];
    }
  };
  mix(vel.l_nets, g.l_nets);
  mix(vel.b_nets, g.b_nets);
  mix(vel.tau_nets, g.tau_nets);
}

void check_data_shape(const MnoSpec& spec, const HierarchicalDataset& data) {
  data.check_shapes();
  const auto mismatch = [](const char* what, long long want, long long got) {
    throw ConfigError(std::string("model/dataset mismatch: ") + what + " expects " + std::to_string(want) +
                      " inputs, dataset has " + std::to_string(got));
  };
  if (spec.n_cW() != data.alpha_disc[0].size()) mismatch("alpha subnetwork", spec.n_cW(), data.alpha_disc[0].size());
  if (spec.n_cU() != data.u_disc[0][0].size()) mismatch("input subnetwork", spec.n_cU(), data.u_disc[0][0].size());
  if (spec.d_V() != data.x_pts[0][0][0].size()) mismatch("point subnetwork", spec.d_V(), data.x_pts[0][0][0].size());
}

std::string csv_safe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r' || c == '"'; }, ' ');
  return s;
}

}  // namespace

std::string to_string(Optimizer opt) { return opt == Optimizer::kSgd ? "sgd" : "momentum"; }

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "momentum" || name == "sgd_momentum") return Optimizer::kMomentum;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or momentum)");
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (batch_size < 0) throw ConfigError("batch_size must be >= 0");
  if (projection_every < 1) throw ConfigError("projection_every must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
}

double empirical_risk(const MnoParams<double>& params, std::span<const MnoSample> samples) {
  if (samples.empty()) throw DomainError("empirical_risk: no samples");
  const std::vector<double> pred = mno_predict(params, samples);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = pred[i] - samples[i].target;
    sum += r * r;
  }
  return sum / static_cast<double>(samples.size());
}

TrainResult train_erm(const MnoSpec& spec, const HierarchicalDataset& data, const TrainConfig& cfg) {
  Rng rng = make_rng(cfg.seed, Stream::kInit);
  return train_erm(init_mno<double>(spec, rng), data, cfg);
}

TrainResult train_erm(MnoParams<double> init, const HierarchicalDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  init.spec.validate();
  check_data_shape(init.spec, data);

  const std::vector<MnoSample> samples = data.samples();
  const std::size_t n = samples.size();
  const bool full = cfg.batch_size == 0 || static_cast<std::size_t>(cfg.batch_size) >= n;
  const std::size_t batch = full ? n : static_cast<std::size_t>(cfg.batch_size);
  const std::size_t steps_per_epoch = (n + batch - 1) / batch;

  TrainResult result;
  result.params = mno_project(std::move(init));
  auto& params = result.params;
  result.trace.push_back({0, empirical_risk(params, samples)});

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<MnoSample> minibatch;
  std::optional<MnoGrad<double>> velocity;

  for (int s = 0; s < cfg.steps; ++s) {
    const std::size_t pos = static_cast<std::size_t>(s) % steps_per_epoch;
    std::span<const MnoSample> view;
    if (full) {
      view = samples;
    } else {
      if (pos == 0) {
        Rng shuffle = make_rng(cfg.seed, Stream::kBatch, {static_cast<std::uint64_t>(s) / steps_per_epoch});
        std::shuffle(order.begin(), order.end(), shuffle);
      }
      minibatch.clear();
      for (std::size_t k = pos * batch; k < std::min(n, (pos + 1) * batch); ++k) minibatch.push_back(samples[order[k]]);
      view = minibatch;
    }

    MnoGrad<double> g = mno_grad(params, view);
    if (!std::isfinite(g.loss)) throw NumericalError("training diverged at step " + std::to_string(s));
    double lr = cfg.learning_rate;
    if (cfg.cosine_decay) lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * s / cfg.steps));

    if (cfg.optimizer == Optimizer::kMomentum) {
      if (!velocity) velocity = zero_grad(params);
      scale_add(*velocity, cfg.momentum, g);
      add_scaled(params, *velocity, -lr);
    } else {
      add_scaled(params, g, -lr);
    }
    if ((s + 1) % cfg.projection_every == 0) params = mno_project(std::move(params));

    if (pos + 1 == steps_per_epoch) {
      const double risk = empirical_risk(params, samples);
      if (!std::isfinite(risk)) throw NumericalError("training diverged at step " + std::to_string(s + 1));
      result.trace.push_back({s + 1, risk});
    }
  }

  params = mno_project(std::move(params));
  const double final_risk = empirical_risk(params, samples);
  if (result.trace.back().step == cfg.steps)
    result.trace.back().loss = final_risk;
  else
    result.trace.push_back({cfg.steps, final_risk});
  return result;
}

EvalResult eval_generalization(const MnoParams<double>& params, const DataSpec& data, const EvalBudget& budget,
                               std::uint64_t seed, unsigned threads) {
  if (budget.m_alpha < 1 || budget.m_u < 1 || budget.m_x < 1) throw ConfigError("evaluation budgets must be >= 1");
  data.validate();
  const PointList y_grid = data.alpha_grid();
  const PointList c_grid = data.u_grid();
  if (params.spec.n_cW() != static_cast<int>(y_grid.size()) || params.spec.n_cU() != static_cast<int>(c_grid.size()) ||
      params.spec.d_V() != data.d_V())
    throw ConfigError("model input sizes do not match the data discretization grids");

  const int pairs = budget.m_alpha * budget.m_u;
  std::vector<double> err(static_cast<std::size_t>(pairs));
  parallel_for(static_cast<std::size_t>(budget.m_alpha), threads, [&](std::size_t a) {
    const GridFunction alpha = draw_alpha(data, seed, a, Stream::kTest);
    const Eigen::VectorXd ad = discretize(alpha, y_grid);
    for (int i = 0; i < budget.m_u; ++i) {
      const GridFunction u = draw_input(data, seed, a, i, Stream::kTest);
      const Eigen::VectorXd ud = discretize(u, c_grid);
      double sum = 0.0;
      for (int j = 0; j < budget.m_x; ++j) {
        const Eigen::VectorXd x = draw_point(data, seed, a, i, j, Stream::kTest);
        const double truth =
            family_eval(data.family, alpha, u, std::span<const double>(x.data(), x.size()), data.rule);
        const double r = mno_forward(params, ad, ud, x) - truth;
        sum += r * r;
      }
      err[a * budget.m_u + i] = sum / budget.m_x;
    }
  });

  EvalResult out;
  out.pairs = pairs;
  out.mean = std::accumulate(err.begin(), err.end(), 0.0) / pairs;
  if (pairs > 1) {
    double ss = 0.0;
    for (double e : err) ss += (e - out.mean) * (e - out.mean);
    out.stderr_ = std::sqrt(ss / (pairs - 1) / pairs);
  }
  return out;
}

void SweepConfig::validate() const {
  data.validate();
  model.validate();
  train.validate();
  if (n_alpha_grid.empty()) throw ConfigError("sweep: n_alpha grid is empty");
  for (int n : n_alpha_grid)
    if (n < 1) throw ConfigError("sweep: n_alpha values must be >= 1");
  if (n_u < 1 || n_x < 1) throw ConfigError("sweep: n_u and n_x must be >= 1");
  if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
  if (budget.m_alpha < 1 || budget.m_u < 1 || budget.m_x < 1) throw ConfigError("sweep: evaluation budgets must be >= 1");
}

std::uint64_t run_seed(std::uint64_t master, int n_alpha, int trial) {
  return stream_seed(master, Stream::kRun, {static_cast<std::uint64_t>(n_alpha), static_cast<std::uint64_t>(trial)});
}

std::vector<RunRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<RunRecord> records(cfg.n_alpha_grid.size() * trials);

  parallel_for(records.size(), cfg.threads, [&](std::size_t r) {
    RunRecord& rec = records[r];
    rec.n_alpha = cfg.n_alpha_grid[r / trials];
    rec.trial = static_cast<int>(r % trials);
    rec.seed = run_seed(cfg.master_seed, rec.n_alpha, rec.trial);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const HierarchicalDataset ds = generate_dataset(cfg.data, rec.n_alpha, cfg.n_u, cfg.n_x, rec.seed, 1);
      TrainConfig tc = cfg.train;
      tc.seed = stream_seed(rec.seed, Stream::kInit);
      TrainResult tr = train_erm(cfg.model, ds, tc);
      const EvalResult ev = eval_generalization(tr.params, cfg.data, cfg.budget, stream_seed(rec.seed, Stream::kTest), 1);
      rec.train_loss = tr.final_loss();
      rec.test_error = ev.mean;
      rec.test_stderr = ev.stderr_;
      rec.trace = std::move(tr.trace);
      rec.params = std::move(tr.params);
    } catch (const std::exception& e) {
      rec.status = csv_safe(std::string("error: ") + e.what());
      rec.train_loss = rec.test_error = rec.test_stderr = kNaN;
    }
    if (cfg.record_timing)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  return records;
}

void write_sweep_csv(std::ostream& os, std::span<const RunRecord> records) {
  os << "n_alpha,trial,seed,train_loss,test_error,wall_ms,status\n";
  for (const auto& r : records)
    os << r.n_alpha << ',' << r.trial << ',' << r.seed << ',' << fmt(r.train_loss) << ',' << fmt(r.test_error) << ','
       << fmt(r.wall_ms) << ',' << r.status << '\n';
}

void write_trace_csv(std::ostream& os, std::span<const TraceEntry> trace) {
  os << "step,loss\n";
  for (const auto& t : trace) os << t.step << ',' << fmt(t.loss) << '\n';
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<ReportEntry> summarize_sweep(std::span<const RunRecord> records, const BoundConstants& constants) {
  std::vector<ReportEntry> out;
  std::vector<std::vector<double>> errors;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ReportEntry& e) { return e.n_alpha == r.n_alpha; });
    if (it == out.end()) {
      out.push_back({});
      out.back().n_alpha = r.n_alpha;
      errors.emplace_back();
      it = out.end() - 1;
    }
    if (r.status == "ok" && std::isfinite(r.test_error)) errors[static_cast<std::size_t>(it - out.begin())].push_back(r.test_error);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& e = out[k];
    e.runs_ok = static_cast<int>(errors[k].size());
    e.median = quantile(errors[k], 0.5);
    e.q1 = quantile(errors[k], 0.25);
    e.q3 = quantile(errors[k], 0.75);
    try {
      e.rate = rate_schedule(e.n_alpha, constants.d_W, constants.d_U, constants.d_V, constants.beta_V);
    } catch (const DomainError&) {
      e.rate.reset();
    }
  }
  return out;
}

}  // namespace mnol
