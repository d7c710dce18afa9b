#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnol/entropy_bounds.hpp"
#include "mnol/mno.hpp"
#include "mnol/sampling.hpp"

namespace mnol {

enum class Optimizer { kSgd, kMomentum };

std::string to_string(Optimizer opt);
Optimizer parse_optimizer(const std::string& name);

struct TrainConfig {
  double learning_rate = 0.2;
  int steps = 2000;
  int batch_size = 0;  ///< 0 trains on the full dataset every step
  int projection_every = 1;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kMomentum;
  double momentum = 0.9;
  bool cosine_decay = true;  ///< anneal the step size to zero over the run

  void validate() const;
};

struct TraceEntry {
  int step = 0;
  double loss = 0.0;
};

struct TrainResult {
  MnoParams<double> params;
  /// Full empirical risk at step 0, after every epoch, and after the final
  /// projection (last entry).
  std::vector<TraceEntry> trace;
  double final_loss() const { return trace.back().loss; }
};

/// Mean squared error of the clipped model over `samples`.
double empirical_risk(const MnoParams<double>& params, std::span<const MnoSample> samples);

/// Projected (stochastic) gradient descent on the empirical risk, starting
/// from a seeded initialization.
TrainResult train_erm(const MnoSpec& spec, const HierarchicalDataset& data, const TrainConfig& cfg);
/// Same, starting from given parameters.
TrainResult train_erm(MnoParams<double> init, const HierarchicalDataset& data, const TrainConfig& cfg);

struct EvalBudget {
  int m_alpha = 64;
  int m_u = 8;
  int m_x = 64;
};

struct EvalResult {
  double mean = 0.0;
  double stderr_ = 0.0;  ///< standard error over the m_alpha·m_u pair averages
  int pairs = 0;
};

/// Monte Carlo estimate of E‖Ĝ[ᾱ][ū] − G[α][u]‖² from fresh draws on the test
/// streams of `seed`, using noiseless ground truth.
EvalResult eval_generalization(const MnoParams<double>& params, const DataSpec& data, const EvalBudget& budget,
                               std::uint64_t seed, unsigned threads = 1);

struct SweepConfig {
  DataSpec data;
  MnoSpec model;
  TrainConfig train;
  EvalBudget budget;
  std::vector<int> n_alpha_grid;
  int n_u = 4;
  int n_x = 16;
  int trials = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
  bool record_timing = true;  ///< write 0 to wall_ms when off, making the CSV reproducible bytewise

  void validate() const;
};

struct RunRecord {
  int n_alpha = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double train_loss = 0.0;
  double test_error = 0.0;
  double test_stderr = 0.0;
  double wall_ms = 0.0;
  std::string status = "ok";
  std::vector<TraceEntry> trace;
  std::optional<MnoParams<double>> params;
};

/// Seed of one sweep run, derived from (master, n_alpha, trial).
std::uint64_t run_seed(std::uint64_t master, int n_alpha, int trial);

/// Trains and evaluates one model per (n_alpha, trial). Failed runs are kept
/// with status "error: ..." and NaN metrics. Records are ordered by
/// (grid position, trial).
std::vector<RunRecord> run_sweep(const SweepConfig& cfg);

/// Columns n_alpha, trial, seed, train_loss, test_error, wall_ms, status.
void write_sweep_csv(std::ostream& os, std::span<const RunRecord> records);
void write_trace_csv(std::ostream& os, std::span<const TraceEntry> trace);

struct ReportEntry {
  int n_alpha = 0;
  int runs_ok = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
  std::optional<RateSchedule> rate;  ///< unset where the schedule is undefined (n_alpha < 16)
};

/// Type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double q);

/// Per-n_alpha median and IQR of the test error next to the theoretical
/// rate schedule. Grid order follows first appearance in `records`.
std::vector<ReportEntry> summarize_sweep(std::span<const RunRecord> records, const BoundConstants& constants);

}  // namespace mnol
