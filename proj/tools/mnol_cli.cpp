// Command-line front end: prescribe, gen-data, train, eval, sweep, bounds, oracle.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mnol/config.hpp"
#include "mnol/errors.hpp"
#include "mnol/harness.hpp"
#include "mnol/json_io.hpp"
#include "mnol/oracle.hpp"
#include "mnol/sampling.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  bool dump_config = false;
  std::string output;
};

void add_common(CLI::App* cmd, CommonOptions& opts, const std::string& output_help) {
  cmd->add_option("-c,--config", opts.config_path, "INI configuration file");
  cmd->add_option("--set", opts.overrides, "Override a value, e.g. --set train.steps=500");
  cmd->add_flag("--dump-config", opts.dump_config, "Print the resolved configuration and exit");
  if (!output_help.empty()) cmd->add_option("-o,--output", opts.output, output_help);
}

mnol::Config load(const CommonOptions& opts) {
  mnol::Config cfg = opts.config_path.empty() ? mnol::Config() : mnol::Config::from_file(opts.config_path);
  for (const auto& o : opts.overrides) cfg.apply_override(o);
  return cfg;
}

/// Output path: --output wins over the [io] key; empty means stdout.
std::string output_path(const mnol::Config& cfg, const CommonOptions& opts, const std::string& key) {
  const std::string from_cfg = cfg.get_string("io", key, "");
  return opts.output.empty() ? from_cfg : opts.output;
}

void emit_json(const std::string& path, const mnol::Json& j) {
  if (path.empty())
    std::cout << j.dump(2) << '\n';
  else
    mnol::write_json_file(path, j);
}

std::string require_path(const mnol::Config& cfg, const std::string& key) {
  const std::string p = cfg.get_string("io", key, "");
  if (p.empty()) throw mnol::ConfigError("[io] " + key + " must name a file");
  return p;
}

bool dumped(const mnol::Config& cfg, const CommonOptions& opts) {
  if (opts.dump_config) std::cout << cfg.dump();
  return opts.dump_config;
}

int cmd_prescribe(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const mnol::BoundConstants c = mnol::bound_constants_from(cfg);
  const double eps = cfg.get_double("bounds", "eps", 0.5);
  const auto mode = mnol::parse_prescribe_mode(cfg.get_string("bounds", "mode", "halved"));
  const std::string out = output_path(cfg, opts, "output");
  if (dumped(cfg, opts)) return kExitOk;
  emit_json(out, mnol::to_json(mnol::prescribe_architecture(eps, c.d_V, c.n_cW, c.n_cU, c, mode)));
  return kExitOk;
}

int cmd_gen_data(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const mnol::DataSpec spec = mnol::data_spec_from(cfg);
  const int n_alpha = cfg.get_int("data", "n_alpha", 16);
  const int n_u = cfg.get_int("data", "n_u", 4);
  const int n_x = cfg.get_int("data", "n_x", 16);
  const auto seed = cfg.get_u64("data", "seed", 0);
  const auto threads = static_cast<unsigned>(cfg.get_int("run", "threads", 0));
  const std::string out = output_path(cfg, opts, "dataset");
  if (dumped(cfg, opts)) return kExitOk;
  emit_json(out, mnol::to_json(mnol::generate_dataset(spec, n_alpha, n_u, n_x, seed, threads)));
  return kExitOk;
}

int cmd_train(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const std::string data_path = require_path(cfg, "dataset");
  const std::string model_out = output_path(cfg, opts, "model");
  const std::string loss_out = cfg.get_string("io", "loss_csv", "");
  const mnol::TrainConfig tc = mnol::train_config_from(cfg);
  if (opts.dump_config) {
    // Model sizing depends on the dataset's grids; resolve against the config's own data spec.
    mnol::model_spec_from(cfg, mnol::data_spec_from(cfg));
    dumped(cfg, opts);
    return kExitOk;
  }
  const mnol::HierarchicalDataset data = mnol::dataset_from_json(mnol::read_json_file(data_path));
  const mnol::MnoSpec spec = mnol::model_spec_from(cfg, data.spec);
  const mnol::TrainResult result = mnol::train_erm(spec, data, tc);
  emit_json(model_out, mnol::to_json(result.params));
  if (!loss_out.empty()) {
    std::ofstream f(loss_out);
    if (!f) throw mnol::ConfigError("cannot write " + loss_out);
    mnol::write_trace_csv(f, result.trace);
  }
  if (!model_out.empty()) std::cerr << "final empirical risk " << result.final_loss() << '\n';
  return kExitOk;
}

int cmd_eval(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const std::string model_path = require_path(cfg, "model");
  const mnol::DataSpec spec = mnol::data_spec_from(cfg);
  const mnol::EvalBudget budget = mnol::eval_budget_from(cfg);
  const auto seed = cfg.get_u64("eval", "seed", 1);
  const auto threads = static_cast<unsigned>(cfg.get_int("run", "threads", 0));
  const std::string out = output_path(cfg, opts, "output");
  if (dumped(cfg, opts)) return kExitOk;
  const auto params = mnol::mno_params_from_json(mnol::read_json_file(model_path));
  emit_json(out, mnol::to_json(mnol::eval_generalization(params, spec, budget, seed, threads)));
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const mnol::SweepConfig sc = mnol::sweep_config_from(cfg);
  const mnol::BoundConstants constants = mnol::bound_constants_from(cfg);
  const std::string csv_out = output_path(cfg, opts, "output");
  const std::string report_out = cfg.get_string("io", "report", "");
  if (dumped(cfg, opts)) return kExitOk;
  const auto records = mnol::run_sweep(sc);
  if (csv_out.empty()) {
    mnol::write_sweep_csv(std::cout, records);
  } else {
    std::ofstream f(csv_out);
    if (!f) throw mnol::ConfigError("cannot write " + csv_out);
    mnol::write_sweep_csv(f, records);
  }
  if (!report_out.empty())
    mnol::write_json_file(report_out, mnol::sweep_report_json(mnol::summarize_sweep(records, constants), constants));
  return kExitOk;
}

int cmd_bounds(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const mnol::BoundInputs inputs = mnol::bound_inputs_from(cfg);
  const std::string out = output_path(cfg, opts, "output");
  if (dumped(cfg, opts)) return kExitOk;
  emit_json(out, mnol::to_json(mnol::compute_bound_report(inputs)));
  return kExitOk;
}

int cmd_oracle(const CommonOptions& opts) {
  const mnol::Config cfg = load(opts);
  const std::string which = cfg.get_string("oracle", "check", "all");
  const int grid_n = cfg.get_int("oracle", "grid_n", 400);
  const std::string out = output_path(cfg, opts, "output");
  if (dumped(cfg, opts)) return kExitOk;
  mnol::Json arr = mnol::Json::array();
  bool ok = true;
  for (const auto& c : mnol::run_oracles(which, grid_n)) {
    arr.push_back({{"check", c.name}, {"error", c.error}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    ok = ok && c.pass();
  }
  emit_json(out, arr);
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple neural operator learning toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  struct Entry {
    const char* name;
    const char* help;
    const char* output_help;
    int (*run)(const CommonOptions&);
  };
  const Entry entries[] = {
      {"prescribe", "Theory-mode architecture sizes as JSON", "JSON output file", cmd_prescribe},
      {"gen-data", "Generate a hierarchical dataset (JSON)", "Dataset output file", cmd_gen_data},
      {"train", "Train a clipped model on a dataset", "Model output file", cmd_train},
      {"eval", "Monte Carlo generalization error of a model", "JSON output file", cmd_eval},
      {"sweep", "Scaling sweep over n_alpha (CSV)", "CSV output file", cmd_sweep},
      {"bounds", "Covering, entropy and generalization bound report", "JSON output file", cmd_bounds},
      {"oracle", "Compare evaluators against reference solutions", "JSON output file", cmd_oracle},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> commands;
  for (const auto& e : entries) {
    CLI::App* cmd = app.add_subcommand(e.name, e.help);
    add_common(cmd, opts, e.output_help);
    commands.emplace_back(cmd, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (const auto& [cmd, entry] : commands)
      if (cmd->parsed()) return entry->run(opts);
  } catch (const mnol::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const mnol::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
