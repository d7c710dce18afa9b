#include "mnol/config.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "mnol/errors.hpp"

namespace mnol {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::set<std::string> space{"dim", "gamma", "lipschitz", "sup_beta", "sampler", "modes", "decay", "offset"};
  static const std::set<std::string> net{"depth", "width", "sparsity", "kappa", "output_bound"};
  static const std::map<std::string, std::set<std::string>> known{
      {"run", {"seed", "threads"}},
      {"family", {"name", "profile", "fractional_c", "t", "extension"}},
      {"alpha_space", space},
      {"u_space", space},
      {"grids", {"alpha_count", "u_count"}},
      {"quadrature", {"kind", "node_count", "seed", "truncation_radius"}},
      {"data", {"n_alpha", "n_u", "n_x", "sigma", "seed"}},
      {"model", {"P", "H", "N", "coeff_bound", "clip_a"}},
      {"net_l", net},
      {"net_b", net},
      {"net_tau", net},
      {"train", {"learning_rate", "steps", "batch_size", "projection_every", "optimizer", "momentum", "cosine_decay",
                 "seed"}},
      {"eval", {"m_alpha", "m_u", "m_x", "seed"}},
      {"sweep", {"n_alpha_grid", "n_u", "n_x", "trials", "seed", "record_timing"}},
      {"bounds", {"eps", "eta", "n_alpha", "n_u", "n_x", "mode", "gamma1", "gamma2", "use_model"}},
      {"constants", {"C", "C_prime", "C_dprime", "C_delta", "C_zeta", "big_o", "width", "sigma", "beta_V", "beta_U",
                     "beta_W", "gamma_V", "I", "d_W", "d_U", "d_V", "n_cW", "n_cU"}},
      {"io", {"dataset", "model", "output", "loss_csv", "report"}},
      {"oracle", {"grid_n", "check"}},
  };
  return known;
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& value,
                            const char* expected) {
  throw ConfigError("[" + section + "] " + key + " = '" + value + "' is not " + expected);
}

template <typename T, typename Parse>
T parse_number(const std::string& section, const std::string& key, const std::string& value, Parse parse,
               const char* expected) {
  try {
    std::size_t used = 0;
    T out = parse(value, &used);
    if (used != value.size()) bad_value(section, key, value, expected);
    return out;
  } catch (const std::logic_error&) {
    bad_value(section, key, value, expected);
  }
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  try {
    pt::read_ini(in, cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.check_known_keys();
  return cfg;
}

Config Config::from_file(const std::filesystem::path& path) {
  Config cfg;
  try {
    pt::read_ini(path.string(), cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.check_known_keys();
  return cfg;
}

void Config::check_known_keys() const {
  const auto& known = schema();
  for (const auto& [section, child] : tree_) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    if (!child.data().empty()) throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, leaf] : child)
      if (!it->second.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
  }
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string section = boost::algorithm::trim_copy(assignment.substr(0, dot));
  const std::string key = boost::algorithm::trim_copy(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = boost::algorithm::trim_copy(assignment.substr(eq + 1));
  auto sec = tree_.get_child_optional(section);
  pt::ptree& node = sec ? *sec : tree_.add_child(section, pt::ptree());
  node.put_child(pt::ptree::path_type(key, '\0'), pt::ptree(value));
  check_known_keys();
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
  auto sec = tree_.get_child_optional(section);
  if (!sec) return std::nullopt;
  auto leaf = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
  if (!leaf) return std::nullopt;
  return boost::algorithm::trim_copy(leaf->data());
}

void Config::record(const std::string& section, const std::string& key, const std::string& value) const {
  auto sec = resolved_.get_child_optional(section);
  pt::ptree& node = sec ? *sec : resolved_.add_child(section, pt::ptree());
  node.put_child(pt::ptree::path_type(key, '\0'), pt::ptree(value));
}

bool Config::has(const std::string& section, const std::string& key) const { return raw(section, key).has_value(); }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const std::string v = raw(section, key).value_or(fallback);
  record(section, key, v);
  return v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto r = raw(section, key);
  const double v = r ? parse_number<double>(section, key, *r, [](const std::string& s, std::size_t* n) { return std::stod(s, n); },
                                             "a real number")
                     : fallback;
  record(section, key, fmt(v));
  return v;
}

std::optional<double> Config::get_optional_double(const std::string& section, const std::string& key) const {
  const auto r = raw(section, key);
  if (!r || r->empty() || *r == "auto") {
    record(section, key, "auto");
    return std::nullopt;
  }
  return get_double(section, key, 0.0);
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const auto r = raw(section, key);
  const int v = r ? parse_number<int>(section, key, *r, [](const std::string& s, std::size_t* n) { return std::stoi(s, n); },
                                       "an integer")
                  : fallback;
  record(section, key, std::to_string(v));
  return v;
}

long long Config::get_long(const std::string& section, const std::string& key, long long fallback) const {
  const auto r = raw(section, key);
  const long long v =
      r ? parse_number<long long>(section, key, *r, [](const std::string& s, std::size_t* n) { return std::stoll(s, n); },
                                  "an integer")
        : fallback;
  record(section, key, std::to_string(v));
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const auto r = raw(section, key);
  std::uint64_t v = fallback;
  if (r) {
    if (r->empty() || r->front() == '-') bad_value(section, key, *r, "a nonnegative integer");
    v = parse_number<std::uint64_t>(
        section, key, *r, [](const std::string& s, std::size_t* n) { return std::stoull(s, n); },
        "a nonnegative integer");
  }
  record(section, key, std::to_string(v));
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const auto r = raw(section, key);
  bool v = fallback;
  if (r) {
    if (*r == "true" || *r == "1" || *r == "yes" || *r == "on")
      v = true;
    else if (*r == "false" || *r == "0" || *r == "no" || *r == "off")
      v = false;
    else
      bad_value(section, key, *r, "a boolean");
  }
  record(section, key, v ? "true" : "false");
  return v;
}

std::vector<int> Config::get_int_list(const std::string& section, const std::string& key,
                                      const std::vector<int>& fallback) const {
  const auto r = raw(section, key);
  std::vector<int> out = fallback;
  if (r) {
    out.clear();
    std::stringstream ss(*r);
    std::string item;
    while (std::getline(ss, item, ',')) {
      boost::algorithm::trim(item);
      if (item.empty()) continue;
      out.push_back(parse_number<int>(section, key, item,
                                      [](const std::string& s, std::size_t* n) { return std::stoi(s, n); },
                                      "a comma-separated integer list"));
    }
  }
  std::string text;
  for (std::size_t i = 0; i < out.size(); ++i) text += (i ? "," : "") + std::to_string(out[i]);
  record(section, key, text);
  return out;
}

std::string Config::dump() const {
  std::ostringstream out;
  pt::write_ini(out, resolved_);
  return out.str();
}

namespace {

FunctionSpaceSpec space_from(const Config& cfg, const std::string& section, const FunctionSpaceSpec& defaults) {
  FunctionSpaceSpec s;
  s.dim = cfg.get_int(section, "dim", defaults.dim);
  s.gamma = cfg.get_double(section, "gamma", defaults.gamma);
  s.lipschitz = cfg.get_double(section, "lipschitz", defaults.lipschitz);
  s.sup_beta = cfg.get_double(section, "sup_beta", defaults.sup_beta);
  s.kind = parse_sampler_kind(cfg.get_string(section, "sampler", to_string(defaults.kind)));
  s.modes = cfg.get_int(section, "modes", defaults.modes);
  s.decay = cfg.get_double(section, "decay", defaults.decay);
  s.offset = cfg.get_double(section, "offset", defaults.offset);
  return s;
}

NetClassSpec net_from(const Config& cfg, const std::string& section, int d_in) {
  NetClassSpec s;
  s.d_in = d_in;
  s.d_out = 1;
  s.depth = cfg.get_int(section, "depth", 2);
  s.width = cfg.get_int(section, "width", 8);
  s.kappa = cfg.get_double(section, "kappa", 5.0);
  s.output_bound = cfg.get_double(section, "output_bound", 1.0);
  const long long dense = s.dense_parameter_count();
  const long long k = cfg.get_long(section, "sparsity", 0);
  s.sparsity = k <= 0 ? dense : k;
  s.validate();
  return s;
}

}  // namespace

DataSpec data_spec_from(const Config& cfg) {
  DataSpec d;
  d.family.kind = parse_family_kind(cfg.get_string("family", "name", "green_dirichlet"));
  d.family.profile = parse_radial_profile(cfg.get_string("family", "profile", "indicator"));
  d.family.fractional_c = cfg.get_double("family", "fractional_c", 1.0);
  d.family.t = cfg.get_double("family", "t", 0.5);
  d.family.extension = parse_extension(cfg.get_string("family", "extension", "clamp"));

  FunctionSpaceSpec alpha_defaults;
  alpha_defaults.kind = SamplerKind::kConstant;
  alpha_defaults.offset = 0.75;
  alpha_defaults.sup_beta = 0.25;
  alpha_defaults.lipschitz = 0.0;
  FunctionSpaceSpec u_defaults;
  u_defaults.sup_beta = 4.0;
  u_defaults.lipschitz = 30.0;
  u_defaults.modes = 6;
  d.alpha_spec = space_from(cfg, "alpha_space", alpha_defaults);
  d.u_spec = space_from(cfg, "u_space", u_defaults);

  d.alpha_grid_count = cfg.get_int("grids", "alpha_count", 1);
  d.u_grid_count = cfg.get_int("grids", "u_count", 8);

  d.rule.kind = parse_quad_kind(cfg.get_string("quadrature", "kind", "trapezoid"));
  d.rule.node_count = cfg.get_int("quadrature", "node_count", 201);
  d.rule.seed = cfg.get_u64("quadrature", "seed", 0);
  d.rule.truncation_radius = cfg.get_optional_double("quadrature", "truncation_radius");

  d.sigma = cfg.get_double("data", "sigma", 0.05);
  d.validate();
  return d;
}

MnoSpec model_spec_from(const Config& cfg, const DataSpec& data) {
  MnoSpec s;
  s.P = cfg.get_int("model", "P", 2);
  s.H = cfg.get_int("model", "H", 2);
  s.N = cfg.get_int("model", "N", 2);
  s.coeff_bound = cfg.get_double("model", "coeff_bound", 1.0);
  const auto clip = cfg.get_optional_double("model", "clip_a");
  s.clip_a = clip ? *clip : output_bound(data.family, data.alpha_spec, data.u_spec, data.rule);
  s.spec_l = net_from(cfg, "net_l", data.n_cW());
  s.spec_b = net_from(cfg, "net_b", data.n_cU());
  s.spec_tau = net_from(cfg, "net_tau", data.d_V());
  s.validate();
  return s;
}

TrainConfig train_config_from(const Config& cfg) {
  TrainConfig t;
  t.learning_rate = cfg.get_double("train", "learning_rate", t.learning_rate);
  t.steps = cfg.get_int("train", "steps", t.steps);
  t.batch_size = cfg.get_int("train", "batch_size", t.batch_size);
  t.projection_every = cfg.get_int("train", "projection_every", t.projection_every);
  t.optimizer = parse_optimizer(cfg.get_string("train", "optimizer", to_string(t.optimizer)));
  t.momentum = cfg.get_double("train", "momentum", t.momentum);
  t.cosine_decay = cfg.get_bool("train", "cosine_decay", t.cosine_decay);
  t.seed = cfg.get_u64("train", "seed", t.seed);
  t.validate();
  return t;
}

EvalBudget eval_budget_from(const Config& cfg) {
  EvalBudget b;
  b.m_alpha = cfg.get_int("eval", "m_alpha", b.m_alpha);
  b.m_u = cfg.get_int("eval", "m_u", b.m_u);
  b.m_x = cfg.get_int("eval", "m_x", b.m_x);
  if (b.m_alpha < 1 || b.m_u < 1 || b.m_x < 1) throw ConfigError("[eval] budgets must be >= 1");
  return b;
}

SweepConfig sweep_config_from(const Config& cfg) {
  SweepConfig s;
  s.data = data_spec_from(cfg);
  s.model = model_spec_from(cfg, s.data);
  s.train = train_config_from(cfg);
  s.budget = eval_budget_from(cfg);
  s.n_alpha_grid = cfg.get_int_list("sweep", "n_alpha_grid", {4, 8, 16, 32});
  s.n_u = cfg.get_int("sweep", "n_u", 4);
  s.n_x = cfg.get_int("sweep", "n_x", 16);
  s.trials = cfg.get_int("sweep", "trials", 5);
  s.master_seed = cfg.get_u64("sweep", "seed", 0);
  s.record_timing = cfg.get_bool("sweep", "record_timing", true);
  s.threads = static_cast<unsigned>(cfg.get_int("run", "threads", 0));
  s.validate();
  return s;
}

BoundConstants bound_constants_from(const Config& cfg) {
  BoundConstants c;
  const std::string s = "constants";
  c.C = cfg.get_double(s, "C", c.C);
  c.C_prime = cfg.get_double(s, "C_prime", c.C_prime);
  c.C_dprime = cfg.get_double(s, "C_dprime", c.C_dprime);
  c.C_delta = cfg.get_double(s, "C_delta", c.C_delta);
  c.C_zeta = cfg.get_double(s, "C_zeta", c.C_zeta);
  c.big_o = cfg.get_double(s, "big_o", c.big_o);
  c.width = cfg.get_int(s, "width", c.width);
  c.sigma = cfg.get_double(s, "sigma", c.sigma);
  c.beta_V = cfg.get_double(s, "beta_V", c.beta_V);
  c.beta_U = cfg.get_double(s, "beta_U", c.beta_U);
  c.beta_W = cfg.get_double(s, "beta_W", c.beta_W);
  c.gamma_V = cfg.get_double(s, "gamma_V", c.gamma_V);
  c.I = cfg.get_double(s, "I", c.I);
  c.d_W = cfg.get_int(s, "d_W", c.d_W);
  c.d_U = cfg.get_int(s, "d_U", c.d_U);
  c.d_V = cfg.get_int(s, "d_V", c.d_V);
  c.n_cW = cfg.get_int(s, "n_cW", c.n_cW);
  c.n_cU = cfg.get_int(s, "n_cU", c.n_cU);
  return c;
}

BoundInputs bound_inputs_from(const Config& cfg) {
  BoundInputs b;
  b.constants = bound_constants_from(cfg);
  b.eps = cfg.get_double("bounds", "eps", b.eps);
  b.eta = cfg.get_double("bounds", "eta", b.eta);
  b.n_alpha = cfg.get_long("bounds", "n_alpha", b.n_alpha);
  b.n_u = cfg.get_long("bounds", "n_u", b.n_u);
  b.n_x = cfg.get_long("bounds", "n_x", b.n_x);
  b.mode = parse_prescribe_mode(cfg.get_string("bounds", "mode", to_string(b.mode)));
  b.gamma1 = cfg.get_double("bounds", "gamma1", b.gamma1);
  b.gamma2 = cfg.get_double("bounds", "gamma2", b.gamma2);
  if (cfg.get_bool("bounds", "use_model", false)) b.model = model_spec_from(cfg, data_spec_from(cfg));
  return b;
}

}  // namespace mnol
