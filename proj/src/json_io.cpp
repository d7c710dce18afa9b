#include "mnol/json_io.hpp"

#include <fstream>
#include <sstream>

#include "mnol/errors.hpp"

namespace mnol {

namespace {

template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

Json mlp_json(const MlpParams<double>& net) {
  Json layers = Json::array();
  Json weights = Json::array();
  Json biases = Json::array();
  for (int l = 0; l < net.depth(); ++l) {
    const auto& w = net.weights[l];
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
      rows.push_back(std::move(row));
    }
    weights.push_back(std::move(rows));
    biases.push_back(vec_json(net.biases[l]));
  }
  return Json{{"weights", std::move(weights)}, {"biases", std::move(biases)}};
}

MlpParams<double> mlp_from(const Json& j, const NetClassSpec& spec) {
  MlpParams<double> net = zero_mlp<double>(spec);
  const Json& weights = j.at("weights");
  const Json& biases = j.at("biases");
  if (weights.size() != static_cast<std::size_t>(spec.depth) || biases.size() != static_cast<std::size_t>(spec.depth))
    throw ShapeError("model: layer count does not match the class depth");
  for (int l = 0; l < spec.depth; ++l) {
    auto& w = net.weights[l];
    const Json& rows = weights.at(l);
    if (rows.size() != static_cast<std::size_t>(w.rows())) throw ShapeError("model: weight row count mismatch");
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      const Json& row = rows.at(r);
      if (row.size() != static_cast<std::size_t>(w.cols())) throw ShapeError("model: weight column count mismatch");
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = row.at(c).get<double>();
    }
    Eigen::VectorXd b = vec_from(biases.at(l));
    if (b.size() != net.biases[l].size()) throw ShapeError("model: bias length mismatch");
    net.biases[l] = b;
  }
  return net;
}

Json log_bound_json(const LogBound& b) { return Json{{"log", b.value.log()}, {"floor_relaxed", b.floor_relaxed}}; }

Json covering_json(const MnoCovering& c) {
  return Json{{"log_N", log_bound_json(c.log_N)},     {"log_log_N", c.log_log_N},
              {"log_T", c.T.log()},                   {"log_h", c.log_h},
              {"log_coeff_factor", c.log_coeff_factor}, {"log_F_l", log_bound_json(c.log_F_l)},
              {"log_F_b", log_bound_json(c.log_F_b)}, {"log_F_tau", log_bound_json(c.log_F_tau)}};
}

Json constants_json(const BoundConstants& c) {
  return Json{{"C", c.C},         {"C_prime", c.C_prime}, {"C_dprime", c.C_dprime}, {"C_delta", c.C_delta},
              {"C_zeta", c.C_zeta}, {"big_o", c.big_o},   {"width", c.width},       {"sigma", c.sigma},
              {"beta_V", c.beta_V}, {"beta_U", c.beta_U}, {"beta_W", c.beta_W},     {"gamma_V", c.gamma_V},
              {"I", c.I},           {"d_W", c.d_W},       {"d_U", c.d_U},           {"d_V", c.d_V},
              {"n_cW", c.n_cW},     {"n_cU", c.n_cU}};
}

Json rate_json(const std::optional<RateSchedule>& r) {
  if (!r) return nullptr;
  return Json{{"eps", r->eps}, {"eta", r->eta}, {"rate", r->rate}, {"delta2", r->delta2}};
}

}  // namespace

Json to_json(const NetClassSpec& s) {
  return Json{{"d_in", s.d_in},         {"d_out", s.d_out},         {"depth", s.depth},
              {"width", s.width},       {"sparsity", s.sparsity},   {"kappa", s.kappa},
              {"output_bound", s.output_bound}};
}

NetClassSpec net_class_from_json(const Json& j) {
  return guarded("network class", [&] {
    NetClassSpec s;
    s.d_in = j.at("d_in").get<int>();
    s.d_out = j.at("d_out").get<int>();
    s.depth = j.at("depth").get<int>();
    s.width = j.at("width").get<int>();
    s.sparsity = j.at("sparsity").get<long long>();
    s.kappa = j.at("kappa").get<double>();
    s.output_bound = j.at("output_bound").get<double>();
    s.validate();
    return s;
  });
}

Json to_json(const MnoSpec& s) {
  return Json{{"P", s.P},
              {"H", s.H},
              {"N", s.N},
              {"coeff_bound", s.coeff_bound},
              {"clip_a", s.clip_a},
              {"spec_l", to_json(s.spec_l)},
              {"spec_b", to_json(s.spec_b)},
              {"spec_tau", to_json(s.spec_tau)}};
}

MnoSpec mno_spec_from_json(const Json& j) {
  return guarded("model spec", [&] {
    MnoSpec s;
    s.P = j.at("P").get<int>();
    s.H = j.at("H").get<int>();
    s.N = j.at("N").get<int>();
    s.coeff_bound = j.at("coeff_bound").get<double>();
    s.clip_a = j.at("clip_a").get<double>();
    s.spec_l = net_class_from_json(j.at("spec_l"));
    s.spec_b = net_class_from_json(j.at("spec_b"));
    s.spec_tau = net_class_from_json(j.at("spec_tau"));
    s.validate();
    return s;
  });
}

Json to_json(const MnoParams<double>& params) {
  Json j;
  j["spec"] = to_json(params.spec);
  j["theta"] = vec_json(params.theta);
  for (const auto* nets : {&params.l_nets, &params.b_nets, &params.tau_nets}) {
    Json arr = Json::array();
    for (const auto& n : *nets) arr.push_back(mlp_json(n));
    j[nets == &params.l_nets ? "l_nets" : nets == &params.b_nets ? "b_nets" : "tau_nets"] = std::move(arr);
  }
  return j;
}

MnoParams<double> mno_params_from_json(const Json& j) {
  return guarded("model", [&] {
    MnoParams<double> p;
    p.spec = mno_spec_from_json(j.at("spec"));
    p.theta = vec_from(j.at("theta"));
    if (p.theta.size() != p.spec.theta_size()) throw ShapeError("model: theta has the wrong length");
    auto load = [&](const char* key, int count, const NetClassSpec& cls, std::vector<MlpParams<double>>& out) {
      const Json& arr = j.at(key);
      if (arr.size() != static_cast<std::size_t>(count))
        throw ShapeError(std::string("model: ") + key + " has the wrong number of networks");
      for (const auto& n : arr) out.push_back(mlp_from(n, cls));
    };
    load("l_nets", p.spec.P, p.spec.spec_l, p.l_nets);
    load("b_nets", p.spec.H, p.spec.spec_b, p.b_nets);
    load("tau_nets", p.spec.N, p.spec.spec_tau, p.tau_nets);
    return p;
  });
}

Json to_json(const FunctionSpaceSpec& s) {
  return Json{{"dim", s.dim},           {"gamma", s.gamma}, {"lipschitz", s.lipschitz},
              {"sup_beta", s.sup_beta}, {"sampler", to_string(s.kind)}, {"modes", s.modes},
              {"decay", s.decay},       {"offset", s.offset}};
}

FunctionSpaceSpec function_space_from_json(const Json& j) {
  return guarded("function space", [&] {
    FunctionSpaceSpec s;
    s.dim = j.at("dim").get<int>();
    s.gamma = j.at("gamma").get<double>();
    s.lipschitz = j.at("lipschitz").get<double>();
    s.sup_beta = j.at("sup_beta").get<double>();
    s.kind = parse_sampler_kind(j.at("sampler").get<std::string>());
    s.modes = j.at("modes").get<int>();
    s.decay = j.at("decay").get<double>();
    s.offset = j.at("offset").get<double>();
    return s;
  });
}

Json to_json(const OperatorFamily& f) {
  return Json{{"name", to_string(f.kind)},
              {"profile", to_string(f.profile)},
              {"fractional_c", f.fractional_c},
              {"t", f.t},
              {"extension", to_string(f.extension)}};
}

OperatorFamily family_from_json(const Json& j) {
  return guarded("family", [&] {
    OperatorFamily f;
    f.kind = parse_family_kind(j.at("name").get<std::string>());
    f.profile = parse_radial_profile(j.at("profile").get<std::string>());
    f.fractional_c = j.at("fractional_c").get<double>();
    f.t = j.at("t").get<double>();
    f.extension = parse_extension(j.at("extension").get<std::string>());
    return f;
  });
}

Json to_json(const QuadratureRule& r) {
  Json j{{"kind", to_string(r.kind)}, {"node_count", r.node_count}, {"seed", r.seed}};
  j["truncation_radius"] = r.truncation_radius ? Json(*r.truncation_radius) : Json(nullptr);
  return j;
}

QuadratureRule quadrature_from_json(const Json& j) {
  return guarded("quadrature", [&] {
    QuadratureRule r;
    r.kind = parse_quad_kind(j.at("kind").get<std::string>());
    r.node_count = j.at("node_count").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("truncation_radius") && !j.at("truncation_radius").is_null())
      r.truncation_radius = j.at("truncation_radius").get<double>();
    return r;
  });
}

Json to_json(const DataSpec& s) {
  return Json{{"family", to_json(s.family)},
              {"alpha_space", to_json(s.alpha_spec)},
              {"u_space", to_json(s.u_spec)},
              {"alpha_grid_count", s.alpha_grid_count},
              {"u_grid_count", s.u_grid_count},
              {"quadrature", to_json(s.rule)},
              {"sigma", s.sigma}};
}

DataSpec data_spec_from_json(const Json& j) {
  return guarded("data spec", [&] {
    DataSpec s;
    s.family = family_from_json(j.at("family"));
    s.alpha_spec = function_space_from_json(j.at("alpha_space"));
    s.u_spec = function_space_from_json(j.at("u_space"));
    s.alpha_grid_count = j.at("alpha_grid_count").get<int>();
    s.u_grid_count = j.at("u_grid_count").get<int>();
    s.rule = quadrature_from_json(j.at("quadrature"));
    s.sigma = j.at("sigma").get<double>();
    return s;
  });
}

Json to_json(const HierarchicalDataset& d) {
  Json meta;
  meta["n_alpha"] = d.n_alpha;
  meta["n_u"] = d.n_u;
  meta["n_x"] = d.n_x;
  meta["sigma"] = d.spec.sigma;
  meta["master_seed"] = d.master_seed;
  meta["family"] = to_string(d.spec.family.kind);
  meta["data_spec"] = to_json(d.spec);
  Json y = Json::array(), c = Json::array();
  for (const auto& p : d.spec.alpha_grid()) y.push_back(vec_json(p));
  for (const auto& p : d.spec.u_grid()) c.push_back(vec_json(p));
  meta["y_grid"] = std::move(y);
  meta["c_grid"] = std::move(c);
  meta["y_cover_radius"] = covering_radius(d.spec.alpha_spec.dim, d.spec.alpha_spec.gamma, d.spec.alpha_grid_count);
  meta["c_cover_radius"] = covering_radius(d.spec.u_spec.dim, d.spec.u_spec.gamma, d.spec.u_grid_count);
  meta["noise"] = "gaussian";

  Json alpha = Json::array(), u = Json::array(), x = Json::array(), w = Json::array();
  for (int l = 0; l < d.n_alpha; ++l) {
    alpha.push_back(vec_json(d.alpha_disc[l]));
    Json ul = Json::array(), xl = Json::array(), wl = Json::array();
    for (int i = 0; i < d.n_u; ++i) {
      ul.push_back(vec_json(d.u_disc[l][i]));
      Json xi = Json::array();
      for (int j = 0; j < d.n_x; ++j) xi.push_back(vec_json(d.x_pts[l][i][j]));
      xl.push_back(std::move(xi));
      wl.push_back(d.w_vals[l][i]);
    }
    u.push_back(std::move(ul));
    x.push_back(std::move(xl));
    w.push_back(std::move(wl));
  }
  return Json{{"schema", 1}, {"meta", std::move(meta)}, {"alpha_disc", std::move(alpha)},
              {"u_disc", std::move(u)}, {"x_pts", std::move(x)}, {"w_vals", std::move(w)}};
}

HierarchicalDataset dataset_from_json(const Json& j) {
  return guarded("dataset", [&] {
    if (j.at("schema").get<int>() != 1) throw ConfigError("dataset: unsupported schema version");
    const Json& meta = j.at("meta");
    HierarchicalDataset d;
    d.spec = data_spec_from_json(meta.at("data_spec"));
    d.n_alpha = meta.at("n_alpha").get<int>();
    d.n_u = meta.at("n_u").get<int>();
    d.n_x = meta.at("n_x").get<int>();
    d.master_seed = meta.at("master_seed").get<std::uint64_t>();
    for (const auto& a : j.at("alpha_disc")) d.alpha_disc.push_back(vec_from(a));
    for (const auto& ul : j.at("u_disc")) {
      auto& row = d.u_disc.emplace_back();
      for (const auto& v : ul) row.push_back(vec_from(v));
    }
    for (const auto& xl : j.at("x_pts")) {
      auto& row = d.x_pts.emplace_back();
      for (const auto& xi : xl) {
        auto& cell = row.emplace_back();
        for (const auto& v : xi) cell.push_back(vec_from(v));
      }
    }
    for (const auto& wl : j.at("w_vals")) {
      auto& row = d.w_vals.emplace_back();
      for (const auto& wi : wl) row.push_back(wi.get<std::vector<double>>());
    }
    d.check_shapes();
    return d;
  });
}

Json to_json(const Prescription& p) {
  return Json{{"mode", to_string(p.mode)},
              {"eps", p.eps},
              {"N", p.N},
              {"H", p.H},
              {"P", p.P},
              {"log_N", p.log_N},
              {"log_H", p.log_H},
              {"log_P", p.log_P},
              {"delta", p.delta},
              {"zeta", p.zeta},
              {"log_delta", p.log_delta},
              {"log_kappa_tau", p.log_kappa_tau},
              {"log_kappa_b", p.log_kappa_b},
              {"log_kappa_l", p.log_kappa_l},
              {"log_terms_l", p.log_terms_l},
              {"log_terms_b", p.log_terms_b},
              {"log_terms_tau", p.log_terms_tau},
              {"spec", to_json(p.spec)}};
}

Json to_json(const BoundReport& r) {
  Json inputs{{"constants", constants_json(r.inputs.constants)},
              {"eps", r.inputs.eps},
              {"eta", r.inputs.eta},
              {"n_alpha", r.inputs.n_alpha},
              {"n_u", r.inputs.n_u},
              {"n_x", r.inputs.n_x},
              {"mode", to_string(r.inputs.mode)},
              {"gamma1", r.inputs.gamma1},
              {"gamma2", r.inputs.gamma2}};
  inputs["model"] = r.inputs.model ? to_json(*r.inputs.model) : Json(nullptr);
  Json j;
  j["inputs"] = std::move(inputs);
  j["prescription"] = r.prescription ? to_json(*r.prescription) : Json(nullptr);
  j["entropy"] = Json{{"delta1", r.entropy.delta1},
                      {"delta2", r.entropy.delta2},
                      {"log_bound", r.entropy.log_bound},
                      {"eta_term_floored", r.entropy.eta_term_floored}};
  j["covering_at_eta"] = covering_json(r.at_eta);
  j["covering_at_eta_scaled"] = covering_json(r.at_eta_scaled);
  j["bound_terms"] = Json{{"approximation", r.terms.approximation},
                          {"covering_scale", r.terms.covering_scale},
                          {"noise_linear", r.terms.noise_linear},
                          {"noise_quadratic", r.terms.noise_quadratic},
                          {"operator_sampling", r.terms.operator_sampling},
                          {"total", r.terms.total}};
  j["log_param_count"] = r.log_param_count ? Json(*r.log_param_count) : Json(nullptr);
  j["rate"] = rate_json(r.rate);
  return j;
}

Json to_json(const EvalResult& r) { return Json{{"test_error", r.mean}, {"stderr", r.stderr_}, {"pairs", r.pairs}}; }

Json sweep_report_json(std::span<const ReportEntry> entries, const BoundConstants& constants) {
  Json grid = Json::array();
  for (const auto& e : entries)
    grid.push_back(Json{{"n_alpha", e.n_alpha},
                        {"runs_ok", e.runs_ok},
                        {"median_test_error", e.median},
                        {"q1", e.q1},
                        {"q3", e.q3},
                        {"iqr", e.iqr()},
                        {"rate", rate_json(e.rate)}});
  return Json{{"constants", constants_json(constants)}, {"grid", std::move(grid)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace mnol
