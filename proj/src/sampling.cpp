#include "mnol/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mnol/errors.hpp"

namespace mnol {

namespace {

GridFunction fourier_sample(const FunctionSpaceSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  const auto dim = static_cast<std::size_t>(spec.dim);
  std::vector<double> coeff(spec.modes), phi(spec.modes), freq(static_cast<std::size_t>(spec.modes) * dim);
  double coeff_sum = 0.0;
  double slope_sum = 0.0;
  for (int m = 1; m <= spec.modes; ++m) {
    const auto k = static_cast<std::size_t>(m - 1);
    double* kv = freq.data() + k * dim;
    if (dim == 1) {
      kv[0] = m;
    } else {
      std::uniform_int_distribution<int> comp(-m, m);
      do {
        for (std::size_t d = 0; d < dim; ++d) kv[d] = comp(rng);
      } while (std::all_of(kv, kv + dim, [](double v) { return v == 0.0; }));
    }
    double knorm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) knorm += kv[d] * kv[d];
    knorm = std::sqrt(knorm);
    coeff[k] = unit(rng) * std::pow(static_cast<double>(m), -spec.decay);
    phi[k] = phase(rng);
    coeff_sum += std::abs(coeff[k]);
    slope_sum += std::abs(coeff[k]) * std::numbers::pi * knorm / spec.gamma;
  }
  const double z = std::max({coeff_sum, spec.sup_beta * slope_sum / spec.lipschitz, 1e-300});

  GridFunction f;
  f.dim = spec.dim;
  f.box_lo = -spec.gamma;
  f.box_hi = spec.gamma;
  f.lipschitz = spec.lipschitz;
  f.sup = spec.sup_bound();
  f.evaluator = [coeff = std::move(coeff), phi = std::move(phi), freq = std::move(freq), dim, z,
                 scale = std::numbers::pi / spec.gamma, beta = spec.sup_beta,
                 offset = spec.offset](std::span<const double> x) {
    double g = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      double arg = phi[k];
      for (std::size_t d = 0; d < dim; ++d) arg += scale * freq[k * dim + d] * x[d];
      g += coeff[k] * std::cos(arg);
    }
    return offset + beta * std::clamp(g / z, -1.0, 1.0);
  };
  return f;
}

GridFunction piecewise_linear_sample(const FunctionSpaceSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int knots = spec.modes + 1;
  const double h = 2.0 * spec.gamma / spec.modes;
  std::vector<double> v(static_cast<std::size_t>(knots));
  v[0] = spec.sup_beta * unit(rng);
  for (int k = 1; k < knots; ++k)
    v[k] = std::clamp(v[k - 1] + spec.lipschitz * h * unit(rng), -spec.sup_beta, spec.sup_beta);

  GridFunction f;
  f.dim = 1;
  f.box_lo = -spec.gamma;
  f.box_hi = spec.gamma;
  f.lipschitz = spec.lipschitz;
  f.sup = spec.sup_bound();
  f.evaluator = [v = std::move(v), h, lo = -spec.gamma, offset = spec.offset](std::span<const double> x) {
    const double s = std::clamp((x[0] - lo) / h, 0.0, static_cast<double>(v.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(s), v.size() - 2);
    const double frac = s - static_cast<double>(i);
    return offset + (1.0 - frac) * v[i] + frac * v[i + 1];
  };
  return f;
}

template <typename Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ShapeError& e) {
    throw ShapeError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(path + ": " + e.what());
  }
}

}  // namespace

GridFunction sample_function(const FunctionSpaceSpec& spec, std::uint64_t seed, bool certify) {
  spec.validate();
  Rng rng(seed);
  GridFunction f;
  switch (spec.kind) {
    case SamplerKind::kRandomFourier: f = fourier_sample(spec, rng); break;
    case SamplerKind::kPiecewiseLinear: f = piecewise_linear_sample(spec, rng); break;
    case SamplerKind::kConstant: {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      const double draw = unit(rng);
      f = constant_function(spec.offset + spec.sup_beta * draw, spec.dim, -spec.gamma, spec.gamma);
      f.sup = spec.sup_bound();
      f.lipschitz = spec.lipschitz;
      return f;
    }
  }
  if (certify) {
    const AuditResult r = audit(f);
    if (!r.ok())
      throw NumericalError("sampled function failed its audit (max |f| " + std::to_string(r.max_abs) + ", max slope " +
                           std::to_string(r.max_slope) + ")");
  }
  return f;
}

PointList uniform_grid(int dim, double gamma, int count_per_axis) {
  if (dim < 1) throw ConfigError("grid dimension must be positive");
  if (count_per_axis < 1) throw ConfigError("grid needs at least one point per axis");
  const auto n = static_cast<std::size_t>(count_per_axis);
  auto coord = [&](std::size_t i) {
    if (n == 1) return 0.0;
    if (i + 1 == n) return gamma;
    return -gamma + 2.0 * gamma * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= n;
  PointList points;
  points.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::VectorXd p(dim);
    std::size_t rem = flat;
    for (int d = dim - 1; d >= 0; --d) {
      p(d) = coord(rem % n);
      rem /= n;
    }
    points.push_back(std::move(p));
  }
  return points;
}

double covering_radius(int dim, double gamma, int count_per_axis) {
  const double root = std::sqrt(static_cast<double>(dim));
  return count_per_axis >= 2 ? gamma * root / (count_per_axis - 1) : gamma * root;
}

Eigen::VectorXd discretize(const GridFunction& f, const PointList& points) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t s = 0; s < points.size(); ++s) {
    const auto& p = points[s];
    std::span<const double> view(p.data(), static_cast<std::size_t>(p.size()));
    if (!f.contains(view)) throw DomainError("discretize: point " + std::to_string(s) + " lies outside the box");
    out(static_cast<Eigen::Index>(s)) = f(view);
  }
  return out;
}

int DataSpec::n_cW() const { return static_cast<int>(std::pow(alpha_grid_count, alpha_spec.dim)); }
int DataSpec::n_cU() const { return static_cast<int>(std::pow(u_grid_count, u_spec.dim)); }

void DataSpec::validate() const {
  validate_family_specs(family, alpha_spec, u_spec);
  rule.validate();
  if (alpha_grid_count < 1 || u_grid_count < 1) throw ConfigError("discretization grids need at least one point");
  if (!(sigma >= 0.0)) throw ConfigError("noise level sigma must be nonnegative");
}

GridFunction draw_alpha(const DataSpec& spec, std::uint64_t master, std::uint64_t l, Stream stream) {
  return sample_function(spec.alpha_spec, stream_seed(master, stream, {l}));
}

GridFunction draw_input(const DataSpec& spec, std::uint64_t master, std::uint64_t l, std::uint64_t i, Stream stream) {
  return sample_function(spec.u_spec, stream_seed(master, stream, {l, i}));
}

Eigen::VectorXd draw_point(const DataSpec& spec, std::uint64_t master, std::uint64_t l, std::uint64_t i,
                           std::uint64_t j, Stream stream) {
  const auto [lo, hi] = output_domain(spec.family, spec.alpha_spec, spec.u_spec);
  Rng rng = make_rng(master, stream, {l, i, j});
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::VectorXd x(spec.d_V());
  for (Eigen::Index d = 0; d < x.size(); ++d) x(d) = unif(rng);
  return x;
}

std::vector<MnoSample> HierarchicalDataset::samples() const {
  std::vector<MnoSample> out;
  out.reserve(size());
  for (int l = 0; l < n_alpha; ++l)
    for (int i = 0; i < n_u; ++i)
      for (int j = 0; j < n_x; ++j) out.push_back({alpha_disc[l], u_disc[l][i], x_pts[l][i][j], w_vals[l][i][j]});
  return out;
}

void HierarchicalDataset::check_shapes() const {
  auto fail = [](const std::string& what) { throw ShapeError("dataset: " + what); };
  if (n_alpha < 1 || n_u < 1 || n_x < 1) fail("sizes must be positive");
  const auto na = static_cast<std::size_t>(n_alpha);
  if (alpha_disc.size() != na || u_disc.size() != na || x_pts.size() != na || w_vals.size() != na)
    fail("outer dimension differs from n_alpha");
  const Eigen::Index ncw = alpha_disc[0].size();
  const Eigen::Index ncu = u_disc[0].empty() ? 0 : u_disc[0][0].size();
  const Eigen::Index dv = x_pts[0].empty() || x_pts[0][0].empty() ? 0 : x_pts[0][0][0].size();
  for (std::size_t l = 0; l < na; ++l) {
    if (alpha_disc[l].size() != ncw) fail("alpha discretizations have unequal lengths");
    if (u_disc[l].size() != static_cast<std::size_t>(n_u) || x_pts[l].size() != static_cast<std::size_t>(n_u) ||
        w_vals[l].size() != static_cast<std::size_t>(n_u))
      fail("second dimension differs from n_u");
    for (int i = 0; i < n_u; ++i) {
      if (u_disc[l][i].size() != ncu) fail("input discretizations have unequal lengths");
      if (x_pts[l][i].size() != static_cast<std::size_t>(n_x) || w_vals[l][i].size() != static_cast<std::size_t>(n_x))
        fail("third dimension differs from n_x");
      for (int j = 0; j < n_x; ++j)
        if (x_pts[l][i][j].size() != dv) fail("evaluation points have unequal dimensions");
    }
  }
}

HierarchicalDataset generate_dataset(const DataSpec& spec, int n_alpha, int n_u, int n_x, std::uint64_t master_seed,
                                     unsigned threads) {
  spec.validate();
  if (n_alpha < 1 || n_u < 1 || n_x < 1) throw ConfigError("n_alpha, n_u and n_x must be at least 1");

  HierarchicalDataset ds;
  ds.spec = spec;
  ds.n_alpha = n_alpha;
  ds.n_u = n_u;
  ds.n_x = n_x;
  ds.master_seed = master_seed;
  const auto na = static_cast<std::size_t>(n_alpha);
  ds.alpha_disc.resize(na);
  ds.u_disc.assign(na, std::vector<Eigen::VectorXd>(n_u));
  ds.x_pts.assign(na, std::vector<std::vector<Eigen::VectorXd>>(n_u, std::vector<Eigen::VectorXd>(n_x)));
  ds.w_vals.assign(na, std::vector<std::vector<double>>(n_u, std::vector<double>(n_x)));

  const PointList y_grid = spec.alpha_grid();
  const PointList c_grid = spec.u_grid();

  parallel_for(na, threads, [&](std::size_t l) {
    const std::string lpath = "alpha[" + std::to_string(l) + "]";
    const GridFunction alpha = with_path(lpath, [&] { return draw_alpha(spec, master_seed, l); });
    ds.alpha_disc[l] = with_path(lpath, [&] { return discretize(alpha, y_grid); });
    for (int i = 0; i < n_u; ++i) {
      const std::string ipath = lpath + ".u[" + std::to_string(i) + "]";
      const GridFunction u = with_path(ipath, [&] { return draw_input(spec, master_seed, l, i); });
      ds.u_disc[l][i] = with_path(ipath, [&] { return discretize(u, c_grid); });
      for (int j = 0; j < n_x; ++j) {
        const std::string jpath = ipath + ".x[" + std::to_string(j) + "]";
        Eigen::VectorXd x = draw_point(spec, master_seed, l, i, j);
        const double clean = with_path(jpath, [&] {
          return family_eval(spec.family, alpha, u, std::span<const double>(x.data(), x.size()), spec.rule);
        });
        double noise = 0.0;
        if (spec.sigma > 0.0) {
          Rng rng = make_rng(master_seed, Stream::kNoise, {l, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
          noise = std::normal_distribution<double>(0.0, spec.sigma)(rng);
        }
        ds.x_pts[l][i][j] = std::move(x);
        ds.w_vals[l][i][j] = clean + noise;
      }
    }
  });
  return ds;
}

}  // namespace mnol
