#include <doctest.h>

#include <cmath>

#include "mnol/config.hpp"
#include "mnol/errors.hpp"
#include "mnol/sampling.hpp"

using namespace mnol;

namespace {

FunctionSpaceSpec fourier(int dim, double L, double beta) {
  FunctionSpaceSpec s;
  s.dim = dim;
  s.gamma = 1.0;
  s.lipschitz = L;
  s.sup_beta = beta;
  s.modes = 6;
  return s;
}

DataSpec default_data(double sigma) {
  DataSpec d = data_spec_from(Config());
  d.sigma = sigma;
  return d;
}

}  // namespace

TEST_CASE("samplers are deterministic and respect their bounds") {
  for (auto kind : {SamplerKind::kRandomFourier, SamplerKind::kPiecewiseLinear, SamplerKind::kConstant}) {
    FunctionSpaceSpec s = fourier(1, 5.0, 0.8);
    s.kind = kind;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto f = sample_function(s, seed);
      const auto g = sample_function(s, seed);
      for (int i = 0; i <= 50; ++i) {
        const double x = -1.0 + i / 25.0;
        CHECK(f(x) == g(x));
      }
      const auto a = audit(f, 1000);
      CHECK(a.max_abs <= 0.8 * (1.0 + 1e-12));
      CHECK(a.max_slope <= 5.0 * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("two-dimensional Fourier samples pass the audit") {
  const auto s = fourier(2, 4.0, 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(audit(sample_function(s, seed)).ok());
}

TEST_CASE("offset shifts the sampled range") {
  FunctionSpaceSpec s = fourier(1, 3.0, 0.5);
  s.offset = 2.0;
  const auto f = sample_function(s, 1);
  for (int i = 0; i <= 20; ++i) {
    const double v = f(-1.0 + i / 10.0);
    CHECK((v >= 1.5 && v <= 2.5));
  }
}

TEST_CASE("infeasible function spaces are rejected") {
  FunctionSpaceSpec s = fourier(1, 0.0, 1.0);
  CHECK_THROWS_AS(sample_function(s, 0), ConfigError);
}

TEST_CASE("uniform grids and covering radius") {
  const auto g = uniform_grid(1, 1.0, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[0](0) == -1.0);
  CHECK(g[1](0) == 0.0);
  CHECK(g[2](0) == 1.0);
  const auto corners = uniform_grid(2, 1.0, 2);
  REQUIRE(corners.size() == 4);
  for (const auto& p : corners) CHECK(p.cwiseAbs().minCoeff() == 1.0);
  CHECK(covering_radius(1, 1.0, 3) == 0.5);
  CHECK(uniform_grid(1, 1.0, 1)[0](0) == 0.0);
}

TEST_CASE("discretization") {
  const auto pts = uniform_grid(1, 1.0, 3);
  const auto c = discretize(constant_function(0.3, 1, -1.0, 1.0), pts);
  CHECK(c == Eigen::Vector3d(0.3, 0.3, 0.3));
  const auto id = discretize(make_function([](double x) { return x; }, -1.0, 1.0, 1.0, 1.0), pts);
  CHECK(id == Eigen::Vector3d(-1.0, 0.0, 1.0));
  PointList outside{Eigen::VectorXd::Constant(1, 1.5)};
  CHECK_THROWS_AS(discretize(constant_function(0.0, 1, -1.0, 1.0), outside), DomainError);
}

TEST_CASE("dataset array sizes") {
  const auto d = generate_dataset(default_data(0.05), 2, 3, 4, 7);
  CHECK(d.alpha_disc.size() == 2);
  std::size_t n_u = 0, n_x = 0, n_w = 0;
  for (int l = 0; l < 2; ++l) {
    n_u += d.u_disc[l].size();
    for (int i = 0; i < 3; ++i) {
      n_x += d.x_pts[l][i].size();
      n_w += d.w_vals[l][i].size();
    }
  }
  CHECK(n_u == 6);
  CHECK(n_x == 24);
  CHECK(n_w == 24);
  CHECK(d.samples().size() == 24);
  CHECK_NOTHROW(d.check_shapes());
}

TEST_CASE("noise-free observations equal the operator values") {
  const DataSpec spec = default_data(0.0);
  const std::uint64_t seed = 13;
  const auto d = generate_dataset(spec, 3, 2, 5, seed);
  const auto ugrid = spec.u_grid();
  for (int l = 0; l < 3; ++l) {
    const auto alpha = draw_alpha(spec, seed, l);
    CHECK(d.alpha_disc[l] == discretize(alpha, spec.alpha_grid()));
    for (int i = 0; i < 2; ++i) {
      const auto u = draw_input(spec, seed, l, i);
      CHECK(d.u_disc[l][i] == discretize(u, ugrid));
      for (int j = 0; j < 5; ++j) {
        const auto& x = d.x_pts[l][i][j];
        CHECK(x == draw_point(spec, seed, l, i, j));
        const double expect = family_eval(spec.family, alpha, u, {x.data(), std::size_t(x.size())}, spec.rule);
        CHECK(d.w_vals[l][i][j] == expect);
      }
    }
  }
}

TEST_CASE("observation noise is centered") {
  const auto noisy = generate_dataset(default_data(1.0), 10, 10, 100, 21);
  const auto clean = generate_dataset(default_data(0.0), 10, 10, 100, 21);
  double sum = 0.0;
  for (int l = 0; l < 10; ++l)
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 100; ++j) sum += noisy.w_vals[l][i][j] - clean.w_vals[l][i][j];
  CHECK(std::abs(sum / 1e4) <= 0.04);
}

TEST_CASE("dataset generation is deterministic and thread-count independent") {
  const auto a = generate_dataset(default_data(0.05), 4, 2, 3, 5, 1);
  const auto b = generate_dataset(default_data(0.05), 4, 2, 3, 5, 3);
  CHECK(a.w_vals == b.w_vals);
  const auto c = generate_dataset(default_data(0.05), 4, 2, 3, 6, 1);
  CHECK(a.w_vals != c.w_vals);
}
