#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mnol/errors.hpp"
#include "mnol/operator_zoo.hpp"

using namespace mnol;
using std::numbers::pi;

namespace {

QuadratureRule trapezoid(int n) {
  QuadratureRule r;
  r.node_count = n;
  return r;
}

}  // namespace

TEST_CASE("Green kernel by hand") {
  CHECK(green_kernel(1.0, 0.25, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(green_kernel(1.0, 0.0, 0.7) == 0.0);
  CHECK(green_kernel(1.0, 0.5, 0.25) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK_THROWS_AS(green_kernel(1.0, 1.5, 0.2), DomainError);
  CHECK(green_kernel_relu_form(1.0, 0.25, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("ReLU form of the Green kernel matches the piecewise form") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const double a = 0.1 + 2.0 * unit(rng);
    const double x = a * unit(rng);
    const double y = i % 10 == 0 ? x : a * unit(rng);
    worst = std::max(worst, std::abs(green_kernel_relu_form(a, x, y) - green_kernel(a, x, y)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Green operator against closed-form solutions") {
  const auto one = constant_function(1.0, 1, 0.0, 1.0);
  const auto zero = constant_function(0.0, 1, 0.0, 1.0);
  const auto sine = make_function([](double y) { return std::sin(pi * y); }, 0.0, 1.0, pi, 1.0);
  CHECK(std::abs(green_apply(1.0, one, 0.5, trapezoid(1001)) - 0.125) < 1e-6);
  CHECK(green_apply(1.0, zero, 0.5, trapezoid(1001)) == 0.0);
  CHECK(std::abs(green_apply(1.0, sine, 0.5, trapezoid(1001)) - 1.0 / (pi * pi)) < 1e-5);
  // General interval: -v'' = 1 on [0, a] gives x (a - x) / 2.
  const auto wide = constant_function(1.0, 1, 0.0, 2.0);
  CHECK(std::abs(green_apply(1.7, wide, 0.6, trapezoid(1001)) - 0.6 * 1.1 / 2.0) < 1e-6);
}

TEST_CASE("homogeneous kernel with a normalized indicator") {
  OperatorFamily fam;
  fam.kind = FamilyKind::kHomogeneousKernel;
  fam.profile = RadialProfile::kIndicator;
  const auto alpha = constant_function(0.1, 1, -1.0, 1.0);
  const auto one = constant_function(1.0, 1, -1.0, 1.0);
  const auto zero = constant_function(0.0, 1, -1.0, 1.0);
  const double x[1] = {0.2};
  CHECK(kernel_apply(fam, alpha, one, x, trapezoid(4001)) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(kernel_apply(fam, alpha, zero, x, trapezoid(4001)) == 0.0);
  const auto bad = constant_function(-0.1, 1, -1.0, 1.0);
  CHECK_THROWS_AS(kernel_apply(fam, bad, one, x, trapezoid(101)), DomainError);
}

TEST_CASE("fractional kernel against its antiderivative") {
  OperatorFamily fam;
  fam.kind = FamilyKind::kFractionalKernel;
  const auto alpha = constant_function(0.25, 1, -1.0, 1.0);
  const auto one = constant_function(1.0, 1, -1.0, 1.0);
  auto rule = trapezoid(4001);
  rule.truncation_radius = 0.01;
  const double x[1] = {0.0};
  CHECK(std::abs(kernel_apply(fam, alpha, one, x, rule) - 36.0) < 0.1);
}

TEST_CASE("radial profiles") {
  CHECK(radial_profile(RadialProfile::kIndicator, 0.5) == 0.5);
  CHECK(radial_profile(RadialProfile::kIndicator, 1.5) == 0.0);
  CHECK(radial_profile(RadialProfile::kHat, 0.0) == doctest::Approx(1.0));
  CHECK(radial_profile(RadialProfile::kHat, 1.0) == 0.0);
  CHECK(radial_profile(RadialProfile::kGaussian, 0.0) > radial_profile(RadialProfile::kGaussian, 1.0));
}

TEST_CASE("heat semigroup") {
  const auto c = constant_function(0.7, 1, -1.0, 1.0);
  CHECK(std::abs(heat_apply(0.2, 0.3, c, 0.1, trapezoid(1001)) - 0.7) < 1e-6);
  const auto lin = make_function([](double y) { return y; }, -40.0, 40.0, 1.0, 40.0);
  CHECK(std::abs(heat_apply(0.5, 1.0, lin, 0.3, trapezoid(2001)) - 0.3) < 1e-6);
  const auto bump = make_function([](double y) { return std::exp(-y * y / 2.0); }, -40.0, 40.0, 1.0, 1.0);
  CHECK(std::abs(heat_apply(0.5, 1.0, bump, 0.0, trapezoid(1001)) - 1.0 / std::sqrt(2.0)) < 1e-5);
  CHECK_THROWS_AS(heat_apply(0.0, 1.0, c, 0.0, trapezoid(11)), DomainError);
  CHECK_THROWS_AS(heat_apply(1.0, -1.0, c, 0.0, trapezoid(11)), DomainError);
  CHECK(default_window(0.5, 1.0) == doctest::Approx(8.0));
}

TEST_CASE("heat kernel has unit mass") {
  const double m = quad_integrate([](double z) { return heat_kernel(0.3, 0.4, z); }, -10.0, 10.0, trapezoid(4001));
  CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Cole-Hopf solution of Burgers") {
  const auto zero = constant_function(0.0, 1, -1.0, 1.0);
  const auto c = constant_function(0.6, 1, -1.0, 1.0);
  for (double x : {-0.5, 0.0, 0.4}) {
    CHECK(std::abs(burgers_cole_hopf(0.1, 0.5, zero, x, trapezoid(2001))) < 1e-15);
    CHECK(std::abs(burgers_cole_hopf(0.1, 0.5, c, x, trapezoid(2001)) - 0.6) < 1e-4);
  }
}

TEST_CASE("finite-difference Burgers reference") {
  const auto zero = constant_function(0.0, 1, -1.0, 1.0);
  const auto c = constant_function(-0.3, 1, -1.0, 1.0);
  const auto fz = burgers_fd_reference(0.1, 0.5, zero, 64, fd_min_steps(0.1, 0.5, zero, 64));
  const auto fc = burgers_fd_reference(0.1, 0.5, c, 64, fd_min_steps(0.1, 0.5, c, 64));
  for (double x : {-0.9, -0.1, 0.55}) {
    CHECK(fz(x) == 0.0);
    CHECK(fc(x) == doctest::Approx(-0.3).epsilon(1e-12));
  }
  CHECK_THROWS_AS(burgers_fd_reference(0.1, 0.5, c, 64, 1), ConfigError);
}

TEST_CASE("Cole-Hopf matches finite differences on a sine datum") {
  const auto sine = make_function([](double y) { return std::sin(pi * y); }, -1.0, 1.0, pi, 1.0);
  const auto fd = burgers_fd_reference(0.1, 0.5, sine, 400, fd_min_steps(0.1, 0.5, sine, 400));
  double diff = 0.0, scale = 0.0;
  for (double x : {-0.5, 0.0, 0.5}) {
    diff = std::max(diff, std::abs(burgers_cole_hopf(0.1, 0.5, sine, x, trapezoid(2001), Extension::kPeriodic) - fd(x)));
    scale = std::max(scale, std::abs(fd(x)));
  }
  CHECK(diff / scale < 1e-2);
}

TEST_CASE("family dispatch") {
  QuadratureRule rule = trapezoid(1001);
  const double mid[1] = {0.5};
  OperatorFamily green;
  const auto a1 = constant_function(1.0, 1, 0.0, 1.0);
  const auto u1 = constant_function(1.0, 1, 0.0, 1.0);
  CHECK(std::abs(family_eval(green, a1, u1, mid, rule) - 0.125) < 1e-6);

  OperatorFamily heat;
  heat.kind = FamilyKind::kHeatSemigroup;
  const auto nu = constant_function(0.2, 1, -1.0, 1.0);
  const auto uc = constant_function(0.4, 1, -1.0, 1.0);
  CHECK(std::abs(family_eval(heat, nu, uc, mid, rule) - 0.4) < 1e-6);

  OperatorFamily burgers;
  burgers.kind = FamilyKind::kBurgersColeHopf;
  const auto u0 = constant_function(0.0, 1, -1.0, 1.0);
  CHECK(std::abs(family_eval(burgers, nu, u0, mid, rule)) < 1e-15);

  CHECK_THROWS_AS(parse_family_kind("navier_stokes"), ConfigError);
  CHECK(parse_family_kind(to_string(FamilyKind::kBurgersColeHopf)) == FamilyKind::kBurgersColeHopf);
}

TEST_CASE("family spec validation and output bounds") {
  OperatorFamily green;
  FunctionSpaceSpec alpha;
  alpha.kind = SamplerKind::kConstant;
  alpha.offset = 0.75;
  alpha.sup_beta = 0.25;
  FunctionSpaceSpec u;
  u.gamma = 1.0;
  u.sup_beta = 4.0;
  u.lipschitz = 30.0;
  CHECK_NOTHROW(validate_family_specs(green, alpha, u));
  CHECK(output_bound(green, alpha, u, trapezoid(101)) == doctest::Approx(4.0 / 8.0));
  CHECK(output_domain(green, alpha, u).second == 1.0);
  FunctionSpaceSpec fourier_alpha = alpha;
  fourier_alpha.kind = SamplerKind::kRandomFourier;
  CHECK_THROWS_AS(validate_family_specs(green, fourier_alpha, u), ConfigError);
}
