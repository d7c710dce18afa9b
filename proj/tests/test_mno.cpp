#include <doctest.h>

#include <random>

#include "mnol/mno.hpp"
#include "support.hpp"

using namespace mnol;

namespace {

NetClassSpec unit_net(int d_in) {
  NetClassSpec s;
  s.d_in = d_in;
  s.depth = 2;
  s.width = 2;
  s.sparsity = s.dense_parameter_count();
  s.kappa = 1.0;
  return s;
}

// P = H = N = 1 with every subnet the constant 1.
MnoParams<double> constant_model(double theta, double clip_a) {
  MnoSpec spec;
  spec.spec_l = unit_net(1);
  spec.spec_b = unit_net(2);
  spec.spec_tau = unit_net(1);
  spec.coeff_bound = 10.0;
  spec.clip_a = clip_a;
  MnoParams<double> m;
  m.spec = spec;
  m.theta = Eigen::VectorXd::Constant(1, theta);
  m.l_nets.push_back(constant_mlp<double>(spec.spec_l, 1.0));
  m.b_nets.push_back(constant_mlp<double>(spec.spec_b, 1.0));
  m.tau_nets.push_back(constant_mlp<double>(spec.spec_tau, 1.0));
  return m;
}

MnoSample sample(double target = 0.0) {
  return {Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(2, -0.4), Eigen::VectorXd::Constant(1, 0.7),
          target};
}

}  // namespace

TEST_CASE("forward of the constant-subnet model") {
  const auto s = sample();
  CHECK(mno_forward(constant_model(0.4, 1.0), s.alpha, s.u, s.x) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mno_forward(constant_model(5.0, 1.0), s.alpha, s.u, s.x) == 1.0);
  CHECK(mno_forward(constant_model(5.0, 1.0), s.alpha, s.u, s.x, false) == 5.0);
  CHECK(mno_forward(constant_model(0.0, 1.0), s.alpha, s.u, s.x) == 0.0);
}

TEST_CASE("zero coefficients give zero for random subnets") {
  std::mt19937_64 rng(9);
  auto c = ref::random_mno_case(rng, 0.0);
  c.params.theta.setZero();
  for (const auto& s : c.batch) CHECK(mno_forward(c.params, s.alpha, s.u, s.x) == 0.0);
}

TEST_CASE("forward rejects mismatched discretizations") {
  const auto m = constant_model(0.4, 1.0);
  const auto s = sample();
  CHECK_THROWS_AS(mno_forward(m, Eigen::VectorXd::Zero(2), s.u, s.x), ShapeError);
  CHECK_THROWS_AS(mno_forward(m, s.alpha, Eigen::VectorXd::Zero(3), s.x), ShapeError);
  CHECK_THROWS_AS(mno_forward(m, s.alpha, s.u, Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST_CASE("forward and batch prediction agree with the loop reference") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = ref::random_mno_case(rng, 0.0);
    const auto pred = mno_predict(c.params, std::span<const MnoSample>(c.batch));
    for (std::size_t i = 0; i < c.batch.size(); ++i) {
      const double expect = ref::clip(c.params.spec.clip_a, ref::mno_sum(c.params, c.batch[i]));
      CHECK(pred[i] == doctest::Approx(expect).epsilon(1e-12));
      CHECK(mno_forward(c.params, c.batch[i].alpha, c.batch[i].u, c.batch[i].x) == pred[i]);
    }
  }
}

TEST_CASE("theta gradient of a single unsaturated sample") {
  // loss = (theta - t)^2, d/dtheta = 2 (theta - t) l b tau with l = b = tau = 1.
  const auto m = constant_model(0.4, 1.0);
  const std::vector<MnoSample> batch{sample(0.1)};
  const auto g = mno_grad(m, std::span<const MnoSample>(batch));
  CHECK(g.theta(0) == doctest::Approx(2.0 * 0.3).epsilon(1e-14));
  CHECK(g.loss == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("saturated outputs carry no gradient") {
  const auto m = constant_model(5.0, 1.0);
  const std::vector<MnoSample> batch{sample(0.0), sample(-0.5), sample(0.25)};
  const auto g = mno_grad(m, std::span<const MnoSample>(batch));
  CHECK(g.theta.cwiseAbs().maxCoeff() == 0.0);
  std::vector<double> flat = ref::flatten(g);
  for (double v : flat) CHECK(v == 0.0);
}

TEST_CASE("gradient rejects an empty batch") {
  const auto m = constant_model(0.4, 1.0);
  CHECK_THROWS_AS(mno_grad(m, std::span<const MnoSample>()), DomainError);
}

TEST_CASE("gradient matches central differences on random configurations") {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) worst = std::max(worst, ref::mno_case_error(ref::random_mno_case(rng)));
  CHECK(worst < 1e-5);
}

TEST_CASE("grouped gradient equals the sum of single-sample gradients") {
  std::mt19937_64 rng(8);
  const auto c = ref::random_mno_case(rng, 0.0);
  const auto whole = ref::flatten(mno_grad(c.params, std::span<const MnoSample>(c.batch)));
  std::vector<double> summed(whole.size(), 0.0);
  for (const auto& s : c.batch) {
    const auto one = ref::flatten(mno_grad(c.params, std::span<const MnoSample>(&s, 1)));
    for (std::size_t i = 0; i < one.size(); ++i) summed[i] += one[i] / double(c.batch.size());
  }
  for (std::size_t i = 0; i < whole.size(); ++i) CHECK(whole[i] == doctest::Approx(summed[i]).epsilon(1e-12));
}

TEST_CASE("projection clamps coefficients and delegates to the subnets") {
  auto m = constant_model(0.0, 1.0);
  m.spec.coeff_bound = 1.0;
  m.theta(0) = -2.0;
  m.l_nets[0].weights[0](0, 0) = 3.0;
  const auto q = mno_project(m);
  CHECK(q.theta(0) == -1.0);
  CHECK(q.l_nets[0].weights[0](0, 0) == 1.0);
  CHECK(mno_in_class(q));
  const auto again = mno_project(q);
  CHECK(again.theta(0) == q.theta(0));
  CHECK(param_distance(again.l_nets[0], q.l_nets[0]) == 0.0);
}

TEST_CASE("prescription at eps = 0.5") {
  const BoundConstants c;
  const auto p = prescribe_architecture(0.5, 1, 1, 1, c, PrescribeMode::kHalved);
  CHECK(p.N == doctest::Approx(128.0).epsilon(1e-12));
  CHECK(p.P == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(p.log_N == doctest::Approx(std::log(128.0)).epsilon(1e-13));
  CHECK(p.log_P == doctest::Approx(std::log(8.0)).epsilon(1e-13));
  CHECK(p.spec.N == 128);
  CHECK(p.spec.P == 8);
}

TEST_CASE("halving eps does not shrink prescribed sizes") {
  const BoundConstants c;
  for (auto mode : {PrescribeMode::kBase, PrescribeMode::kHalved})
    for (double eps : {0.9, 0.5, 0.3}) {
      const auto a = prescribe_architecture(eps, 1, 1, 1, c, mode);
      const auto b = prescribe_architecture(eps / 2.0, 1, 1, 1, c, mode);
      CHECK(b.log_N >= a.log_N);
      CHECK(b.log_H >= a.log_H);
      CHECK(b.log_P >= a.log_P);
      CHECK(b.log_kappa_tau >= a.log_kappa_tau);
      CHECK(b.log_kappa_b >= a.log_kappa_b);
      CHECK(b.log_kappa_l >= a.log_kappa_l);
    }
}

TEST_CASE("prescription rejects nonpositive eps") {
  CHECK_THROWS_AS(prescribe_architecture(0.0, 1, 1, 1, BoundConstants{}, PrescribeMode::kHalved), DomainError);
  CHECK(parse_prescribe_mode("base") == PrescribeMode::kBase);
  CHECK_THROWS_AS(parse_prescribe_mode("third"), ConfigError);
}
