#include <doctest.h>

#include <random>

#include "mnol/relu_net.hpp"
#include "support.hpp"

using namespace mnol;

namespace {

NetClassSpec scalar_spec(int depth, int width = 1) {
  NetClassSpec s;
  s.depth = depth;
  s.width = width;
  s.sparsity = s.dense_parameter_count();
  s.kappa = 10.0;
  return s;
}

MlpParams<double> two_layer(double w1, double w2) {
  auto p = zero_mlp<double>(scalar_spec(2));
  p.weights[0](0, 0) = w1;
  p.weights[1](0, 0) = w2;
  return p;
}

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("forward on hand-evaluated networks") {
  auto affine = zero_mlp<double>(scalar_spec(1));
  affine.weights[0](0, 0) = 2.0;
  affine.biases[0](0) = 1.0;
  CHECK(forward(affine, vec1(3.0))(0) == 7.0);
  CHECK(forward(two_layer(1.0, 1.0), vec1(-5.0))(0) == 0.0);
  CHECK(forward(two_layer(1.0, 2.0), vec1(3.0))(0) == 6.0);
}

TEST_CASE("forward rejects inputs of the wrong length") {
  const auto p = two_layer(1.0, 1.0);
  CHECK_THROWS_AS(forward(p, Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST_CASE("forward agrees with a loop implementation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = ref::random_net_case(rng, 0.0);
    const auto lib = forward(c.params, c.x);
    const auto loops = ref::net_forward(c.params, ref::to_std(c.x));
    for (int i = 0; i < lib.size(); ++i) CHECK(lib(i) == doctest::Approx(loops[i]).epsilon(1e-13));
  }
}

TEST_CASE("forward works for long double parameters") {
  const auto p = two_layer(1.0, 2.0).cast<long double>();
  CHECK(forward(p, vec1(3.0))(0) == 6.0L);
}

TEST_CASE("clip saturates and passes interior values") {
  CHECK(clip_scalar(1.0, 2.0) == 1.0);
  CHECK(clip_scalar(1.0, -3.0) == -1.0);
  CHECK(clip_scalar(1.0, 0.3) == 0.3);
  CHECK(clip_scalar_relu(1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(clip_scalar(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(clip_scalar_relu(-1.0, 1.0), DomainError);
}

TEST_CASE("ReLU realization of the clip matches min/max") {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0})
    for (int i = 0; i <= 1000; ++i) {
      const double v = -3.0 * a + 6.0 * a * i / 1000.0;
      worst = std::max(worst, std::abs(clip_scalar_relu(a, v) - ref::clip(a, v)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("backprop by hand") {
  const auto p = two_layer(1.0, 2.0);
  const auto g = backprop(p, vec1(3.0), vec1(1.0));
  CHECK(g.weights[0](0, 0) == 6.0);
  CHECK(g.weights[1](0, 0) == 3.0);
  CHECK(g.biases[0](0) == 2.0);
  CHECK(g.biases[1](0) == 1.0);
}

TEST_CASE("zero upstream gives a zero gradient") {
  std::mt19937_64 rng(3);
  const auto c = ref::random_net_case(rng);
  const auto g = backprop(c.params, c.x, Eigen::VectorXd::Zero(c.upstream.size()));
  std::vector<double> flat;
  ref::append(flat, g);
  for (double v : flat) CHECK(v == 0.0);
}

TEST_CASE("backprop rejects a mismatched upstream") {
  const auto p = two_layer(1.0, 2.0);
  CHECK_THROWS_AS(backprop(p, vec1(1.0), Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST_CASE("backprop matches central differences on random networks") {
  std::mt19937_64 rng(20240);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) worst = std::max(worst, ref::net_case_error(ref::random_net_case(rng)));
  CHECK(worst < 1e-5);
}

TEST_CASE("projection clamps magnitude") {
  auto p = zero_mlp<double>(scalar_spec(1));
  p.spec.kappa = 1.0;
  p.weights[0](0, 0) = 2.5;
  const auto q = project_to_class(p);
  CHECK(q.weights[0](0, 0) == 1.0);
  CHECK(in_class(q));
}

TEST_CASE("projection keeps the largest entries under a sparsity budget") {
  NetClassSpec s;
  s.d_in = 1;
  s.depth = 1;
  s.sparsity = 1;
  auto p = zero_mlp<double>(s);
  p.weights[0](0, 0) = 0.9;
  p.biases[0](0) = -0.2;
  const auto q = project_to_class(p);
  CHECK(q.weights[0](0, 0) == 0.9);
  CHECK(q.biases[0](0) == 0.0);
}

TEST_CASE("projection is idempotent on the feasible set") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = ref::random_net_case(rng, 0.0);
    c.params.spec.sparsity = std::max<long long>(1, c.params.spec.dense_parameter_count() / 2);
    c.params.spec.kappa = 1.0;
    const auto once = project_to_class(c.params);
    CHECK(in_class(once));
    CHECK(param_distance(once, project_to_class(once)) == 0.0);
  }
}

TEST_CASE("class bounds from the closed forms") {
  auto cb = [](int L, int p, double kappa, double x) {
    NetClassSpec s;
    s.depth = L;
    s.width = p;
    s.kappa = kappa;
    return class_bounds(s, x);
  };
  auto a = cb(1, 1, 1.0, 1.0);
  CHECK(a.output_bound == 2.0);
  CHECK(a.param_lipschitz == 2.0);
  auto b = cb(2, 2, 2.0, 1.0);
  CHECK(b.output_bound == 36.0);
  CHECK(b.param_lipschitz == 36.0);
  auto c = cb(1, 1, 1.0, 0.0);
  CHECK(c.output_bound == 1.0);
  CHECK(c.param_lipschitz == 1.0);
  CHECK_THROWS_AS(cb(1, 1, 0.5, 1.0), DomainError);
}

TEST_CASE("random networks stay within the class bound") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    NetClassSpec s;
    s.d_in = 2;
    s.depth = 1 + trial % 4;
    s.width = 1 + trial % 5;
    s.sparsity = s.dense_parameter_count();
    s.kappa = 1.0;
    const auto p = random_mlp<double>(s, rng);
    const Eigen::VectorXd x = ref::random_vector(2, -1.0, 1.0, rng);
    CHECK(std::abs(forward_scalar(p, x)) <= class_bounds(s, x.cwiseAbs().maxCoeff()).output_bound);
  }
}
