#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ssagcn/optim.hpp"

using namespace ssagcn;

namespace {

Tensor<double> scalar_param(double v) {
  DenseMatrix<double> m(1, 1);
  m << v;
  return Tensor<double>::param(m);
}

void set_grad(Tensor<double>& p, double g) {
  DenseMatrix<double> m(1, 1);
  m << g;
  p.node()->grad = m;
}

}  // namespace

TEST_CASE("sgd step") {
  std::vector<Tensor<double>> params{scalar_param(1.0)};
  Optimizer<double> opt(OptKind::SGD, 0.1);
  set_grad(params[0], 2.0);
  opt.step(params);
  CHECK(params[0].value()(0, 0) == doctest::Approx(0.8));
  CHECK_FALSE(params[0].has_grad());  // grads zeroed after the step
}

TEST_CASE("adam first step moves by -lr") {
  std::vector<Tensor<double>> params{scalar_param(0.0)};
  Optimizer<double> opt(OptKind::Adam, 0.01);
  set_grad(params[0], 1.0);
  opt.step(params);
  // bias correction makes m^ = sqrt(v^) = 1 up to epsilon
  CHECK(params[0].value()(0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
}

TEST_CASE("adagrad first step") {
  std::vector<Tensor<double>> params{scalar_param(0.0)};
  Optimizer<double> opt(OptKind::Adagrad, 1.0);
  set_grad(params[0], 3.0);
  opt.step(params);
  // accumulated g^2 = 9 -> delta = -3/sqrt(9)
  CHECK(params[0].value()(0, 0) == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("missing gradient is an error") {
  std::vector<Tensor<double>> params{scalar_param(1.0)};
  Optimizer<double> opt(OptKind::SGD, 0.1);
  CHECK_THROWS_AS(opt.step(params), ValueError);
}

TEST_CASE("weight decay adds an L2 pull") {
  std::vector<Tensor<double>> params{scalar_param(2.0)};
  Optimizer<double> opt(OptKind::SGD, 0.1, 0.5);
  set_grad(params[0], 0.0);
  opt.step(params);
  CHECK(params[0].value()(0, 0) == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0));
}
