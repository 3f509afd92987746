#include <doctest.h>

#include <cmath>

#include "mixw2/rng.hpp"
#include "mixw2/tape.hpp"
#include "oracles.hpp"

using namespace mixw2;

TEST_CASE("primitive forward values") {
  Tape t;
  CHECK(t.value_scalar(t.gelu(t.scalar(0.0))) == 0.0);
  CHECK(t.value_scalar(t.relu(t.scalar(-1.0))) == 0.0);
  CHECK(t.value_scalar(t.cos(t.scalar(0.0))) == 1.0);
  CHECK(t.value_scalar(t.elu(t.scalar(-100.0), 1.0)) == doctest::Approx(-1.0));
  CHECK(t.value_scalar(t.leaky_relu(t.scalar(-2.0), 0.01)) == doctest::Approx(-0.02));
}

TEST_CASE("relu and abs subgradients at zero are zero") {
  Tape t;
  Var x = t.leaf(Eigen::MatrixXd::Zero(1, 1));
  t.backward(t.relu(x));
  CHECK(t.adjoint(x)(0, 0) == 0.0);
  t.backward(t.abs(x));
  CHECK(t.adjoint(x)(0, 0) == 0.0);
}

TEST_CASE("simple gradients") {
  Tape t;
  Eigen::MatrixXd w0(3, 1);
  w0 << 1.0, -2.0, 0.5;
  Var w = t.leaf(w0);
  Var loss = t.sum(t.square(w));
  t.backward(loss);
  CHECK(t.adjoint(w)(0, 0) == doctest::Approx(2.0));
  CHECK(t.adjoint(w)(1, 0) == doctest::Approx(-4.0));
  CHECK(t.adjoint(w)(2, 0) == doctest::Approx(1.0));

  // f(x) = x cos(x) at x = 0 -> gradient 1
  Tape t2;
  Var x = t2.leaf(Eigen::MatrixXd::Zero(1, 1));
  t2.backward(t2.cwise_mul(x, t2.cos(x)));
  CHECK(t2.adjoint(x)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("detach blocks gradient; straight-through construction has slope one") {
  Tape t;
  Eigen::MatrixXd x0(1, 1);
  x0 << 2.4;
  Var x = t.leaf(x0);
  Var d = t.detach(x);
  CHECK(t.value_scalar(d) == 2.4);
  t.backward(d);
  CHECK(t.adjoint(x)(0, 0) == 0.0);

  // x - detach(x - round(x))
  Var st = t.sub(x, t.detach(t.sub(x, t.round(x))));
  CHECK(t.value_scalar(st) == 2.0);
  t.backward(st);
  CHECK(t.adjoint(x)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("repeated backward gives identical gradients") {
  Tape t;
  Eigen::MatrixXd x0(2, 1);
  x0 << 0.3, -0.8;
  Var x = t.leaf(x0);
  Var loss = t.sum(t.cwise_mul(t.exp(x), t.cos(x)));
  t.backward(loss);
  const Eigen::MatrixXd g1 = t.adjoint(x);
  t.backward(loss);
  CHECK((t.adjoint(x) - g1).norm() == 0.0);
}

TEST_CASE("matmul and vstack shapes and gradients") {
  Tape t;
  Eigen::MatrixXd a0(2, 3);
  a0 << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd x0(3, 1);
  x0 << 1, 0, -1;
  Var a = t.leaf(a0);
  Var x = t.leaf(x0);
  Var y = t.matmul(a, x);
  CHECK(t.value(y)(0, 0) == doctest::Approx(-2.0));
  CHECK(t.value(y)(1, 0) == doctest::Approx(-2.0));
  Var stacked = t.vstack({y, x});
  CHECK(t.value(stacked).rows() == 5);
  t.backward(t.sum(stacked));
  // d(sum(Ax))/dA = ones * x^T ; plus x also appears directly in the stack
  CHECK(t.adjoint(a)(0, 0) == doctest::Approx(1.0));
  CHECK(t.adjoint(a)(1, 2) == doctest::Approx(-1.0));
  CHECK(t.adjoint(x)(0, 0) == doctest::Approx(1.0 + a0.col(0).sum()));
}

TEST_CASE("division by zero throws; nonscalar backward root throws") {
  Tape t;
  Var a = t.scalar(1.0);
  Var b = t.scalar(0.0);
  CHECK_THROWS_AS(t.cwise_div(a, b), std::domain_error);
  Var v = t.constant(Eigen::MatrixXd::Zero(2, 1));
  CHECK_THROWS_AS(t.backward(v), std::invalid_argument);
}

TEST_CASE("random 3-layer network gradient matches finite differences") {
  // independent plain-loop oracle, rel err < 1e-5 at step 1e-6
  Rng rng(99);
  oracles::PlainNet net;
  net.residual = true;
  net.act = oracles::gelu_ref;
  const int layers[4] = {2, 8, 8, 1};
  std::vector<Eigen::MatrixXd> eps;
  for (int l = 0; l < 3; ++l) {
    Eigen::MatrixXd m(layers[l + 1], layers[l]), s(layers[l + 1], layers[l]);
    Eigen::VectorXd b(layers[l + 1]);
    for (int k = 0; k < m.size(); ++k) m.data()[k] = rng.normal(0.0, 0.4);
    for (int k = 0; k < s.size(); ++k) s.data()[k] = rng.normal(0.0, 0.2);
    for (int k = 0; k < b.size(); ++k) b[k] = rng.normal(0.0, 0.1);
    net.mean.push_back(m);
    net.scale.push_back(s);
    net.bias.push_back(b);
    Eigen::MatrixXd e(layers[l + 1], layers[l]);
    for (int k = 0; k < e.size(); ++k) e.data()[k] = rng.normal();
    eps.push_back(e);
  }
  Eigen::VectorXd x(2);
  x << 0.7, -0.3;

  // taped forward with the same draw
  Tape t;
  std::vector<Var> vm, vs, vb;
  for (int l = 0; l < 3; ++l) {
    vm.push_back(t.leaf(net.mean[l]));
    vs.push_back(t.leaf(net.scale[l]));
    vb.push_back(t.leaf(net.bias[l]));
  }
  Var h = t.constant(x);
  for (int l = 0; l < 3; ++l) {
    Var w = t.gaussian_weight(vm[l], vs[l], eps[l]);
    Var z = t.add(t.matmul(w, h), vb[l]);
    if (l == 2) {
      h = z;
    } else {
      Var a = t.gelu(z);
      h = (l > 0) ? t.add(a, h) : a;
    }
  }
  CHECK(t.value(h).size() == 1);
  CHECK(t.value_scalar(h) ==
        doctest::Approx(net.forward(x, eps)[0]).epsilon(1e-12));
  t.backward(h);

  int checked = 0;
  for (int l = 0; l < 3; ++l) {
    for (int k = 0; k < std::min<int>(4, static_cast<int>(net.mean[l].size())); ++k) {
      auto probe = [&](std::vector<Eigen::MatrixXd> oracles::PlainNet::* block,
                       const Eigen::MatrixXd& grad) {
        auto f = [&](double v) {
          oracles::PlainNet copy = net;
          (copy.*block)[l].data()[k] = v;
          return copy.forward(x, eps)[0];
        };
        const double fd = oracles::central_diff(f, (net.*block)[l].data()[k]);
        if (std::abs(fd) > 1e-8) {
          CHECK(grad.data()[k] == doctest::Approx(fd).epsilon(1e-5));
          ++checked;
        }
      };
      probe(&oracles::PlainNet::mean, t.adjoint(vm[l]));
      probe(&oracles::PlainNet::scale, t.adjoint(vs[l]));
    }
    const double fd_bias = oracles::central_diff(
        [&](double v) {
          oracles::PlainNet copy = net;
          copy.bias[l][0] = v;
          return copy.forward(x, eps)[0];
        },
        net.bias[l][0]);
    CHECK(t.adjoint(vb[l])(0, 0) == doctest::Approx(fd_bias).epsilon(1e-5));
  }
  CHECK(checked > 10);
}
