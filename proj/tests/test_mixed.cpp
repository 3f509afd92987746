#include <doctest.h>

#include <cmath>

#include "mixw2/mixed.hpp"
#include "mixw2/rng.hpp"
#include "oracles.hpp"

using namespace mixw2;

TEST_CASE("hard_delta branch values") {
  CHECK(hard_delta(0.0, 4.0) == 0.0);
  CHECK(hard_delta(0.5, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hard_delta(0.3, 4.0) == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(hard_delta(0.3, 8.0) == doctest::Approx(0.72).epsilon(1e-15));
  CHECK(hard_delta(0.7, 4.0) == 1.0);
}

TEST_CASE("hard_delta symmetry, bounds, continuity at 1/2 for c=4") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-3.0, 3.0);
    const double v = hard_delta(u, 4.0);
    CHECK(v == hard_delta(-u, 4.0));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(hard_delta(0.5 - 1e-9, 4.0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("mixed_norm_sq hand values") {
  MixedMetricConfig cfg;
  cfg.d1 = 1;
  cfg.d = 2;
  cfg.lambda = 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 0.0;
  CHECK(mixed_norm_sq(y, cfg) == 0.0);

  cfg.lambda = 2.0;
  y << 1.0, 3.0;
  CHECK(mixed_norm_sq(y, cfg) == doctest::Approx(3.0).epsilon(1e-15));

  MixedMetricConfig pure;
  pure.d1 = 2;
  pure.d = 2;
  pure.lambda = 1.0;
  Eigen::VectorXd z(2);
  z << 3.0, 4.0;
  CHECK(mixed_norm_sq(z, pure) == doctest::Approx(25.0).epsilon(1e-15));
}

TEST_CASE("mixed_norm_sq rejects wrong dimension") {
  MixedMetricConfig cfg;
  cfg.d1 = 1;
  cfg.d = 2;
  Eigen::VectorXd y(3);
  y.setZero();
  CHECK_THROWS_AS(mixed_norm_sq(y, cfg), std::invalid_argument);
}

TEST_CASE("norm dominated by scaled euclidean norm") {
  // sqrt of the mixed norm vs max(2, sqrt(lambda)) * l2, 1000 random draws
  Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    MixedMetricConfig cfg;
    cfg.d1 = 1 + static_cast<int>(rng.uniform_index(3));
    cfg.d = cfg.d1 + static_cast<int>(rng.uniform_index(4));
    cfg.lambda = rng.uniform(0.1, 6.0);
    Eigen::VectorXd y(cfg.d);
    for (int i = 0; i < cfg.d; ++i) y[i] = rng.uniform(-4.0, 4.0);
    const double lhs = std::sqrt(mixed_norm_sq(y, cfg));
    const double rhs = std::max(2.0, std::sqrt(cfg.lambda)) * y.norm();
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("clamp_round hand values, idempotence, monotonicity") {
  CHECK(clamp_round(2.6, 0, 5) == 3);
  CHECK(clamp_round(7.2, 0, 5) == 5);
  CHECK(clamp_round(-1.4, 0, 5) == 0);
  CHECK(clamp_round(2.5, 0, 5) == 3);   // half away from zero
  CHECK(clamp_round(-0.5, -2, 5) == -1);
  Rng rng(3);
  int prev = -100;
  for (double v = -4.0; v <= 9.0; v += 0.013) {
    const int r = clamp_round(v, 0, 5);
    CHECK(clamp_round(static_cast<double>(r), 0, 5) == r);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("default_lambda") {
  // hand variance: cont parts {0} and {2} -> var 2
  std::vector<MixedSample> ys(2);
  ys[0].cont.resize(1);
  ys[0].cont << 0.0;
  ys[1].cont.resize(1);
  ys[1].cont << 2.0;
  CHECK(default_lambda(ys) == doctest::Approx(2.0).epsilon(1e-15));

  // degenerate data floors at 1e-12
  ys[1].cont << 0.0;
  CHECK(default_lambda(ys) == 1e-12);

  // no continuous block -> weight unused, defaults to 1
  std::vector<MixedSample> cat_only(3);
  for (auto& y : cat_only) {
    y.cont.resize(0);
    y.cat.resize(1);
    y.cat << 1;
  }
  CHECK(default_lambda(cat_only) == 1.0);
}

TEST_CASE("surrogate value equals hard value on integer predictions") {
  Rng rng(19);
  for (int rep = 0; rep < 1000; ++rep) {
    MixedMetricConfig cfg;
    cfg.d1 = static_cast<int>(rng.uniform_index(3));
    cfg.d = cfg.d1 + 1 + static_cast<int>(rng.uniform_index(3));
    cfg.lambda = rng.uniform(0.2, 4.0);
    cfg.cat_lo = -3;
    cfg.cat_hi = 6;
    const MixedSample y = oracles::random_mixed_sample(cfg.d1, cfg.cat_dims(), -3, 6, rng);
    const MixedSample z = oracles::random_mixed_sample(cfg.d1, cfg.cat_dims(), -3, 6, rng);
    const double surrogate = surrogate_cost_value(y, embed(z), cfg);
    const double hard = mixed_dist_sq(y, z, cfg);
    CHECK(surrogate == doctest::Approx(hard).epsilon(1e-12));
  }
}
