#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mixw2/rng.hpp"

using mixw2::Rng;

TEST_CASE("seeded streams reproduce exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng s1 = Rng(7).stream(1, 2);
  Rng s2 = Rng(7).stream(1, 2);
  for (int i = 0; i < 20; ++i) CHECK(s1.normal() == s2.normal());
}

TEST_CASE("stream derivation ignores draw history") {
  Rng a(9);
  a.next_u64();
  a.next_u64();
  Rng fresh(9);
  CHECK(a.stream(3).next_u64() == fresh.stream(3).next_u64());
  CHECK(a.stream(3).next_u64() != a.stream(4).next_u64());
}

TEST_CASE("normal moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("uniform01 range and uniform_index coverage") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) seen[rng.uniform_index(7)] += 1;
  for (int count : seen) CHECK(count > 700);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(11);
  std::vector<int> xs(50);
  for (int i = 0; i < 50; ++i) xs[i] = i;
  rng.shuffle(xs);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}
