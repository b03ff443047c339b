// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "tfn/error.hpp"
#include "tfn/gradcheck.hpp"
#include "tfn/ops.hpp"

using namespace tfn;
using namespace tfn::numkit;

TEST_CASE("matmul examples") {
  CHECK(matmul(Matrix::identity(2), Vector{1, 2}) == Vector{1, 2});
  CHECK(matmul(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}) == Vector{3, 7});
  CHECK(matmul(Matrix(1, 3), Vector{5, 6, 7}) == Vector{0});
  CHECK_THROWS_AS(matmul(Matrix(2, 3), Vector{1, 2}), DimensionError);
}

TEST_CASE("matmul agrees with a naive loop exactly") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng.below(20), c = 1 + rng.below(40);
    const Matrix a = testutil::random_matrix(rng, r, c);
    const Vector x = testutil::random_vector(rng, c);
    const Vector y = matmul(a, x);
    for (std::size_t i = 0; i < r; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < c; ++j) acc += a(i, j) * x[j];
      REQUIRE(y[i] == acc);
    }
  }
}

TEST_CASE("dense_forward examples") {
  CHECK(dense_forward(Matrix::identity(2), Vector{0, 0}, Vector{1, 2}) == Vector{1, 2});
  CHECK(dense_forward(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}, Vector{1, 1}) == Vector{4, 8});
  CHECK(dense_forward(Matrix{{2}}, Vector{-3}, Vector{1}) == Vector{-1});
  CHECK_THROWS_AS(dense_forward(Matrix(2, 2), Vector{1}, Vector{1, 1}), DimensionError);
}

TEST_CASE("dense_backward examples") {
  const auto g = dense_backward(Matrix{{2}}, Vector{3}, Vector{1});
  CHECK(g.grad_w == Matrix{{3}});
  CHECK(g.grad_b == Vector{1});
  CHECK(g.grad_x == Vector{2});

  Rng rng(3);
  const auto z = dense_backward(testutil::random_matrix(rng, 3, 4),
                                testutil::random_vector(rng, 4), Vector(3));
  CHECK(z.grad_w == Matrix(3, 4));
  CHECK(z.grad_b == Vector(3));
  CHECK(z.grad_x == Vector(4));
  CHECK_THROWS_AS(dense_backward(Matrix(2, 3), Vector(3), Vector(3)), DimensionError);
}

TEST_CASE("dense_backward matches finite differences for 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
    const Matrix w = testutil::random_matrix(rng, r, c);
    const Vector b = testutil::random_vector(rng, r);
    const Vector x = testutil::random_vector(rng, c);
    const Vector go = testutil::random_vector(rng, r);

    // theta = [W row-major, b, x]; f = go . dense_forward(W, b, x)
    std::vector<double> theta(w.values().begin(), w.values().end());
    theta.insert(theta.end(), b.values().begin(), b.values().end());
    theta.insert(theta.end(), x.values().begin(), x.values().end());
    const auto unpack = [&](std::span<const double> t, Matrix& w2, Vector& b2, Vector& x2) {
      w2 = Matrix(r, c);
      b2 = Vector(r);
      x2 = Vector(c);
      std::copy_n(t.begin(), r * c, w2.values().begin());
      std::copy_n(t.begin() + r * c, r, b2.values().begin());
      std::copy_n(t.begin() + r * c + r, c, x2.values().begin());
    };
    const auto f = [&](std::span<const double> t) {
      Matrix w2; Vector b2, x2;
      unpack(t, w2, b2, x2);
      const Vector y = dense_forward(w2, b2, x2);
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += go[i] * y[i];
      return s;
    };
    const auto grad = [&](std::span<const double> t) {
      Matrix w2; Vector b2, x2;
      unpack(t, w2, b2, x2);
      const auto g = dense_backward(w2, x2, go);
      std::vector<double> out(g.grad_w.values().begin(), g.grad_w.values().end());
      out.insert(out.end(), g.grad_b.values().begin(), g.grad_b.values().end());
      out.insert(out.end(), g.grad_x.values().begin(), g.grad_x.values().end());
      return out;
    };
    REQUIRE(grad_check(f, grad, theta) < 1e-5);
  }
}

TEST_CASE("batched dense kernels agree bit-for-bit with the single-sample ops") {
  Rng rng(11);
  for (const auto& [out, in, batch] : {std::tuple{5, 7, 1}, {13, 33, 8}, {128, 97, 11}, {3, 2145, 9}}) {
    const Matrix w = testutil::random_matrix(rng, out, in);
    const Vector b = testutil::random_vector(rng, out);
    const Matrix x = testutil::random_matrix(rng, batch, in);
    Matrix g = testutil::random_matrix(rng, batch, out);
    g(0, 0) = 0.0;  // exercise the skipped-zero path

    Matrix y;
    dense_forward_batch(w, b, x, y);
    Matrix gw(out, in);
    Vector gb(out);
    Matrix gx;
    dense_backward_batch(w, x, g, gw, gb, &gx);

    Matrix gw_ref(out, in);
    Vector gb_ref(out);
    for (int s = 0; s < batch; ++s) {
      const Vector xs(std::vector<double>(x.row(s).begin(), x.row(s).end()));
      const Vector gs(std::vector<double>(g.row(s).begin(), g.row(s).end()));
      const Vector ys = dense_forward(w, b, xs);
      const auto ref = dense_backward(w, xs, gs);
      for (int i = 0; i < out; ++i) REQUIRE(y(s, i) == ys[i]);
      for (int j = 0; j < in; ++j) REQUIRE(gx(s, j) == ref.grad_x[j]);
      for (int i = 0; i < out; ++i) {
        gb_ref[i] += ref.grad_b[i];
        for (int j = 0; j < in; ++j) gw_ref(i, j) += ref.grad_w(i, j);
      }
    }
    CHECK(gb == gb_ref);
    CHECK(gw == gw_ref);
  }
}

TEST_CASE("relu examples and backward mask") {
  const auto r = relu(Vector{-1, 0, 2});
  CHECK(r.y == Vector{0, 0, 2});
  CHECK(r.mask == Vector{0, 0, 1});
  CHECK(relu(Vector{-1, -2}).y == Vector{0, 0});
  CHECK(relu(Vector{1, 2}).y == Vector{1, 2});
  CHECK(relu_backward(Vector{5, 6, 7}, r.mask) == Vector{0, 0, 7});
}

TEST_CASE("sigmoid examples and symmetry") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(30.0) >= 1.0 - 1e-12);
  CHECK(sigmoid(30.0) < 1.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-40.0) > 0.0);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::isfinite(sigmoid(-1000.0)));
  double prev = 0.0;
  for (double s = -30.0; s <= 30.0; s += 0.01) {
    const double v = sigmoid(s);
    REQUIRE(v >= prev);
    REQUIRE(std::abs(sigmoid(-s) - (1.0 - v)) < 1e-15);
    prev = v;
  }
}

TEST_CASE("dropout") {
  Rng rng(5);
  const Vector x = testutil::random_vector(rng, 50);
  CHECK(dropout(x, 0.0, true, rng).y == x);
  const auto off = dropout(x, 0.7, false, rng);
  CHECK(off.y == x);
  CHECK(off.mask == Vector(50, 1.0));
  CHECK_THROWS_AS(dropout(x, 1.0, true, rng), ParameterError);
  CHECK_THROWS_AS(dropout(x, -0.1, true, rng), ParameterError);

  SUBCASE("law of large numbers at p = 0.2") {
    Rng r(2024);
    const auto d = dropout(Vector(100000, 1.0), 0.2, true, r);
    double sum = 0.0;
    std::size_t zeros = 0;
    for (double v : d.y.values()) {
      sum += v;
      zeros += v == 0.0;
      REQUIRE((v == 0.0 || v == 1.25));
    }
    CHECK(sum / 1e5 >= 0.99);
    CHECK(sum / 1e5 <= 1.01);
    CHECK(static_cast<double>(zeros) / 1e5 >= 0.195);
    CHECK(static_cast<double>(zeros) / 1e5 <= 0.205);
  }

  SUBCASE("expectation over 10^6 trials") {
    Rng r(77);
    const auto d = dropout(Vector(1000000, 3.0), 0.2, true, r);
    double sum = 0.0;
    for (double v : d.y.values()) sum += v;
    CHECK(std::abs(sum / 1e6 - 3.0) / 3.0 < 0.01);
  }
}

TEST_CASE("outer product") {
  CHECK(outer(Vector{1, 2}, Vector{3, 4}) == Matrix{{3, 4}, {6, 8}});
  CHECK(outer(Vector(3), Vector{1, 2}) == Matrix(3, 2));
  CHECK(outer(Vector{1}, Vector{1}) == Matrix{{1}});
  Rng rng(9);
  const Vector u = testutil::random_vector(rng, 17), v = testutil::random_vector(rng, 9);
  const Matrix m = outer(u, v);
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = 0; j < 9; ++j) REQUIRE(m(i, j) == u[i] * v[j]);
}

TEST_CASE("binary cross-entropy") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  CHECK(bce_loss(1.0, 1) <= 1e-6);
  CHECK(bce_loss(0.0, 0) <= 1e-6);
  CHECK(std::isfinite(bce_loss(0.0, 1)));
  CHECK(bce_loss(0.9, 0) == doctest::Approx(2.302585).epsilon(1e-6));
  CHECK(bce_logit_grad(0.7, 1) == doctest::Approx(-0.3));

  // d/ds bce(sigmoid(s), y) by finite differences
  for (double s : {-3.0, -0.2, 0.0, 1.5}) {
    for (int y : {0, 1}) {
      const double h = 1e-6;
      const double fd = (bce_loss(sigmoid(s + h), y) - bce_loss(sigmoid(s - h), y)) / (2 * h);
      CHECK(bce_logit_grad(sigmoid(s), y) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("grad_check examples") {
  const std::vector<double> x{3.0};
  const double sq = grad_check(
      [](std::span<const double> t) { return t[0] * t[0]; },
      [](std::span<const double> t) { return std::vector<double>{2 * t[0]}; }, x);
  CHECK(sq < 1e-8);

  const double lin = grad_check(
      [](std::span<const double> t) { return 2 * t[0] - 5 * t[1]; },
      [](std::span<const double>) { return std::vector<double>{2, -5}; },
      std::vector<double>{0.3, -1.2});
  CHECK(lin < 1e-9);

  const auto wrong = grad_check_detailed(
      [](std::span<const double> t) { return t[0] * t[1]; },
      [](std::span<const double> t) { return std::vector<double>{t[1], 2 * t[0]}; },
      std::vector<double>{1.0, 2.0});
  CHECK(wrong.max_rel_error > 0.1);
  CHECK(wrong.worst_index == 1);

  CHECK_THROWS_AS(grad_check([](std::span<const double> t) { return std::log(t[0]); },
                             [](std::span<const double> t) { return std::vector<double>{1 / t[0]}; },
                             std::vector<double>{0.0}),
                  NumericError);
  CHECK_THROWS_AS(grad_check([](std::span<const double>) { return 0.0; },
                             [](std::span<const double>) { return std::vector<double>{0.0}; },
                             std::vector<double>{1.0}, 0.0),
                  ParameterError);
}

TEST_CASE("rng stream for seed 42 matches the golden file") {
  std::ifstream golden(std::string(TFN_GOLDEN_DIR) + "/rng_seed42.txt");
  REQUIRE(golden);
  Rng rng(42);
  std::size_t n = 0;
  std::uint64_t expected = 0;
  while (golden >> expected) {
    REQUIRE(rng.next_u64() == expected);
    ++n;
  }
  CHECK(n == 1000);
}

TEST_CASE("rng forks are deterministic and independent of parent draws") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) a.next_u64();
  Rng fa = a.fork(3), fb = b.fork(3);
  for (int i = 0; i < 100; ++i) REQUIRE(fa.next_u64() == fb.next_u64());
  CHECK(Rng(42).fork(3).next_u64() != Rng(42).fork(4).next_u64());
  CHECK(Rng(42).fork(0).next_u64() != Rng(42).next_u64());
}

TEST_CASE("rng helpers stay in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(rng.below(7) < 7);
    REQUIRE(std::isfinite(rng.normal()));
  }
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / 200000) < 0.01);
  CHECK(std::abs(sq / 200000 - 1.0) < 0.02);
}

TEST_CASE("matrix construction guards") {
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), DimensionError);
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.shape() == "2x3");
  CHECK(m(1, 2) == 6);
  CHECK(m.all_finite());
}
