#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "asymptotica/operators.hpp"

using namespace asymptotica;

namespace {

Vec e(std::size_t dim, std::size_t i) { return basis_vector(dim, i); }

double adjoint_defect(const Operator& op, std::uint64_t seed) {
  const Vec x = random_unit_vector(op.dim(), seed);
  const Vec y = random_unit_vector(op.dim(), seed + 1);
  return std::abs(inner(op.apply(x), y) - inner(x, op.adjoint_apply(y)));
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("nk_sequence") {
  CHECK(nk_sequence(1) == 1);
  CHECK(nk_sequence(2) == 5);
  CHECK(nk_sequence(3) == 65);
  CHECK(nk_sequence(4) == 8645);
  CHECK(nk_sequence(5) == 149497985);
  CHECK_THROWS_AS(nk_sequence(0), Error);
  CHECK_THROWS(nk_sequence(40));
}

TEST_CASE("example1 weights") {
  const auto w = example1_weights(10);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 0.5);
  CHECK(w[2] == 0.5);
  CHECK(w[3] == 2.0);
  CHECK(w[4] == 2.0);
  CHECK(w[5] == 0.5);  // i = 6 opens the k = 2 segment
  CHECK(w[0] * w[1] * w[2] * w[3] * w[4] == 1.0);
  CHECK(example1_log2_weight(16) == Rational(1, 5));
  CHECK(example1_log2_weight(196) == Rational(1, 65));
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto ws = example1_weights(nk_sequence(k));
    double p = 1.0;
    for (double v : ws) p *= v;
    CHECK(std::abs(p - 1.0) <= 1e-12);
  }
}

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 5) + Rational(1, 65) == Rational(14, 65));
  CHECK(Rational(1, 3) - Rational(1, 2) < Rational(0));
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("forward shift") {
  const Operator s = example1(70);
  CHECK(s.kind() == OperatorKind::forward_shift);
  CHECK((s.apply(e(70, 1)) - e(70, 2)).norm() == 0.0);
  CHECK((s.adjoint_apply(e(70, 2)) - e(70, 1)).norm() == 0.0);
  CHECK(s.apply(e(70, 70)).norm() == 0.0);
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::size_t nk = nk_sequence(k);
    CHECK((s.apply_power(e(70, 1), nk) - e(70, nk + 1)).norm() < 1e-12);
  }
  CHECK(s.faithful(3, 67));
  CHECK_FALSE(s.faithful(3, 68));
  CHECK(s.faithful_horizon(e(70, 5)) == 65);
}

TEST_CASE("backward shift") {
  const Operator u = backward_shift(constant_weights(1.0), 3);
  CHECK((u.apply(e(3, 2)) - e(3, 1)).norm() == 0.0);
  CHECK(u.apply(e(3, 1)).norm() == 0.0);
  const Operator b2 = backward_shift(example3_weights(2), 8);
  const Vec y = b2.apply(e(8, 4));
  CHECK(std::abs(y(2) - std::pow(0.5, 1.0 / 6.0)) < 1e-15);
  CHECK(std::abs(y.norm() - y(2).real()) < 1e-15);
}

TEST_CASE("example3 weights") {
  for (double w : example3_weights(1).truncated(50)) CHECK(w == 1.0);
  CHECK(std::abs(example3_weights(4)(3) - std::pow(2.0, -1.0 / 3.0)) < 1e-15);
  for (std::size_t m : {3u, 10u, 100u}) {
    const auto w = example3_weights(7).truncated(m);
    double p = 1.0;
    for (double v : w) p *= v;
    CHECK(std::abs(p - std::pow(1.0 / 7.0, 0.5 - 1.0 / static_cast<double>(m))) < 1e-13);
  }
  for (std::size_t n = 1; n <= 64; ++n) {
    for (double w : example3_weights(n).truncated(64)) {
      CHECK(w > 0.0);
      CHECK(w <= 1.0);
    }
  }
}

TEST_CASE("example2") {
  const Operator t = example2_op(4);
  CHECK((t.apply(e(4, 1)) - e(4, 2)).norm() == 0.0);
  Vec want = Vec::Zero(4);
  want << 1, 1, 0, 0;
  CHECK((t.adjoint_apply(e(4, 2)) - want).norm() == 0.0);
  const Mat a = t.dense();
  CHECK(a * a == a);
  CHECK_THROWS_AS(example2_op(5), DimensionError);
}

TEST_CASE("volterra midpoint") {
  const std::size_t m = 64;
  const Operator v = volterra(m);
  const Mat a = v.dense();
  const Mat p = projection_constants(m).dense();
  CHECK((a + a.adjoint() - p).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm() == 0.0);
  const Vec ones = Vec::Ones(static_cast<Eigen::Index>(m));
  const RealVec grid = quadrature_grid(m, QuadratureScheme::midpoint);
  CHECK((v.apply(ones) - grid.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((v.apply(ones) - a * ones).norm() < 1e-12);
  // Eigenvalues of I - V_M have modulus <= 1 + 1/M.
  const Mat imv = Mat::Identity(m, m) - a;
  CHECK(imv.diagonal().cwiseAbs().maxCoeff() <= 1.0 + 1.0 / static_cast<double>(m));
}

TEST_CASE("volterra trapezoid converges to the integral") {
  const std::size_t m = 101;
  const Operator v = volterra(m, QuadratureScheme::trapezoid);
  const RealVec t = quadrature_grid(m, QuadratureScheme::trapezoid);
  const Vec f = t.cast<Complex>();
  const Vec got = v.apply(f);
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    CHECK(std::abs(got(j) - 0.5 * t(j) * t(j)) < 1e-12);
  }
  CHECK((v.adjoint_apply(f) - v.dense().adjoint() * f).norm() < 1e-12);
}

TEST_CASE("inverse of I + V and the multiplication operator") {
  const std::size_t m = 32;
  const Operator ipv = sum({identity(m), volterra(m)});
  const Operator inv = inverse_op(ipv);
  const Mat prod = compose(inv, ipv).dense();
  CHECK((prod - Mat::Identity(m, m)).norm() < 1e-10);
  const Operator ex = mult_exp(m);
  const Vec ones = Vec::Ones(m);
  const RealVec t = quadrature_grid(m, QuadratureScheme::midpoint);
  for (Eigen::Index j = 0; j < t.size(); ++j) CHECK(std::abs(ex.apply(ones)(j) - std::exp(t(j))) < 1e-14);
  CHECK((compose(inverse_op(ex), ex).dense() - Mat::Identity(m, m)).norm() < 1e-12);
  CHECK_THROWS(inverse_op(jordan_nilpotent(4)));
}

TEST_CASE("combinators") {
  const Operator d = direct_sum({identity(2), identity(2)});
  CHECK(d.dense() == Mat::Identity(4, 4));
  CHECK(d.blocks().size() == 2);
  CHECK(d.block_offsets()[1] == 2);

  const Operator u = diag_unitary(3, 9);
  const Operator b = block_lower_2x2(dense_op(Mat::Zero(2, 2)), Mat::Zero(3, 2), u);
  Vec x = Vec::Zero(5);
  x.tail(3) = random_unit_vector(3, 1);
  Vec want = Vec::Zero(5);
  want.tail(3) = u.apply(x.tail(3));
  CHECK((b.apply(x) - want).norm() < 1e-15);

  CHECK_THROWS_AS(sum({identity(2), identity(3)}), DimensionError);
  CHECK_THROWS_AS(compose(identity(2), identity(3)), DimensionError);
  CHECK_THROWS_AS(block_lower_2x2(identity(2), Mat::Zero(2, 2), identity(3)), DimensionError);

  const Operator s = scale(volterra(8), Complex(0, 2));
  CHECK((s.dense() - Complex(0, 2) * volterra(8).dense()).norm() < 1e-15);
  const Operator a = adjoint_op(example1(12));
  CHECK(a.kind() == OperatorKind::backward_shift);
  CHECK((a.dense() - example1(12).dense().adjoint()).norm() == 0.0);
}

TEST_CASE("similarity") {
  const std::size_t m = 16;
  const Operator e_op = mult_exp(m);
  const Operator t = volterra(m);
  const Operator s = similarity(e_op, t);
  const Mat ed = e_op.dense();
  CHECK((s.dense() - ed.inverse() * t.dense() * ed).norm() < 1e-12);
}

TEST_CASE("power-bound ingredients: example1 is not power-bounded") {
  // Exhaustive scan of weight products w_i ... w_{i+n-1}.
  const auto w = example1_weights(200);
  double best = 0.0;
  for (std::size_t n = 1; n <= 130; ++n) {
    for (std::size_t i = 0; i + n <= w.size(); ++i) {
      double p = 1.0;
      for (std::size_t j = i; j < i + n; ++j) p *= w[j];
      best = std::max(best, p);
    }
  }
  CHECK(best > 4.0);
}

TEST_CASE("zoo catalog names") {
  std::vector<std::string> names;
  for (const auto& z : zoo_catalog()) names.push_back(z.name);
  for (const char* n : {"forward_shift", "backward_shift", "example1", "example2", "example3",
                        "volterra", "mult_exp", "identity", "projection_constants", "sum",
                        "compose", "inverse", "adjoint", "scale", "direct_sum",
                        "block_lower_2x2"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
}

TEST_CASE("property: adjoint consistency across the zoo") {
  std::vector<Operator> ops{
      example1(40),
      backward_shift(example3_weights(3), 20),
      example2_op(10),
      example3(4, 8),
      volterra(17),
      volterra(17, QuadratureScheme::trapezoid),
      mult_exp(9),
      projection_constants(7),
      jordan_nilpotent(6),
      diag_unitary(11, 3),
      sum({identity(17), scale(volterra(17), -1.0)}),
      compose(volterra(12), mult_exp(12)),
      inverse_op(sum({identity(12), volterra(12)})),
      adjoint_op(example1(30)),
      block_lower_2x2(jordan_nilpotent(4), random_matrix(5, 4, 2), diag_unitary(5, 4)),
      similarity(mult_exp(10), volterra(10)),
      direct_sum({volterra(5), example2_op(4), scale(identity(3), Complex(0.3, 0.4))}),
  };
  std::uint64_t seed = 0;
  for (int round = 0; round < 12; ++round) {
    for (const auto& op : ops) {
      const double defect = adjoint_defect(op, seed += 2);
      CHECK(defect <= 1e-10 * std::max(1.0, spectral_norm(op.dense())));
      // Matrix-free apply agrees with the dense matrix.
      const Vec x = random_unit_vector(op.dim(), seed + 7);
      CHECK((op.apply(x) - op.dense() * x).norm() <= 1e-10 * std::max(1.0, spectral_norm(op.dense())));
    }
  }
}

TEST_CASE("shift support moves by one") {
  const Operator f = forward_shift(constant_weights(0.7), 12);
  const Operator b = backward_shift(constant_weights(0.7), 12);
  for (std::size_t i = 2; i < 12; ++i) {
    CHECK(support(f.apply(e(12, i))) == i + 1);
    CHECK(support(b.apply(e(12, i))) == i - 1);
  }
}

}  // TEST_SUITE
