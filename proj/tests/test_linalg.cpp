#include <doctest.h>

#include "asymptotica/linalg.hpp"

using namespace asymptotica;

namespace {

Vec vec(std::initializer_list<Complex> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("inner product is conjugate-linear in the first slot") {
  const Vec v = vec({{0, 1}, 2});
  const Vec w = vec({1, {0, 1}});
  // conj(i)*1 + 2*i = -i + 2i = i
  CHECK(std::abs(inner(v, w) - Complex(0, 1)) < 1e-15);
}

TEST_CASE("support and basis vectors") {
  CHECK(support(Vec::Zero(4)) == 0);
  CHECK(support(basis_vector(5, 3)) == 3);
  CHECK(support(vec({1, 0, 2, 0})) == 3);
  CHECK_THROWS_AS(basis_vector(3, 0), DimensionError);
  CHECK_THROWS_AS(basis_vector(3, 4), DimensionError);
}

TEST_CASE("random vectors are unit and reproducible") {
  const Vec a = random_unit_vector(10, 42);
  const Vec b = random_unit_vector(10, 42);
  CHECK(a == b);
  CHECK(std::abs(a.norm() - 1.0) < 1e-14);
  CHECK(a != random_unit_vector(10, 43));
  const Mat u = random_unitary(12, 5);
  CHECK((u.adjoint() * u - Mat::Identity(12, 12)).norm() < 1e-12);
}

TEST_CASE("min_norm_preimage examples") {
  SUBCASE("identity") {
    const Vec b = vec({3, {0, 4}});
    CHECK((min_norm_preimage(Mat::Identity(2, 2), b) - b).norm() < 1e-15);
  }
  SUBCASE("diag(2, 0)") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 2;
    const Vec x = min_norm_preimage(a, vec({4, 0}));
    CHECK((x - vec({2, 0})).norm() < 1e-15);
  }
  SUBCASE("zero map gives zero with residual ||b||") {
    const Mat a = Mat::Zero(2, 2);
    const Vec b = vec({1, 1});
    const Vec x = min_norm_preimage(a, b);
    CHECK(x.norm() == 0.0);
    CHECK(std::abs((a * x - b).norm() - std::sqrt(2.0)) < 1e-15);
  }
  SUBCASE("zero right-hand side") {
    CHECK(min_norm_preimage(random_matrix(3, 3, 1), Vec::Zero(3)).norm() == 0.0);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(min_norm_preimage(Mat::Identity(2, 2), Vec::Zero(3)), DimensionError);
  }
}

TEST_CASE("pseudoinverse rank and bases") {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = 1;
  a(1, 1) = 1e-12;  // below the relative cutoff
  a(2, 2) = 5;
  const Pseudoinverse p(a);
  CHECK(p.rank() == 2);
  CHECK(p.kernel_basis().cols() == 1);
  CHECK(std::abs(p.kernel_basis()(1, 0)) > 1 - 1e-12);
  CHECK(p.range_basis().cols() == 2);
}

TEST_CASE("hermitian_eig_split examples") {
  SUBCASE("diag(1, 0)") {
    Mat g = Mat::Zero(2, 2);
    g(0, 0) = 1;
    const EigSplit s = hermitian_eig_split(g, 1e-8);
    REQUIRE(s.kernel_basis.cols() == 1);
    REQUIRE(s.range_basis.cols() == 1);
    CHECK(std::abs(s.kernel_basis(1, 0)) > 1 - 1e-14);
    CHECK(std::abs(s.range_basis(0, 0)) > 1 - 1e-14);
  }
  SUBCASE("identity") {
    const EigSplit s = hermitian_eig_split(Mat::Identity(3, 3), 1e-8);
    CHECK(s.kernel_basis.cols() == 0);
    CHECK(s.range_basis.cols() == 3);
  }
  SUBCASE("rank-one projection onto (1,1)/sqrt2") {
    const Mat g = Mat::Constant(2, 2, 0.5);
    const EigSplit s = hermitian_eig_split(g, 1e-8);
    REQUIRE(s.kernel_basis.cols() == 1);
    const Complex k0 = s.kernel_basis(0, 0), k1 = s.kernel_basis(1, 0);
    CHECK(std::abs(k0 + k1) < 1e-14);
    CHECK(std::abs(std::abs(k0) - std::sqrt(0.5)) < 1e-14);
    CHECK(std::abs(s.range_basis(0, 0) - s.range_basis(1, 0)) < 1e-14);
  }
  SUBCASE("zero matrix is all kernel") {
    const EigSplit s = hermitian_eig_split(Mat::Zero(3, 3), 1e-8);
    CHECK(s.kernel_basis.cols() == 3);
  }
  SUBCASE("non-Hermitian input") {
    Mat g = Mat::Identity(2, 2);
    g(0, 1) = 1;
    CHECK_THROWS_AS(hermitian_eig_split(g, 1e-8), NumericalError);
  }
}

TEST_CASE("principal angles") {
  const Mat id = Mat::Identity(4, 4);
  CHECK(max_principal_angle(id.leftCols(2), id.leftCols(2)) < 1e-15);
  CHECK(std::abs(max_principal_angle(id.leftCols(1), id.col(1)) - M_PI / 2) < 1e-12);
  Mat tilted = Mat::Zero(4, 1);
  tilted(0, 0) = std::cos(1e-7);
  tilted(1, 0) = std::sin(1e-7);
  CHECK(std::abs(max_principal_angle(id.leftCols(1), tilted) - 1e-7) < 1e-15);
  CHECK(max_principal_angle(Mat(4, 0), Mat(4, 0)) == 0.0);
}

TEST_CASE("property: minimal-norm preimage beats random alternatives") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t rows = 2 + seed % 30, cols = 2 + (seed * 7) % 30;
    // Rank-deficient A so alternatives exist.
    const std::size_t r = 1 + seed % std::min(rows, cols);
    const Mat a = random_matrix(rows, r, seed) * random_matrix(r, cols, seed + 1000);
    const Vec b = a * random_unit_vector(cols, seed + 2000);
    const Vec x = min_norm_preimage(a, b);
    const double res = (a * x - b).norm();
    CHECK(res <= 1e-9 * b.norm());
    const Mat kernel = Pseudoinverse(a).kernel_basis();
    if (kernel.cols() == 0) continue;
    const Vec z = x + kernel * random_unit_vector(static_cast<std::size_t>(kernel.cols()), seed + 3000);
    CHECK((a * z - b).norm() <= res + 1e-9 * b.norm());
    CHECK(x.norm() <= z.norm() + 1e-12);
  }
}

TEST_CASE("property: eigen split reconstructs G") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed * 10;  // up to 195
    const Mat b = random_matrix(n, n / 2, seed);
    const Mat g = b * b.adjoint();
    const EigSplit s = hermitian_eig_split(g, 1e-8);
    Mat q(static_cast<Eigen::Index>(n), s.kernel_basis.cols() + s.range_basis.cols());
    q << s.kernel_basis, s.range_basis;
    const Mat rec = q * s.eigenvalues.cast<Complex>().asDiagonal() * q.adjoint();
    CHECK((rec - g).norm() <= 1e-10 * g.norm());
    CHECK(s.kernel_basis.cols() == static_cast<Eigen::Index>(n - n / 2));
  }
}

TEST_CASE("property: adjoint consistency of dense matrices") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 64;
    const Mat a = random_matrix(n, n, seed);
    const Vec v = random_unit_vector(n, seed + 1), w = random_unit_vector(n, seed + 2);
    const double err = std::abs(inner(a * v, w) - inner(v, a.adjoint() * w));
    CHECK(err <= 1e-12 * spectral_norm(a));
  }
}

}  // TEST_SUITE
