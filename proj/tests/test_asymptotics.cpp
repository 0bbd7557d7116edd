#include <doctest.h>

#include <cmath>

#include "asymptotica/asymptotics.hpp"

using namespace asymptotica;

namespace {

Operator half_identity(std::size_t dim) { return scale(identity(dim), 0.5); }

Operator contraction_plus_unitary(std::size_t k, std::size_t u) {
  return direct_sum({half_identity(k), diag_unitary(u, 21)});
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("orbit of half identity decays geometrically") {
  const OrbitRecord rec = orbit(half_identity(4), basis_vector(4, 1), 60, Direction::forward);
  REQUIRE(rec.norms.size() == 61);
  CHECK(rec.norms[0] == 1.0);
  for (std::size_t n = 0; n <= 60; ++n) CHECK(rec.norms[n] == std::ldexp(1.0, -static_cast<int>(n)));
  CHECK(rec.verdict == OrbitVerdict::decaying);
}

TEST_CASE("orbit of a diagonal unitary is bounded below") {
  Vec d(2);
  d << Complex(0, 1), -1.0;
  const Operator u = diagonal(d);
  const Vec x = random_unit_vector(2, 3) * 2.5;
  const OrbitRecord rec = orbit(u, x, 100, Direction::adjoint);
  for (double v : rec.norms) CHECK(std::abs(v - 2.5) < 1e-13);
  CHECK(rec.verdict == OrbitVerdict::bounded_below);
}

TEST_CASE("orbit errors and growth") {
  CHECK_THROWS(orbit(identity(3), Vec::Zero(3), 5, Direction::forward));
  CHECK_THROWS(orbit(identity(3), basis_vector(3, 1), 0, Direction::forward));
  const OrbitRecord g = orbit(scale(identity(2), 2.0), basis_vector(2, 1), 10, Direction::forward);
  CHECK(g.verdict == OrbitVerdict::growing);
  // Huge growth stops early instead of overflowing.
  const OrbitRecord big = orbit(scale(identity(2), 1e10), basis_vector(2, 1), 1000, Direction::forward);
  CHECK(big.norms.size() < 20);
  CHECK(big.verdict == OrbitVerdict::growing);
}

TEST_CASE("classify_norms thresholds") {
  const VerdictThresholds t;
  const std::vector<double> decay{1, 1e-3, 1e-7, 1e-9};
  CHECK(classify_norms(decay, 1.0, t) == OrbitVerdict::decaying);
  // Dips below the threshold but comes back: the envelope check refuses.
  const std::vector<double> bounce{1, 1e-7, 0.5};
  CHECK(classify_norms(bounce, 1.0, t) == OrbitVerdict::inconclusive);
  const std::vector<double> mid{1, 1e-4, 1e-4};
  CHECK(classify_norms(mid, 1.0, t) == OrbitVerdict::inconclusive);
  const std::vector<double> single{1};
  CHECK(classify_norms(single, 1.0, t) == OrbitVerdict::inconclusive);
}

TEST_CASE("example1 decay recipe on the forward orbit") {
  const std::size_t n = 65, dim = 2 * n + 2;
  const Operator s = example1(dim);
  const OrbitRecord rec = orbit(s, basis_vector(dim, 1), 2 * n, Direction::forward);
  CHECK(rec.norms[2 * n] * rec.norms[2 * n] <= 0.1);
  CHECK(rec.norms[n] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orbit norms agree with dense powering inside the faithful window") {
  const Operator s = backward_shift(example3_weights(5), 30);
  const Mat a = s.dense();
  const Vec x = random_unit_vector(30, 8);
  const OrbitRecord rec = orbit(s, x, 40, Direction::adjoint);
  Vec v = x;
  for (std::size_t n = 1; n < rec.norms.size(); ++n) {
    v = a.adjoint() * v;
    CHECK(std::abs(v.norm() - rec.norms[n]) <= 1e-10);
  }
  CHECK(rec.faithful_horizon == 0);  // full support leaves no window for the forward shift
}

TEST_CASE("power_bound_estimate") {
  SUBCASE("contraction") {
    const PowerBound pb = power_bound_estimate(example3(6, 16), 10);
    CHECK(pb.m_est <= 1.0 + 1e-10);
  }
  SUBCASE("example2 is flat") {
    const PowerBound pb = power_bound_estimate(example2_op(8), 12);
    for (double v : pb.power_norms) CHECK(std::abs(v - pb.power_norms[0]) < 1e-12);
    CHECK(pb.power_norms[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("example1 is not power-bounded") {
    const PowerBound pb = power_bound_estimate(example1(200), 20);
    CHECK(pb.m_est >= 4.0);
    CHECK(pb.method == "shift-columns");
  }
  SUBCASE("large dense operator uses power iteration") {
    const PowerBound pb = power_bound_estimate(scale(volterra(600), 1.0), 2);
    const double exact = spectral_norm(volterra(600).dense());
    CHECK(pb.method == "power-iteration");
    CHECK(pb.power_norms[0] == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("asymptote_gram examples") {
  SUBCASE("unitary gives the identity") {
    const Operator u = dense_op(random_unitary(6, 2));
    const AsymptoteGram g = asymptote_gram(u, 32);
    CHECK((g.average - Mat::Identity(6, 6)).norm() < 1e-12);
    CHECK(g.kernel_basis.cols() == 0);
    CHECK_FALSE(g.glim_unresolved);
  }
  SUBCASE("strict contraction has everything in the kernel") {
    const AsymptoteGram g = asymptote_gram(half_identity(3), 64);
    CHECK(g.kernel_basis.cols() == 3);
  }
  SUBCASE("block split") {
    const AsymptoteGram g = asymptote_gram(contraction_plus_unitary(1, 1), 64);
    REQUIRE(g.kernel_basis.cols() == 1);
    CHECK(std::abs(g.kernel_basis(0, 0)) > 1 - 1e-12);
    CHECK(std::abs(g.range_basis(1, 0)) > 1 - 1e-12);
  }
  SUBCASE("errors") {
    CHECK_THROWS(asymptote_gram(identity(3), 4));
    CHECK_THROWS_AS(asymptote_gram(identity(kMaxGramDim + 1), 8), DimensionError);
  }
  SUBCASE("growth warning") {
    const AsymptoteGram g = asymptote_gram(scale(identity(2), 1.1), 16);
    CHECK(g.warning.has_value());
  }
  SUBCASE("Hermitian PSD with nonnegative seminorm") {
    const AsymptoteGram g = asymptote_gram(example2_op(6), 16);
    CHECK((g.average - g.average.adjoint()).norm() < 1e-12);
    CHECK(g.eigenvalues.minCoeff() > -1e-10);
    for (std::uint64_t s = 0; s < 10; ++s) CHECK(g.seminorm_sq(random_unit_vector(6, s)) >= 0.0);
  }
}

TEST_CASE("stable_subspace cross-validates") {
  const Mat st = stable_subspace(contraction_plus_unitary(3, 2), 64);
  CHECK(st.cols() == 3);
  CHECK(stable_subspace(dense_op(random_unitary(4, 1)), 32).cols() == 0);
}

TEST_CASE("seminorm is non-increasing in N for contractions") {
  const Operator t = sum({identity(16), scale(volterra(16), -1.0)});
  const Operator c = scale(t, 1.0 / spectral_norm(t.dense()));
  const Vec x = random_unit_vector(16, 4);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    const double v = asymptote_gram(c, n).seminorm_sq(x);
    CHECK(v <= prev + 1e-10);
    prev = v;
  }
}

TEST_CASE("decompose_corollary") {
  SUBCASE("unitary") {
    const auto d = decompose_corollary(dense_op(random_unitary(5, 3)), 32);
    CHECK(d.stable_basis.cols() == 0);
    CHECK(d.mt_closure_basis.cols() == 5);
    CHECK(d.mt_confirmed == 5);
  }
  SUBCASE("nilpotent") {
    const auto d = decompose_corollary(jordan_nilpotent(4), 32);
    CHECK(d.stable_basis.cols() == 4);
    CHECK(d.mt_closure_basis.cols() == 0);
  }
  SUBCASE("contraction plus unitary, dim 40") {
    const auto d = decompose_corollary(contraction_plus_unitary(20, 20), 64);
    const Mat id = Mat::Identity(40, 40);
    REQUIRE(d.stable_basis.cols() == 20);
    CHECK(max_principal_angle(d.stable_basis, id.leftCols(20)) <= 1e-6);
    CHECK(max_principal_angle(d.mt_closure_basis, id.rightCols(20)) <= 1e-6);
    CHECK_FALSE(d.defect_flagged);
    Mat stacked(40, 40);
    stacked << d.stable_basis, d.mt_closure_basis;
    const RealVec sv = Eigen::BDCSVD<Mat>(stacked).singularValues();
    CHECK(sv(sv.size() - 1) > 1 - 1e-6);
  }
}

TEST_CASE("classify") {
  SUBCASE("backward unit shift hits zero") {
    const Operator b = backward_shift(constant_weights(1.0), 64);
    std::vector<Vec> samples;
    for (std::size_t i = 1; i <= 8; ++i) samples.push_back(basis_vector(64, i));
    const auto rep = classify(b, samples, 16);
    CHECK(rep.evidence.c0_dot);
    for (const auto& r : rep.forward) CHECK(r.norms.back() == 0.0);
    CHECK(rep.stability_propagation_ok);
  }
  SUBCASE("example2 is not C.0") {
    const Operator t = example2_op(8);
    const std::vector<Vec> samples{t.adjoint_apply(basis_vector(8, 2))};
    const auto rep = classify(t, samples, 50);
    CHECK(rep.evidence.not_dot_c0);
    CHECK_FALSE(rep.evidence.dot_c0);
  }
  SUBCASE("example3 is C.1 inside the window") {
    const Operator t = example3(8, 32);
    Vec x = Vec::Zero(8 * 32);
    for (std::size_t n = 0; n < 8; ++n) x(static_cast<Eigen::Index>(n * 32)) = 1.0 / (n + 1.0);
    const std::vector<Vec> samples{x};
    const auto rep = classify(t, samples, 30);
    CHECK(rep.evidence.dot_c1);
  }
  SUBCASE("unitary never gives stable evidence") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Operator u = dense_op(random_unitary(6, s));
      std::vector<Vec> samples{random_unit_vector(6, s + 10), random_unit_vector(6, s + 11)};
      const auto rep = classify(u, samples, 100);
      CHECK_FALSE(rep.evidence.c0_dot);
      CHECK_FALSE(rep.evidence.dot_c0);
    }
  }
  SUBCASE("mixed verdicts") {
    const Operator op = contraction_plus_unitary(1, 1);
    std::vector<Vec> samples{basis_vector(2, 1), basis_vector(2, 2)};
    CHECK(classify(op, samples, 60).evidence.mixed);
  }
}

TEST_CASE("property: stability propagation for power-bounded operators") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Operator t = sum({identity(12), scale(volterra(12), -1.0)});
    const Operator op = s % 2 ? t : similarity(mult_exp(12), t);
    std::vector<Vec> samples{random_unit_vector(12, s)};
    const auto rep = classify(op, samples, 60);
    CHECK(rep.stability_propagation_ok);
  }
}

TEST_CASE("kerchy_blocks") {
  SUBCASE("strict contraction") {
    const auto kb = kerchy_blocks(half_identity(4), 64);
    CHECK(kb.stable_basis.cols() == 4);
    CHECK(kb.t22.size() == 0);
    CHECK(kb.t11_decaying);
  }
  SUBCASE("unitary") {
    const auto kb = kerchy_blocks(dense_op(random_unitary(4, 7)), 32);
    CHECK(kb.stable_basis.cols() == 0);
    CHECK(kb.t11.size() == 0);
    CHECK(kb.t22_bounded_below);
  }
  SUBCASE("Jordan plus unitary recovers the blocks") {
    const auto kb = kerchy_blocks(direct_sum({jordan_nilpotent(4), diag_unitary(3, 2)}), 32);
    REQUIRE(kb.stable_basis.cols() == 4);
    CHECK(max_principal_angle(kb.stable_basis, Mat::Identity(7, 7).leftCols(4)) <= 1e-8);
    CHECK(kb.leak_norm <= 1e-8);
    CHECK(kb.t11_decaying);
    CHECK(kb.t22_bounded_below);
  }
  SUBCASE("lower coupling keeps N invariant") {
    const Operator op = block_lower_2x2(jordan_nilpotent(5), random_matrix(5, 5, 1), diag_unitary(5, 2));
    const auto kb = kerchy_blocks(op, 64);
    CHECK(kb.stable_basis.cols() == 5);
    CHECK(kb.leak_norm <= kKerchyLeakTol);
  }
}

}  // TEST_SUITE
