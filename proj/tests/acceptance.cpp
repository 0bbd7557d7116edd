// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion-number ...]   (no arguments runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "asymptotica/backward.hpp"
#include "asymptotica/experiments.hpp"

using namespace asymptotica;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;
  std::function<Outcome()> body;
};

Outcome from_report(const Report& r) {
  if (const Check* f = r.first_failure()) {
    return {false, f->group + "/" + f->name + " value=" + format_real(f->value) +
                       " bound=" + format_real(f->bound)};
  }
  std::size_t n = 0;
  for (const auto& c : r.checks) n += c.informational ? 0 : 1;
  return {true, std::to_string(n) + " checks"};
}

Outcome verify_group(const char* case_name, const char* group) {
  VerifyOptions o;
  if (group) o.only_group = group;
  return from_report(verify(case_name, o));
}

Outcome verify_all(std::initializer_list<const char*> cases) {
  Outcome total{true, ""};
  for (const char* c : cases) {
    const Outcome o = verify_group(c, nullptr);
    total.detail += (total.detail.empty() ? "" : "; ") + std::string(c) + ": " + o.detail;
    total.passed = total.passed && o.passed;
  }
  return total;
}

Operator random_case_operator(std::uint64_t s) {
  const std::size_t d = 2 + s % 63;
  switch (s % 6) {
    case 0: return dense_op(random_matrix(d, d, s));
    case 1: return backward_shift(example3_weights(1 + s % 7), d);
    case 2: return sum({identity(d), volterra(d)});
    case 3: {
      std::vector<double> w(d - 1);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + static_cast<double>((i * 7 + s) % 5);
      return compose(forward_shift(list_weights(std::move(w)), d), diag_unitary(d, s));
    }
    case 4: return similarity(mult_exp(d), sum({identity(d), scale(volterra(d), -1.0)}));
    default:
      return block_lower_2x2(jordan_nilpotent(d / 2 + 1), random_matrix(d - d / 2, d / 2 + 1, s),
                             diag_unitary(d - d / 2, s + 1));
  }
}

// S (J + B) S^-1: nilpotent Jordan block J of size j, random B of size b.
Mat nilpotent_mix(std::size_t j, std::size_t b, std::uint64_t seed) {
  const std::size_t d = j + b;
  Mat core = Mat::Zero(d, d);
  core.topLeftCorner(j, j) = jordan_nilpotent(j).dense();
  core.bottomRightCorner(b, b) = random_matrix(b, b, seed);
  const Mat sim = random_matrix(d, d, seed + 1) + 8.0 * Mat::Identity(d, d);
  return sim * core * sim.inverse();
}

Vec in_range(const Mat& a, std::size_t power, std::uint64_t seed) {
  Vec x = random_unit_vector(static_cast<std::size_t>(a.rows()), seed);
  for (std::size_t k = 0; k < power; ++k) x = a * x;
  return x / x.norm();
}

Outcome property_suites() {
  const std::size_t cases = 200;
  std::size_t adjoint_bad = 0, chain_bad = 0, minimal_bad = 0, pinv_bad = 0;

  for (std::uint64_t s = 0; s < cases; ++s) {
    const Operator op = random_case_operator(s);
    const Vec x = random_unit_vector(op.dim(), s + 1000);
    const Vec y = random_unit_vector(op.dim(), s + 2000);
    const double scale_ref = spectral_norm(op.dense()) + 1.0;
    if (std::abs(inner(op.apply(x), y) - inner(x, op.adjoint_apply(y))) > 1e-12 * scale_ref) ++adjoint_bad;
  }

  for (std::uint64_t s = 0; s < cases; ++s) {
    const std::size_t d = 2 + s % 63;
    const std::size_t m = 1 + s % 5;
    const double rd = std::sqrt(static_cast<double>(d));
    const Mat a = s % 3 == 0   ? Mat(random_matrix(d, d, s) / rd + 1.5 * Mat::Identity(d, d))
                  : s % 3 == 1 ? random_unitary(d, s)
                               : nilpotent_mix(1 + d / 4, d - d / 4 - 1 + 1, s);
    const Operator op = dense_op(a);
    const Vec x = in_range(a, m + 1, s + 3000);  // stepwise needs ran T^{m+1}
    for (ChainMode mode : {ChainMode::stepwise, ChainMode::joint}) {
      const BackwardChain c = backward_chain(op, x, m, mode);
      for (std::size_t n = 0; n < m; ++n) {
        const double r = (op.apply(c.elements[n + 1]) - c.elements[n]).norm();
        if (r > c.chain_tol) ++chain_bad;
      }
    }
  }

  // Stepwise steps are minimal among preimages inside ran T^{m-n}. The
  // operators mix a nilpotent and an invertible part so that set is not
  // a single point.
  for (std::uint64_t s = 0; s < cases; ++s) {
    const std::size_t j = 2 + s % 8, b = 1 + s % 40, d = j + b;
    const Mat a = nilpotent_mix(j, b, s);
    const std::size_t m = 1 + s % 3;
    const Vec x = in_range(a, m + 1, s + 2);
    const BackwardChain c = backward_chain(dense_op(a), x, m, ChainMode::stepwise);
    for (std::size_t n = 0; n < m; ++n) {
      Mat pk = Mat::Identity(d, d);
      for (std::size_t k = 0; k < m - n; ++k) pk = a * pk;
      const Mat q = Pseudoinverse(pk).range_basis();
      const Mat free = q * Pseudoinverse(a * q).kernel_basis();
      if (free.cols() == 0) continue;
      const Vec z = c.elements[n + 1] +
                    free * random_unit_vector(static_cast<std::size_t>(free.cols()), s + 3 + n);
      if (!((a * z - c.elements[n]).norm() <= c.chain_tol &&
            c.elements[n + 1].norm() <= z.norm() + 1e-10)) {
        ++minimal_bad;
      }
    }
  }

  for (std::uint64_t s = 0; s < cases; ++s) {
    const std::size_t rows = 1 + s % 64;
    const std::size_t cols = 1 + (s * 7) % 64;
    const std::size_t rank = 1 + s % std::min(rows, cols);
    const Mat a = random_matrix(rows, rank, s) * random_matrix(rank, cols, s + 1);
    const Pseudoinverse p(a);
    Mat ap(cols, rows);
    for (std::size_t j = 0; j < rows; ++j) ap.col(static_cast<Eigen::Index>(j)) = p.solve(Mat::Identity(rows, rows).col(static_cast<Eigen::Index>(j)));
    const double na = a.norm(), np = ap.norm();
    const double tol = 1e-9;
    const bool ok = p.rank() == rank && (a * ap * a - a).norm() <= tol * na &&
                    (ap * a * ap - ap).norm() <= tol * np &&
                    ((a * ap).adjoint() - a * ap).norm() <= tol &&
                    ((ap * a).adjoint() - ap * a).norm() <= tol;
    if (!ok) ++pinv_bad;
  }

  const bool ok = adjoint_bad + chain_bad + minimal_bad + pinv_bad == 0;
  return {ok, "adjoint " + std::to_string(adjoint_bad) + " chain " + std::to_string(chain_bad) +
                  " minimality " + std::to_string(minimal_bad) + " pseudoinverse " +
                  std::to_string(pinv_bad) + " failures of " + std::to_string(cases) + " each"};
}

std::vector<Criterion> criteria() {
  return {
      {1, "example1-weight-identity", 1.0, [] { return verify_group("example1", "weights"); }},
      {2, "example1-decay-recipe", 60.0, [] { return verify_group("example1", "decay"); }},
      {3, "example1-non-stability-witness", 60.0, [] { return verify_group("example1", "witness"); }},
      {4, "example2", 1.0, [] { return verify_all({"example2"}); }},
      {5, "example3", 10.0, [] { return verify_all({"example3"}); }},
      {6, "example4-volterra", 30.0, [] { return verify_all({"example4"}); }},
      {7, "example5-volterra-inverse", 30.0, [] { return verify_all({"example5"}); }},
      {8, "decomposition-closed-forms", 5.0,
       [] { return verify_all({"corollary2", "theorem3", "theorem4"}); }},
      {9, "inverse-orbit-iff", 60.0, [] { return verify_all({"corollary5"}); }},
      {10, "triangular-blocks", 60.0, [] { return verify_all({"lemma6"}); }},
      {11, "constant-backward-chains", 5.0, [] { return verify_all({"theorem7"}); }},
      {12, "property-suites", 60.0, property_suites},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit) {
      o.passed = false;
      o.detail += "; runtime over " + format_real(c.time_limit) + " s";
    }
    std::printf("%s criterion %d %s (%.3f s) %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
