#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace asymptotica {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Relative singular-value cutoff used by the preimage step.
inline constexpr double kDefaultRankTol = 1e-10;

/// <v, w> = sum conj(v_i) w_i is linear in the second argument.
Complex inner(const Vec& v, const Vec& w);

/// One-based index of the last nonzero entry; 0 for the zero vector.
std::size_t support(const Vec& v);

/// Unit basis vector e_i with one-based index i.
Vec basis_vector(std::size_t dim, std::size_t i);

/// Complex vector with independent standard normal real and imaginary
/// parts, normalized to unit length. Deterministic for a given seed.
Vec random_unit_vector(std::size_t dim, std::uint64_t seed);

/// Random complex matrix with standard normal entries.
Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Haar-like random unitary (QR of a Gaussian matrix with phase fix).
Mat random_unitary(std::size_t dim, std::uint64_t seed);

double spectral_norm(const Mat& a);

/// Moore-Penrose pseudoinverse held in factored form. Singular values
/// below tol * sigma_max are treated as zero.
class Pseudoinverse {
 public:
  explicit Pseudoinverse(const Mat& a, double tol = kDefaultRankTol);

  Vec solve(const Vec& b) const;

  std::size_t rank() const { return rank_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const RealVec& singular_values() const { return sigma_; }
  /// Orthonormal basis of the column space (range) of the factored matrix.
  Mat range_basis() const { return u_.leftCols(static_cast<Eigen::Index>(rank_)); }
  /// Orthonormal basis of the null space.
  Mat kernel_basis() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t rank_ = 0;
  Mat u_;
  Mat v_;
  RealVec sigma_;
};

/// Minimal-norm least-squares solution of A x = b.
Vec min_norm_preimage(const Mat& a, const Vec& b, double tol = kDefaultRankTol);

struct EigSplit {
  Mat kernel_basis;  // columns: eigenvectors below the cutoff
  Mat range_basis;   // columns: the remaining eigenvectors
  RealVec eigenvalues;  // ascending
};

/// Splits a Hermitian PSD matrix into the eigenspace of (numerically) zero
/// eigenvalues and its orthogonal complement. The cutoff is
/// tol * max(lambda_max, floor).
EigSplit hermitian_eig_split(const Mat& g, double tol, double floor = 0.0);

/// Cosines of the principal angles between the column spans of two
/// matrices with orthonormal columns, in descending order.
RealVec principal_cosines(const Mat& a, const Mat& b);

/// Largest principal angle (radians) between two subspaces of equal
/// dimension; 0 when both are empty.
double max_principal_angle(const Mat& a, const Mat& b);

}  // namespace asymptotica
