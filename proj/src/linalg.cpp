#include "asymptotica/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace asymptotica {

Complex inner(const Vec& v, const Vec& w) {
  if (v.size() != w.size()) {
    throw DimensionError("inner: size mismatch");
  }
  return v.dot(w);  // Eigen conjugates the left operand
}

std::size_t support(const Vec& v) {
  for (Eigen::Index i = v.size(); i > 0; --i) {
    if (v(i - 1) != Complex(0.0, 0.0)) {
      return static_cast<std::size_t>(i);
    }
  }
  return 0;
}

Vec basis_vector(std::size_t dim, std::size_t i) {
  if (i == 0 || i > dim) {
    throw DimensionError("basis_vector: index " + std::to_string(i) +
                         " outside 1.." + std::to_string(dim));
  }
  Vec e = Vec::Zero(static_cast<Eigen::Index>(dim));
  e(static_cast<Eigen::Index>(i - 1)) = 1.0;
  return e;
}

Vec random_unit_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(gen);
    const double im = normal(gen);
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      a(i, j) = Complex(re, im);
    }
  }
  return a;
}

Mat random_unitary(std::size_t dim, std::uint64_t seed) {
  const Mat g = random_matrix(dim, dim, seed);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) {
      q.col(j) *= r(j, j) / mag;
    }
  }
  return q;
}

double spectral_norm(const Mat& a) {
  if (a.size() == 0) {
    return 0.0;
  }
  Eigen::BDCSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

Pseudoinverse::Pseudoinverse(const Mat& a, double tol)
    : rows_(static_cast<std::size_t>(a.rows())),
      cols_(static_cast<std::size_t>(a.cols())) {
  if (tol < 0.0) {
    throw Error("Pseudoinverse: negative tolerance");
  }
  if (a.size() == 0) {
    return;
  }
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  sigma_ = svd.singularValues();
  const double cutoff = tol * (sigma_.size() > 0 ? sigma_(0) : 0.0);
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    if (sigma_(i) > cutoff && sigma_(i) > 0.0) {
      ++rank_;
    }
  }
}

Vec Pseudoinverse::solve(const Vec& b) const {
  if (static_cast<std::size_t>(b.size()) != rows_) {
    throw DimensionError("min_norm_preimage: right-hand side has size " +
                         std::to_string(b.size()) + ", expected " +
                         std::to_string(rows_));
  }
  Vec x = Vec::Zero(static_cast<Eigen::Index>(cols_));
  if (rank_ == 0) {
    return x;
  }
  const auto r = static_cast<Eigen::Index>(rank_);
  Vec coeff = u_.leftCols(r).adjoint() * b;
  for (Eigen::Index i = 0; i < r; ++i) {
    coeff(i) /= sigma_(i);
  }
  x = v_.leftCols(r) * coeff;
  return x;
}

Mat Pseudoinverse::kernel_basis() const {
  const auto r = static_cast<Eigen::Index>(rank_);
  if (cols_ == 0) {
    return Mat(0, 0);
  }
  return v_.rightCols(static_cast<Eigen::Index>(cols_) - r);
}

Vec min_norm_preimage(const Mat& a, const Vec& b, double tol) {
  return Pseudoinverse(a, tol).solve(b);
}

EigSplit hermitian_eig_split(const Mat& g, double tol, double floor) {
  if (g.rows() != g.cols()) {
    throw DimensionError("hermitian_eig_split: matrix is not square");
  }
  if (tol < 0.0) {
    throw Error("hermitian_eig_split: negative tolerance");
  }
  EigSplit out;
  const Eigen::Index n = g.rows();
  if (n == 0) {
    out.kernel_basis = Mat(0, 0);
    out.range_basis = Mat(0, 0);
    return out;
  }
  const double scale = g.norm();
  const double skew = (g - g.adjoint()).norm();
  // Hermitian up to tolerance, with a floor at rounding level.
  if (skew > std::max(tol, 1e-14) * scale) {
    throw NumericalError("hermitian_eig_split: matrix is not Hermitian (skew " +
                         std::to_string(skew / scale) + " relative)");
  }
  const Mat sym = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig_split: eigensolver failed");
  }
  out.eigenvalues = eig.eigenvalues();
  const double lambda_max = std::max(out.eigenvalues(n - 1), 0.0);
  const double cutoff = tol * std::max(lambda_max, floor);
  Eigen::Index k = 0;
  while (k < n && !(out.eigenvalues(k) > cutoff && out.eigenvalues(k) > 0.0)) {
    ++k;
  }
  out.kernel_basis = eig.eigenvectors().leftCols(k);
  out.range_basis = eig.eigenvectors().rightCols(n - k);
  return out;
}

RealVec principal_cosines(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("principal_cosines: ambient dimensions differ");
  }
  if (a.cols() == 0 || b.cols() == 0) {
    return RealVec(0);
  }
  const Mat cross = a.adjoint() * b;
  Eigen::BDCSVD<Mat> svd(cross);
  RealVec c = svd.singularValues();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c(i) = std::min(c(i), 1.0);
  }
  return c;
}

double max_principal_angle(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) {
    return M_PI / 2;
  }
  if (a.cols() == 0) {
    return 0.0;
  }
  const RealVec c = principal_cosines(a, b);
  const double smallest = c.minCoeff();
  // acos is ill-conditioned near 1; the sine of the largest angle is the
  // norm of the residual of projecting b onto span(a).
  const Mat residual = b - a * (a.adjoint() * b);
  const double sine = std::min(spectral_norm(residual), 1.0);
  return smallest > 0.5 ? std::asin(sine) : std::acos(smallest);
}

}  // namespace asymptotica
