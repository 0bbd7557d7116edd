#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asymptotica/linalg.hpp"

namespace asymptotica {

enum class OperatorKind {
  forward_shift,
  backward_shift,
  dense,
  volterra,
  direct_sum,
  block_2x2,
  inverse,
  similarity,
  idempotent_pairsum,
};

std::string_view to_string(OperatorKind kind);

enum class QuadratureScheme { midpoint, trapezoid };

std::string_view to_string(QuadratureScheme scheme);
QuadratureScheme parse_scheme(std::string_view name);

// Faithful horizon value meaning "every power is exact".
inline constexpr std::size_t kUnboundedHorizon = std::numeric_limits<std::size_t>::max();

/// Positive shift weights w_1, w_2, ... indexed from one.
struct WeightSchedule {
  std::function<double(std::size_t)> generator;
  std::string description;

  double operator()(std::size_t i) const { return generator(i); }
  std::vector<double> truncated(std::size_t count) const;
};

/// Exact rational number num/den with den > 0, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator-() const { return {-num, den}; }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  std::strong_ordering operator<=>(const Rational& o) const;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// N_1 = 1, N_{k+1} = 3 N_k + 2 N_k^2. Throws for k = 0 or on overflow.
std::uint64_t nk_sequence(std::size_t k);

/// Block-structured weights: w_1 = 1, w_i = 1/2 on (N_k, 3N_k] and
/// w_i = 2^{1/N_k} on (3N_k, N_{k+1}].
WeightSchedule example1_weights();
std::vector<double> example1_weights(std::size_t count);

/// log2 of the i-th Example 1 weight, exactly. Every weight is a power of two.
Rational example1_log2_weight(std::size_t i);

/// w_1 = w_2 = 1, w_i = (1/n)^{1/(i-1) - 1/i} for i > 2.
WeightSchedule example3_weights(std::size_t n);

WeightSchedule constant_weights(double value);
WeightSchedule list_weights(std::vector<double> values);

namespace detail {

class Node {
 public:
  virtual ~Node() = default;
  virtual std::size_t dim() const = 0;
  virtual OperatorKind kind() const = 0;
  virtual std::string label() const = 0;
  virtual Vec apply(const Vec& x) const = 0;
  virtual Vec adjoint_apply(const Vec& y) const = 0;
  virtual std::size_t faithful_horizon(const Vec& x) const;
  virtual bool faithful(std::size_t support, std::size_t power) const;
  virtual std::optional<double> norm_bound_hint() const { return std::nullopt; }
  virtual Mat dense() const;
};

}  // namespace detail

class Operator;

/// Shift data exposed for the exact column-norm routes.
struct ShiftView {
  bool forward = true;
  std::span<const double> weights;  // w_1 .. w_{dim-1}
  Complex factor{1.0, 0.0};
};

/// Immutable handle on a finite truncation of a Hilbert-space operator.
/// Copies share the underlying node; all methods are const and thread-safe.
class Operator {
 public:
  explicit Operator(std::shared_ptr<const detail::Node> node);

  std::size_t dim() const { return node_->dim(); }
  OperatorKind kind() const { return node_->kind(); }
  std::string label() const { return node_->label(); }

  Vec apply(const Vec& x) const;
  Vec adjoint_apply(const Vec& y) const;
  /// T^n x by repeated application.
  Vec apply_power(const Vec& x, std::size_t n) const;
  Vec adjoint_apply_power(const Vec& y, std::size_t n) const;

  /// Whether T^n on vectors supported in the first s coordinates agrees
  /// with the untruncated operator.
  bool faithful(std::size_t support, std::size_t power) const {
    return node_->faithful(support, power);
  }
  /// Largest n for which T^n x is exact; kUnboundedHorizon if all are.
  std::size_t faithful_horizon(const Vec& x) const;
  std::optional<double> norm_bound_hint() const { return node_->norm_bound_hint(); }

  Mat dense() const { return node_->dense(); }

  /// Summands of a direct sum (empty for other kinds).
  std::span<const Operator> blocks() const;
  /// Offsets of the direct-sum blocks inside the ambient vector.
  std::span<const std::size_t> block_offsets() const;
  std::optional<ShiftView> shift_view() const;

  const detail::Node& node() const { return *node_; }

 private:
  void check_size(const Vec& x, const char* what) const;
  std::shared_ptr<const detail::Node> node_;
};

// Constructors.
Operator identity(std::size_t dim);
Operator dense_op(Mat matrix, std::string label = "dense");
Operator diagonal(Vec entries, std::string label = "diagonal");
/// Nilpotent Jordan block: e_i -> e_{i+1}, e_dim -> 0, as a finite matrix.
Operator jordan_nilpotent(std::size_t dim);
/// Diagonal unitary with seeded uniformly random phases.
Operator diag_unitary(std::size_t dim, std::uint64_t seed);

/// S e_i = w_i e_{i+1} for i < dim, S e_dim = 0.
Operator forward_shift(const WeightSchedule& w, std::size_t dim);
/// S e_{i+1} = w_i e_i, S e_1 = 0.
Operator backward_shift(const WeightSchedule& w, std::size_t dim);

Operator example1(std::size_t dim);
/// (x_1, x_2, x_3, ...) -> (0, x_1 + x_2, 0, x_3 + x_4, ...); dim must be even.
Operator example2_op(std::size_t dim);
/// Direct sum of backward shifts with Example 3 weights, n = 1..blocks.
Operator example3(std::size_t blocks, std::size_t block_dim);

/// Quadrature discretization of (Vf)(x) = int_0^x f(t) dt on M grid points.
Operator volterra(std::size_t m, QuadratureScheme scheme = QuadratureScheme::midpoint);
/// Multiplication by e^t on the same grid as volterra(M, scheme).
Operator mult_exp(std::size_t m, QuadratureScheme scheme = QuadratureScheme::midpoint);
/// Rank-one averaging matrix with all entries 1/M.
Operator projection_constants(std::size_t m);
/// Grid nodes t_j used by volterra/mult_exp.
RealVec quadrature_grid(std::size_t m, QuadratureScheme scheme);

// Combinators.
Operator direct_sum(std::vector<Operator> ops);
/// [[T11, 0], [T21, T22]] acting on H1 (+) H2; T21 maps H1 into H2.
Operator block_lower_2x2(Operator t11, Mat t21, Operator t22);
inline constexpr double kMaxConditionNumber = 1e12;
Operator inverse_op(const Operator& op, double max_condition = kMaxConditionNumber);
Operator adjoint_op(const Operator& op);
Operator scale(const Operator& op, Complex factor);
/// a o b (b applied first).
Operator compose(const Operator& a, const Operator& b);
Operator compose(std::vector<Operator> factors);
Operator sum(std::vector<Operator> terms);
/// s^{-1} t s.
Operator similarity(const Operator& s, const Operator& t);

struct ZooEntry {
  std::string name;
  std::string signature;
  std::string summary;
};

/// Constructor and combinator names accepted by the expression parser.
const std::vector<ZooEntry>& zoo_catalog();

}  // namespace asymptotica
