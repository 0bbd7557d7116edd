#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asymptotica/linalg.hpp"
#include "asymptotica/operators.hpp"

namespace asymptotica {

enum class Direction { forward, adjoint };
std::string_view to_string(Direction d);

enum class OrbitVerdict { decaying, bounded_below, growing, inconclusive };
std::string_view to_string(OrbitVerdict v);

/// Thresholds turning a finite norm sequence into a verdict. The verdicts
/// are evidence over a finite window, never a proof about the limit.
struct VerdictThresholds {
  double decay_tol = 1e-6;      // decaying: min < decay_tol * ||x||
  double floor_frac = 1e-3;     // bounded-below: min > floor_frac * ||x||
  double growth_factor = 10.0;  // growing: last > growth_factor * ||x||
};

struct OrbitRecord {
  Direction direction = Direction::forward;
  std::vector<double> norms;  // ||T^n x|| (or ||T*^n x||), n = 0..n_max
  std::size_t faithful_horizon = 0;
  OrbitVerdict verdict = OrbitVerdict::inconclusive;
  double liminf_proxy = 0.0;  // min over the trusted window
  VerdictThresholds thresholds;
};

/// Verdict for norms[0..window] given the starting norm.
OrbitVerdict classify_norms(std::span<const double> norms, double x_norm,
                            const VerdictThresholds& t);

OrbitRecord orbit(const Operator& op, const Vec& x, std::size_t n_max, Direction direction,
                  const VerdictThresholds& t = {});

struct PowerBound {
  double m_est = 0.0;
  std::size_t attained_at = 0;
  std::vector<double> power_norms;  // ||T^n||, n = 1..n_max
  std::string method;               // "shift-columns", "dense-svd", "power-iteration"
};

/// max over 1 <= n <= n_max of ||T^n||.
PowerBound power_bound_estimate(const Operator& op, std::size_t n_max);

inline constexpr std::size_t kMaxGramDim = 2048;
inline constexpr double kGlimUnresolved = 0.05;

/// Dense approximation of the Banach-limit form. For Direction::adjoint it
/// is the mean of T^n T*^n, so <G x, x> approximates glim ||T*^n x||^2; for
/// Direction::forward it is the mean of T*^n T^n. The mean runs over the
/// tail window n in (N/2, N].
struct AsymptoteGram {
  Mat average;
  std::size_t horizon = 0;
  std::size_t window_start = 0;  // first n in the averaging window
  Direction direction = Direction::adjoint;
  double stabilization = 0.0;
  bool glim_unresolved = false;
  std::optional<std::string> warning;
  Mat kernel_basis;
  Mat range_basis;
  RealVec eigenvalues;
  double split_tol = 1e-8;

  /// [x, x] proxy = <G x, x>.
  double seminorm_sq(const Vec& x) const;
};

AsymptoteGram asymptote_gram(const Operator& op, std::size_t n_horizon,
                             Direction direction = Direction::adjoint, double split_tol = 1e-8);

/// Raised when a Gram-kernel vector fails the direct orbit check.
class CrossValidationError : public NumericalError {
 public:
  CrossValidationError(const std::string& what, Vec offending)
      : NumericalError(what), offending_(std::move(offending)) {}
  const Vec& offending_vector() const { return offending_; }

 private:
  Vec offending_;
};

/// Orthonormal basis of {x : T*^n x -> 0}, cross-validated by orbits.
Mat stable_subspace(const Operator& op, std::size_t n_horizon);

struct CorollaryDecomposition {
  Mat stable_basis;       // {x : T*^n x -> 0}
  Mat mt_closure_basis;   // closure of M(T)
  double orthogonality_defect = 0.0;
  bool defect_flagged = false;  // defect > 1e-6
  std::size_t mt_checked = 0;
  std::size_t mt_confirmed = 0;  // range vectors with an in-M(T) verdict
  AsymptoteGram gram;
};

CorollaryDecomposition decompose_corollary(const Operator& op, std::size_t n_horizon);

struct ClassEvidence {
  bool c0_dot = false;      // every forward orbit decays
  bool c1_dot = false;      // every forward orbit stays bounded below
  bool dot_c0 = false;      // every adjoint orbit decays
  bool dot_c1 = false;      // every adjoint orbit stays bounded below
  bool not_c0_dot = false;  // some forward orbit is bounded below
  bool not_dot_c0 = false;  // some adjoint orbit is bounded below
  bool mixed = false;       // verdicts differ across samples
};

struct ClassificationReport {
  std::vector<OrbitRecord> forward;
  std::vector<OrbitRecord> adjoint;
  ClassEvidence evidence;
  PowerBound power_bound;
  /// For every forward orbit and m > k: ||T^m x|| <= M_est * ||T^k x||.
  bool stability_propagation_ok = true;
  double worst_propagation_ratio = 0.0;
};

ClassificationReport classify(const Operator& op, std::span<const Vec> samples,
                              std::size_t n_max, const VerdictThresholds& t = {});

/// Triangular splitting along N = {x : T^n x -> 0}: T maps N into N, so
/// in the basis N (+) N^perp only the leak block P_{N^perp} T|_N vanishes.
struct KerchyBlocks {
  Mat stable_basis;      // N
  Mat complement_basis;  // N^perp
  Mat t11;               // P_N T|_N        (C0. part)
  Mat coupling;          // P_N T|_{N^perp}
  Mat t22;               // P_{N^perp} T|_{N^perp}  (C1. part)
  Mat leak;              // P_{N^perp} T|_N, must vanish
  double leak_norm = 0.0;
  std::vector<OrbitRecord> t11_samples;
  std::vector<OrbitRecord> t22_samples;
  bool t11_decaying = true;
  bool t22_bounded_below = true;
  AsymptoteGram gram;
};

inline constexpr double kKerchyLeakTol = 1e-8;

KerchyBlocks kerchy_blocks(const Operator& op, std::size_t n_horizon);

}  // namespace asymptotica
