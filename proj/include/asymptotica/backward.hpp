#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asymptotica/asymptotics.hpp"
#include "asymptotica/linalg.hpp"
#include "asymptotica/operators.hpp"

namespace asymptotica {

enum class ChainMode { stepwise, joint };
std::string_view to_string(ChainMode m);

enum class GrowthVerdict { bounded, growing, inconclusive };
std::string_view to_string(GrowthVerdict v);

struct ChainOptions {
  double chain_tol_rel = 1e-8;  // residual bound, relative to ||x||
  double rank_tol = kDefaultRankTol;
  double growth_slope = 0.01;   // fitted slope of log||x_n|| above this -> growing
  double flat_slope = 1e-4;     // |slope| below this (and flat) -> bounded
  double flat_deviation = 1e-3; // relative spread allowed for "flat"
  double bound_cap_rel = 1e3;   // sup norm above this * ||x|| -> growing
};

/// x_0 = x, T x_{n+1} = x_n, with residuals and a growth fit.
struct BackwardChain {
  std::vector<Vec> elements;
  std::vector<double> residuals;     // ||T x_{n+1} - x_n||, n = 0..m-1
  std::vector<double> norm_profile;  // ||x_n||, n = 0..m
  double sup_norm = 0.0;
  GrowthVerdict bounded_verdict = GrowthVerdict::inconclusive;
  double growth_slope = 0.0;
  ChainMode mode = ChainMode::stepwise;
  std::size_t trusted_prefix = 0;  // elements whose support stays in the faithful window
  double chain_tol = 0.0;
};

/// No preimage within tolerance: x is not in the range of T^step.
class NotInRangeError : public NumericalError {
 public:
  NotInRangeError(std::size_t step, double residual);
  std::size_t step() const { return step_; }
  double residual() const { return residual_; }

 private:
  std::size_t step_;
  double residual_;
};

/// Stepwise: x_{n+1} is the minimal-norm preimage of x_n inside
/// ran T^{m-n}, so every element of the chain keeps a preimage.
/// Joint: x_m = pinv(T^m) x and x_n = T^{m-n} x_m.
BackwardChain backward_chain(const Operator& op, const Vec& x, std::size_t m, ChainMode mode,
                             const ChainOptions& opts = {});

/// Least-squares slope of log(values[k]) against k over the last half.
double log_linear_slope(std::span<const double> values);
GrowthVerdict growth_verdict(std::span<const double> profile, double origin_norm,
                             const ChainOptions& opts, double* slope_out = nullptr);

struct NormConstancy {
  bool is_constant = false;
  double max_deviation = 0.0;  // max_n | ||x_n|| - ||x_0|| |
};

NormConstancy norm_constancy(const BackwardChain& chain, double tol);

struct TInfinityRow {
  std::size_t m = 0;
  double residual = 0.0;        // ||T^m x_m - x|| for the minimal-norm x_m
  double preimage_norm = 0.0;   // ||x_m||
  bool trusted = true;          // x_m inside the faithful window
};

struct TInfinityMembership {
  std::vector<TInfinityRow> rows;
  bool in_t_infinity = false;  // every residual <= tol
  double tol = 0.0;
};

TInfinityMembership t_infinity_membership(const Operator& op, const Vec& x, std::size_t m_max,
                                          const ChainOptions& opts = {});

enum class MtVerdict { in_mt, not_in_mt, inconclusive };
std::string_view to_string(MtVerdict v);

struct MtMembership {
  MtVerdict verdict = MtVerdict::inconclusive;
  double sup_norm = 0.0;
  std::string witness;
  std::size_t horizon = 0;
  double bound_cap = 0.0;
  double growth_slope = 0.0;
  TInfinityMembership profile;
  // |<x,y>| <= sup_norm * min_n ||T*^n y|| on sampled y (in-M(T) verdicts only).
  std::size_t dual_checks = 0;
  bool dual_ok = true;
};

/// min(h, 64) over blocks: h = dim/2 for truncations with a faithful window,
/// dim+1 for blocks exact at every power.
std::size_t default_horizon(const Operator& op);

MtMembership is_in_mt(const Operator& op, const Vec& x, std::size_t horizon = 0,
                      std::optional<double> bound_cap = std::nullopt,
                      const ChainOptions& opts = {});

struct InverseOrbit {
  std::vector<double> norms;  // ||T^{-n} x||, n = 0..n_max
  GrowthVerdict verdict = GrowthVerdict::inconclusive;
  OrbitRecord adjoint_orbit;  // ||T*^n x|| for the paired check
  bool iff_consistent = false;  // adjoint decaying <=> inverse growing
};

InverseOrbit inverse_orbit_growth(const Operator& op, const Vec& x, std::size_t n_max,
                                  const VerdictThresholds& t = {});

}  // namespace asymptotica
