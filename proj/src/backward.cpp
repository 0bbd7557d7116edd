#include "asymptotica/backward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asymptotica/parallel.hpp"

namespace asymptotica {

std::string_view to_string(ChainMode m) {
  return m == ChainMode::stepwise ? "stepwise" : "joint";
}

std::string_view to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::bounded: return "bounded";
    case GrowthVerdict::growing: return "growing";
    case GrowthVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(MtVerdict v) {
  switch (v) {
    case MtVerdict::in_mt: return "in-MT";
    case MtVerdict::not_in_mt: return "not-in-MT";
    case MtVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

std::string not_in_range_message(std::size_t step, double residual) {
  std::ostringstream os;
  os << "not in T^" << step << "(H): preimage residual " << residual;
  return os.str();
}

Mat matrix_power(const Mat& a, std::size_t m) {
  Mat p = Mat::Identity(a.rows(), a.cols());
  for (std::size_t i = 0; i < m; ++i) p = a * p;
  return p;
}

// Dense blocks of a block-diagonal operator; a single block otherwise.
struct BlockPlan {
  std::vector<Operator> ops;
  std::vector<Mat> mats;  // empty matrix for shift blocks
  std::vector<std::size_t> offsets;
};

BlockPlan block_plan(const Operator& op) {
  BlockPlan plan;
  const auto blocks = op.blocks();
  if (blocks.empty()) {
    plan.ops.push_back(op);
    plan.offsets.push_back(0);
  } else {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      plan.ops.push_back(blocks[b]);
      plan.offsets.push_back(op.block_offsets()[b]);
    }
  }
  for (const auto& b : plan.ops) {
    plan.mats.push_back(b.shift_view() ? Mat() : b.dense());
  }
  return plan;
}

// Minimal-norm solution of S^m y = x for a weighted shift, read off the
// weight products directly.
Vec shift_power_preimage(const ShiftView& sv, const Vec& x, std::size_t m, double rank_tol) {
  const std::size_t d = static_cast<std::size_t>(x.size());
  Vec y = Vec::Zero(x.size());
  if (m >= d) {
    return y;
  }
  // prod[i] = w_{i+1} ... w_{i+m} (zero-based i), i + m <= d - 1.
  std::vector<double> prod(d - m, 1.0);
  for (std::size_t i = 0; i < d - m; ++i) {
    for (std::size_t j = 0; j < m; ++j) prod[i] *= sv.weights[i + j];
  }
  const Complex cm = std::pow(sv.factor, static_cast<double>(m));
  const double peak = std::abs(cm) * *std::max_element(prod.begin(), prod.end());
  for (std::size_t i = 0; i < d - m; ++i) {
    const Complex p = cm * prod[i];
    if (!(std::abs(p) > rank_tol * peak)) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    const auto im = static_cast<Eigen::Index>(i + m);
    if (sv.forward) {
      y(ii) = x(im) / p;  // e_{i+1} -> prod e_{i+1+m}
    } else {
      y(im) = x(ii) / p;  // e_{i+1+m} -> prod e_{i+1}
    }
  }
  return y;
}

Vec power_preimage(const Operator& op, const Mat& a, const Vec& x, std::size_t m,
                   double rank_tol) {
  if (const auto sv = op.shift_view()) {
    return shift_power_preimage(*sv, x, m, rank_tol);
  }
  return Pseudoinverse(matrix_power(a, m), rank_tol).solve(x);
}

void check_plan_dims(const Operator& op) {
  const auto blocks = op.blocks();
  std::size_t largest = op.dim();
  if (!blocks.empty()) {
    largest = 0;
    for (const auto& b : blocks) largest = std::max(largest, b.dim());
  }
  if (largest > kMaxGramDim) {
    throw DimensionError("backward: dense block of dimension " + std::to_string(largest) +
                         " exceeds the limit " + std::to_string(kMaxGramDim));
  }
}

// Elements x_0..x_m of one block; x_0 = x.
std::vector<Vec> block_chain(const Operator& op, const Mat& a, const Vec& x, std::size_t m,
                             ChainMode mode, double rank_tol) {
  std::vector<Vec> out(m + 1);
  out[0] = x;
  if (x.norm() == 0.0) {
    for (std::size_t n = 1; n <= m; ++n) out[n] = Vec::Zero(x.size());
    return out;
  }
  if (mode == ChainMode::joint) {
    out[m] = power_preimage(op, a, x, m, rank_tol);
    for (std::size_t n = m - 1; n >= 1; --n) out[n] = op.apply(out[n + 1]);
    return out;
  }
  // ranges[k] spans ran A^k.
  const Mat dense_a = a.size() ? a : op.dense();
  std::vector<Mat> ranges(m + 1);
  Mat p = Mat::Identity(dense_a.rows(), dense_a.cols());
  for (std::size_t k = 1; k <= m; ++k) {
    p = dense_a * p;
    ranges[k] = Pseudoinverse(p, rank_tol).range_basis();
  }
  for (std::size_t n = 0; n < m; ++n) {
    const Mat& q = ranges[m - n];
    if (q.cols() == 0) {
      out[n + 1] = Vec::Zero(x.size());
      continue;
    }
    const Vec c = Pseudoinverse(dense_a * q, rank_tol).solve(out[n]);
    out[n + 1] = q * c;
  }
  return out;
}

}  // namespace

NotInRangeError::NotInRangeError(std::size_t step, double residual)
    : NumericalError(not_in_range_message(step, residual)), step_(step), residual_(residual) {}

double log_linear_slope(std::span<const double> values) {
  const std::size_t start = values.size() / 2;
  const std::size_t count = values.size() - start;
  if (count < 2) {
    return 0.0;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = start; k < values.size(); ++k) {
    const double t = static_cast<double>(k);
    const double y = std::log(std::max(values[k], 1e-300));
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const double c = static_cast<double>(count);
  const double denom = c * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (c * sxy - sx * sy) / denom;
}

GrowthVerdict growth_verdict(std::span<const double> profile, double origin_norm,
                             const ChainOptions& opts, double* slope_out) {
  const double slope = log_linear_slope(profile);
  if (slope_out) *slope_out = slope;
  if (profile.empty()) {
    return GrowthVerdict::inconclusive;
  }
  const double sup = *std::max_element(profile.begin(), profile.end());
  if (!std::isfinite(sup) || sup > opts.bound_cap_rel * origin_norm) {
    return GrowthVerdict::growing;
  }
  if (slope > opts.growth_slope) {
    return GrowthVerdict::growing;
  }
  const auto tail = profile.subspan(profile.size() / 2);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  const bool flat = *hi == 0.0 || (*hi - *lo) <= opts.flat_deviation * *hi;
  if (std::abs(slope) < opts.flat_slope && flat) {
    return GrowthVerdict::bounded;
  }
  return GrowthVerdict::inconclusive;
}

BackwardChain backward_chain(const Operator& op, const Vec& x, std::size_t m, ChainMode mode,
                             const ChainOptions& opts) {
  if (static_cast<std::size_t>(x.size()) != op.dim()) {
    throw DimensionError("backward_chain: vector size does not match operator");
  }
  const double x_norm = x.norm();
  if (!(x_norm > 0.0)) {
    throw Error("backward_chain: origin must be nonzero");
  }
  if (m == 0) {
    throw Error("backward_chain: m must be at least 1");
  }
  check_plan_dims(op);
  const BlockPlan plan = block_plan(op);

  BackwardChain chain;
  chain.mode = mode;
  chain.chain_tol = opts.chain_tol_rel * x_norm;
  chain.elements.assign(m + 1, Vec::Zero(x.size()));
  for (std::size_t b = 0; b < plan.mats.size(); ++b) {
    const auto off = static_cast<Eigen::Index>(plan.offsets[b]);
    const auto d = static_cast<Eigen::Index>(plan.ops[b].dim());
    const auto part =
        block_chain(plan.ops[b], plan.mats[b], x.segment(off, d), m, mode, opts.rank_tol);
    for (std::size_t n = 0; n <= m; ++n) chain.elements[n].segment(off, d) = part[n];
  }
  chain.elements[0] = x;

  for (std::size_t n = 0; n < m; ++n) {
    const double r = (op.apply(chain.elements[n + 1]) - chain.elements[n]).norm();
    chain.residuals.push_back(r);
    if (!(r <= chain.chain_tol)) {
      throw NotInRangeError(mode == ChainMode::joint ? m : n + 1, r);
    }
  }
  for (const auto& e : chain.elements) chain.norm_profile.push_back(e.norm());
  chain.sup_norm = *std::max_element(chain.norm_profile.begin(), chain.norm_profile.end());
  chain.bounded_verdict = growth_verdict(chain.norm_profile, x_norm, opts, &chain.growth_slope);

  for (const auto& e : chain.elements) {
    if (op.faithful_horizon(e) == 0) break;
    ++chain.trusted_prefix;
  }
  return chain;
}

NormConstancy norm_constancy(const BackwardChain& chain, double tol) {
  NormConstancy nc;
  if (chain.norm_profile.empty()) {
    nc.is_constant = true;
    return nc;
  }
  const double base = chain.norm_profile.front();
  for (double v : chain.norm_profile) {
    nc.max_deviation = std::max(nc.max_deviation, std::abs(v - base));
  }
  nc.is_constant = nc.max_deviation <= tol * base;
  return nc;
}

TInfinityMembership t_infinity_membership(const Operator& op, const Vec& x, std::size_t m_max,
                                          const ChainOptions& opts) {
  if (static_cast<std::size_t>(x.size()) != op.dim()) {
    throw DimensionError("t_infinity_membership: vector size does not match operator");
  }
  if (m_max == 0) {
    throw Error("t_infinity_membership: m_max must be at least 1");
  }
  check_plan_dims(op);
  const BlockPlan plan = block_plan(op);
  const std::size_t nb = plan.ops.size();

  // preimages[b][m-1] is the minimal-norm solution of A_b^m y = x_b.
  std::vector<std::vector<Vec>> preimages(nb);
  parallel_for(nb, [&](std::size_t b) {
    const Operator& blk = plan.ops[b];
    const Mat& a = plan.mats[b];
    const auto d = static_cast<Eigen::Index>(blk.dim());
    const Vec xb = x.segment(static_cast<Eigen::Index>(plan.offsets[b]), d);
    const auto sv = blk.shift_view();
    Mat p = sv ? Mat() : Mat::Identity(d, d);
    for (std::size_t m = 1; m <= m_max; ++m) {
      if (xb.norm() == 0.0) {
        preimages[b].push_back(Vec::Zero(d));
      } else if (sv) {
        preimages[b].push_back(shift_power_preimage(*sv, xb, m, opts.rank_tol));
      } else {
        p = a * p;
        preimages[b].push_back(Pseudoinverse(p, opts.rank_tol).solve(xb));
      }
    }
  });

  TInfinityMembership res;
  res.tol = opts.chain_tol_rel * x.norm();
  res.in_t_infinity = true;
  for (std::size_t m = 1; m <= m_max; ++m) {
    Vec xm = Vec::Zero(x.size());
    for (std::size_t b = 0; b < nb; ++b) {
      xm.segment(static_cast<Eigen::Index>(plan.offsets[b]),
                 static_cast<Eigen::Index>(plan.ops[b].dim())) =
          preimages[b][m - 1];
    }
    TInfinityRow row;
    row.m = m;
    row.residual = (op.apply_power(xm, m) - x).norm();
    row.preimage_norm = xm.norm();
    row.trusted = op.faithful_horizon(xm) > 0;
    res.in_t_infinity = res.in_t_infinity && row.residual <= res.tol;
    res.rows.push_back(row);
  }
  return res;
}

std::size_t default_horizon(const Operator& op) {
  auto one = [](const Operator& b) -> std::size_t {
    // Operators exact at every power are finite-dimensional in earnest, so
    // the horizon must see nilpotency of any index.
    if (b.faithful(b.dim(), b.dim())) return b.dim() + 1;
    return std::max<std::size_t>(b.dim() / 2, 1);
  };
  std::size_t h = 1;
  const auto blocks = op.blocks();
  if (blocks.empty()) {
    h = one(op);
  } else {
    for (const auto& b : blocks) h = std::max(h, one(b));
  }
  return std::min<std::size_t>(h, 64);
}

MtMembership is_in_mt(const Operator& op, const Vec& x, std::size_t horizon,
                      std::optional<double> bound_cap, const ChainOptions& opts) {
  const double x_norm = x.norm();
  if (!(x_norm > 0.0)) {
    throw Error("is_in_mt: origin must be nonzero");
  }
  MtMembership res;
  res.horizon = horizon == 0 ? default_horizon(op) : horizon;
  res.bound_cap = bound_cap.value_or(opts.bound_cap_rel * x_norm);
  res.profile = t_infinity_membership(op, x, res.horizon, opts);

  std::vector<double> norms{x_norm};
  for (const auto& row : res.profile.rows) {
    if (row.residual > res.profile.tol) {
      res.verdict = MtVerdict::not_in_mt;
      res.sup_norm = *std::max_element(norms.begin(), norms.end());
      res.witness = "no preimage under T^" + std::to_string(row.m) + " (residual " +
                    std::to_string(row.residual) + ")";
      return res;
    }
    norms.push_back(row.preimage_norm);
  }
  res.sup_norm = *std::max_element(norms.begin(), norms.end());

  ChainOptions capped = opts;
  capped.bound_cap_rel = res.bound_cap / x_norm;
  const GrowthVerdict g = growth_verdict(norms, x_norm, capped, &res.growth_slope);
  if (g == GrowthVerdict::growing) {
    res.verdict = MtVerdict::not_in_mt;
    std::ostringstream os;
    if (res.sup_norm > res.bound_cap) {
      os << "minimal preimage norm " << res.sup_norm << " exceeds cap " << res.bound_cap;
    } else {
      os << "minimal preimage norms grow with log-slope " << res.growth_slope;
    }
    res.witness = os.str();
    return res;
  }
  if (g == GrowthVerdict::inconclusive) {
    res.verdict = MtVerdict::inconclusive;
    return res;
  }
  res.verdict = MtVerdict::in_mt;

  // |<x, y>| = |<x_m, T*^m y>| <= sup ||x_m|| * ||T*^m y||.
  constexpr std::size_t kDualSamples = 3;
  for (std::size_t s = 0; s < kDualSamples; ++s) {
    const Vec y = random_unit_vector(op.dim(), 7700 + s);
    Vec v = y;
    double min_adj = 1.0;
    for (std::size_t m = 1; m <= res.horizon; ++m) {
      v = op.adjoint_apply(v);
      min_adj = std::min(min_adj, v.norm());
    }
    const double lhs = std::abs(inner(x, y));
    res.dual_ok = res.dual_ok && lhs <= res.sup_norm * min_adj + 1e-8 * x_norm;
    ++res.dual_checks;
  }
  return res;
}

InverseOrbit inverse_orbit_growth(const Operator& op, const Vec& x, std::size_t n_max,
                                  const VerdictThresholds& t) {
  const double x_norm = x.norm();
  if (!(x_norm > 0.0)) {
    throw Error("inverse_orbit_growth: origin must be nonzero");
  }
  if (op.dim() > kMaxGramDim) {
    throw DimensionError("inverse_orbit_growth: dimension exceeds the dense limit");
  }
  const Mat a = op.dense();
  const RealVec sv = Eigen::BDCSVD<Mat>(a).singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > kMaxConditionNumber) {
    throw NumericalError("inverse_orbit_growth: operator is singular within the condition bound");
  }
  const Eigen::PartialPivLU<Mat> lu(a);
  InverseOrbit res;
  res.norms.push_back(x_norm);
  Vec v = x;
  for (std::size_t n = 1; n <= n_max; ++n) {
    v = lu.solve(v);
    const double nv = v.norm();
    res.norms.push_back(nv);
    if (!std::isfinite(nv) || nv > 1e100 * x_norm) break;
  }
  const double last = res.norms.back();
  const double peak = *std::max_element(res.norms.begin(), res.norms.end());
  if (!std::isfinite(last) || last > t.growth_factor * x_norm) {
    res.verdict = GrowthVerdict::growing;
  } else if (peak <= t.growth_factor * x_norm) {
    res.verdict = GrowthVerdict::bounded;
  }
  res.adjoint_orbit = orbit(op, x, n_max, Direction::adjoint, t);
  res.iff_consistent = (res.adjoint_orbit.verdict == OrbitVerdict::decaying) ==
                       (res.verdict == GrowthVerdict::growing);
  return res;
}

}  // namespace asymptotica
