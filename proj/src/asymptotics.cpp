#include "asymptotica/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asymptotica/parallel.hpp"

namespace asymptotica {

std::string_view to_string(Direction d) {
  return d == Direction::forward ? "forward" : "adjoint";
}

std::string_view to_string(OrbitVerdict v) {
  switch (v) {
    case OrbitVerdict::decaying: return "decaying";
    case OrbitVerdict::bounded_below: return "bounded-below";
    case OrbitVerdict::growing: return "growing";
    case OrbitVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Norms beyond this multiple of ||x|| end the orbit early.
constexpr double kOverflowRatio = 1e100;

}  // namespace

OrbitVerdict classify_norms(std::span<const double> norms, double x_norm,
                            const VerdictThresholds& t) {
  if (norms.size() < 2 || !(x_norm > 0.0)) {
    return OrbitVerdict::inconclusive;
  }
  const double last = norms.back();
  if (!std::isfinite(last) || last > t.growth_factor * x_norm) {
    return OrbitVerdict::growing;
  }
  const auto min_it = std::min_element(norms.begin(), norms.end());
  const double lowest = *min_it;
  if (lowest < t.decay_tol * x_norm) {
    // Envelope: once below the threshold the orbit must stay small.
    const auto first_hit = std::find_if(norms.begin(), norms.end(), [&](double v) {
      return v < t.decay_tol * x_norm;
    });
    const double envelope = *std::max_element(first_hit, norms.end());
    return envelope <= std::sqrt(t.decay_tol) * x_norm ? OrbitVerdict::decaying
                                                        : OrbitVerdict::inconclusive;
  }
  if (lowest > t.floor_frac * x_norm) {
    return OrbitVerdict::bounded_below;
  }
  return OrbitVerdict::inconclusive;
}

OrbitRecord orbit(const Operator& op, const Vec& x, std::size_t n_max, Direction direction,
                  const VerdictThresholds& t) {
  const double x_norm = x.norm();
  if (!(x_norm > 0.0)) {
    throw Error("orbit: starting vector must be nonzero");
  }
  if (n_max == 0) {
    throw Error("orbit: n_max must be at least 1");
  }
  OrbitRecord rec;
  rec.direction = direction;
  rec.thresholds = t;
  rec.norms.reserve(n_max + 1);
  rec.norms.push_back(x_norm);
  Vec v = x;
  for (std::size_t n = 1; n <= n_max; ++n) {
    v = direction == Direction::forward ? op.apply(v) : op.adjoint_apply(v);
    const double nv = v.norm();
    rec.norms.push_back(nv);
    if (!std::isfinite(nv) || nv > kOverflowRatio * x_norm) {
      break;
    }
  }
  const std::size_t computed = rec.norms.size() - 1;
  rec.faithful_horizon = std::min(computed, op.faithful_horizon(x));
  const std::span<const double> window(rec.norms.data(), rec.faithful_horizon + 1);
  rec.liminf_proxy = *std::min_element(window.begin(), window.end());
  rec.verdict = classify_norms(window, x_norm, t);
  return rec;
}

namespace {

// ||S^n|| for n = 1..n_max from products of consecutive weights.
std::vector<double> shift_power_norms(const ShiftView& sv, std::size_t n_max) {
  const std::size_t nw = sv.weights.size();
  std::vector<double> prod(nw, 1.0);
  std::vector<double> out;
  const double c = std::abs(sv.factor);
  double cn = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    cn *= c;
    double best = 0.0;
    if (n <= nw) {
      // prod[i] = w_{i+1} ... w_{i+n} (zero-based i), valid for i + n <= nw.
      for (std::size_t i = 0; i + n <= nw; ++i) {
        prod[i] *= sv.weights[i + n - 1];
        best = std::max(best, prod[i]);
      }
    }
    out.push_back(cn * best);
  }
  return out;
}

std::vector<double> dense_power_norms(const Mat& a, std::size_t n_max) {
  std::vector<double> out;
  Mat p = a;
  for (std::size_t n = 1; n <= n_max; ++n) {
    out.push_back(spectral_norm(p));
    if (n < n_max) p = a * p;
  }
  return out;
}

std::vector<double> iterative_power_norms(const Operator& op, std::size_t n_max) {
  std::vector<double> out;
  constexpr int kIterations = 30;
  for (std::size_t n = 1; n <= n_max; ++n) {
    Vec v = random_unit_vector(op.dim(), 0x5eed + n);
    double est = 0.0;
    for (int it = 0; it < kIterations; ++it) {
      Vec w = op.apply_power(v, n);
      est = w.norm();
      if (!(est > 0.0)) break;
      v = op.adjoint_apply_power(w, n);
      const double nv = v.norm();
      if (!(nv > 0.0)) break;
      v /= nv;
    }
    out.push_back(est);
  }
  return out;
}

std::vector<double> power_norms(const Operator& op, std::size_t n_max, std::string& method) {
  if (const auto sv = op.shift_view()) {
    method = "shift-columns";
    return shift_power_norms(*sv, n_max);
  }
  if (!op.blocks().empty()) {
    std::vector<double> out(n_max, 0.0);
    std::string inner_method;
    for (const auto& b : op.blocks()) {
      const auto bn = power_norms(b, n_max, inner_method);
      for (std::size_t i = 0; i < n_max; ++i) out[i] = std::max(out[i], bn[i]);
    }
    method = "blocks:" + inner_method;
    return out;
  }
  if (op.dim() <= 512) {
    method = "dense-svd";
    return dense_power_norms(op.dense(), n_max);
  }
  method = "power-iteration";
  return iterative_power_norms(op, n_max);
}

}  // namespace

PowerBound power_bound_estimate(const Operator& op, std::size_t n_max) {
  if (n_max == 0) {
    throw Error("power_bound_estimate: n_max must be at least 1");
  }
  PowerBound pb;
  pb.power_norms = power_norms(op, n_max, pb.method);
  const auto it = std::max_element(pb.power_norms.begin(), pb.power_norms.end());
  pb.m_est = *it;
  pb.attained_at = static_cast<std::size_t>(it - pb.power_norms.begin()) + 1;
  return pb;
}

double AsymptoteGram::seminorm_sq(const Vec& x) const {
  return std::max(0.0, x.dot(average * x).real());
}

namespace {

struct GramAccumulation {
  Mat first_half;   // sum over (start, mid]
  Mat second_half;  // sum over (mid, N]
  std::vector<double> term_norms;  // ||H_n||_F, n = 1..N
};

GramAccumulation accumulate_gram(const Mat& a, std::size_t n_horizon, Direction direction,
                                 std::size_t start, std::size_t mid) {
  const Eigen::Index d = a.rows();
  GramAccumulation acc;
  acc.first_half = Mat::Zero(d, d);
  acc.second_half = Mat::Zero(d, d);
  const Mat a_adj = a.adjoint();
  Mat h = Mat::Identity(d, d);
  for (std::size_t n = 1; n <= n_horizon; ++n) {
    h = direction == Direction::adjoint ? Mat(a * h * a_adj) : Mat(a_adj * h * a);
    acc.term_norms.push_back(h.norm());
    if (n > mid) {
      acc.second_half += h;
    } else if (n > start) {
      acc.first_half += h;
    }
  }
  return acc;
}

}  // namespace

AsymptoteGram asymptote_gram(const Operator& op, std::size_t n_horizon, Direction direction,
                             double split_tol) {
  if (n_horizon < 8) {
    throw Error("asymptote_gram: horizon must be at least 8");
  }
  if (op.dim() > kMaxGramDim) {
    throw DimensionError("asymptote_gram: dimension " + std::to_string(op.dim()) +
                         " exceeds the dense Gram limit " + std::to_string(kMaxGramDim));
  }
  AsymptoteGram g;
  g.horizon = n_horizon;
  g.direction = direction;
  g.split_tol = split_tol;
  const std::size_t start = n_horizon / 2;
  const std::size_t mid = start + (n_horizon - start) / 2;
  g.window_start = start + 1;
  const auto d = static_cast<Eigen::Index>(op.dim());

  Mat first = Mat::Zero(d, d);
  Mat second = Mat::Zero(d, d);
  std::vector<double> term_norms(n_horizon, 0.0);
  const auto blocks = op.blocks();
  const auto offsets = op.block_offsets();
  if (!blocks.empty()) {
    // Block-diagonal operator: block-diagonal Gram.
    std::vector<double> sq(n_horizon, 0.0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto off = static_cast<Eigen::Index>(offsets[b]);
      const auto bd = static_cast<Eigen::Index>(blocks[b].dim());
      const auto acc = accumulate_gram(blocks[b].dense(), n_horizon, direction, start, mid);
      first.block(off, off, bd, bd) = acc.first_half;
      second.block(off, off, bd, bd) = acc.second_half;
      for (std::size_t n = 0; n < n_horizon; ++n) sq[n] += acc.term_norms[n] * acc.term_norms[n];
    }
    for (std::size_t n = 0; n < n_horizon; ++n) term_norms[n] = std::sqrt(sq[n]);
  } else {
    auto acc = accumulate_gram(op.dense(), n_horizon, direction, start, mid);
    first = std::move(acc.first_half);
    second = std::move(acc.second_half);
    term_norms = std::move(acc.term_norms);
  }
  const double n1 = static_cast<double>(mid - start);
  const double n2 = static_cast<double>(n_horizon - mid);
  g.average = (first + second) / (n1 + n2);
  g.average = 0.5 * (g.average + g.average.adjoint()).eval();
  const Mat diff = first / n1 - second / n2;
  const double peak = *std::max_element(term_norms.begin(), term_norms.end());
  const double denom = std::max(g.average.norm(), peak);
  g.stabilization = denom > 0.0 ? diff.norm() / denom : 0.0;
  g.glim_unresolved = g.stabilization > kGlimUnresolved;

  const bool monotone = std::is_sorted(term_norms.begin(), term_norms.end());
  if (monotone && term_norms.back() > 4.0 * term_norms.front()) {
    g.warning = "power norms grow monotonically over the horizon; operator may not be "
                "power-bounded";
  }

  // Unit vectors start at [x, x] = 1; a Gram that is small everywhere is
  // all kernel, not all range.
  auto split = hermitian_eig_split(g.average, split_tol, 1.0);
  g.kernel_basis = std::move(split.kernel_basis);
  g.range_basis = std::move(split.range_basis);
  g.eigenvalues = std::move(split.eigenvalues);
  return g;
}

Mat stable_subspace(const Operator& op, std::size_t n_horizon) {
  const AsymptoteGram g = asymptote_gram(op, n_horizon, Direction::adjoint);
  for (Eigen::Index j = 0; j < g.kernel_basis.cols(); ++j) {
    const Vec v = g.kernel_basis.col(j);
    const OrbitRecord rec = orbit(op, v, n_horizon, Direction::adjoint);
    if (rec.verdict != OrbitVerdict::decaying) {
      throw CrossValidationError("stable_subspace: kernel vector " + std::to_string(j) +
                                     " has adjoint orbit verdict " +
                                     std::string(to_string(rec.verdict)),
                                 v);
    }
  }
  return g.kernel_basis;
}

ClassificationReport classify(const Operator& op, std::span<const Vec> samples,
                              std::size_t n_max, const VerdictThresholds& t) {
  if (samples.empty()) {
    throw Error("classify: need at least one sample vector");
  }
  ClassificationReport rep;
  rep.forward.resize(samples.size());
  rep.adjoint.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    rep.forward[i] = orbit(op, samples[i], n_max, Direction::forward, t);
    rep.adjoint[i] = orbit(op, samples[i], n_max, Direction::adjoint, t);
  });
  rep.power_bound = power_bound_estimate(op, n_max);

  auto all = [](const std::vector<OrbitRecord>& recs, OrbitVerdict v) {
    return std::all_of(recs.begin(), recs.end(), [v](const auto& r) { return r.verdict == v; });
  };
  auto any = [](const std::vector<OrbitRecord>& recs, OrbitVerdict v) {
    return std::any_of(recs.begin(), recs.end(), [v](const auto& r) { return r.verdict == v; });
  };
  auto uniform = [](const std::vector<OrbitRecord>& recs) {
    return std::all_of(recs.begin(), recs.end(),
                       [&](const auto& r) { return r.verdict == recs.front().verdict; });
  };
  ClassEvidence& e = rep.evidence;
  e.c0_dot = all(rep.forward, OrbitVerdict::decaying);
  e.c1_dot = all(rep.forward, OrbitVerdict::bounded_below);
  e.dot_c0 = all(rep.adjoint, OrbitVerdict::decaying);
  e.dot_c1 = all(rep.adjoint, OrbitVerdict::bounded_below);
  e.not_c0_dot = any(rep.forward, OrbitVerdict::bounded_below);
  e.not_dot_c0 = any(rep.adjoint, OrbitVerdict::bounded_below);
  e.mixed = !uniform(rep.forward) || !uniform(rep.adjoint);

  // Once ||T^k x|| is small, power-boundedness keeps every later norm
  // below M_est times it.
  const double m_est = std::max(rep.power_bound.m_est, 1e-300);
  for (const auto& rec : rep.forward) {
    const std::size_t h = rec.faithful_horizon;
    double min_so_far = rec.norms[0];
    for (std::size_t m = 1; m <= h; ++m) {
      const double bound = m_est * min_so_far;
      const double ratio = bound > 0.0 ? rec.norms[m] / bound : (rec.norms[m] > 0.0 ? INFINITY : 0.0);
      rep.worst_propagation_ratio = std::max(rep.worst_propagation_ratio, ratio);
      min_so_far = std::min(min_so_far, rec.norms[m]);
    }
  }
  rep.stability_propagation_ok = rep.worst_propagation_ratio <= 1.0 + 1e-9;
  return rep;
}

KerchyBlocks kerchy_blocks(const Operator& op, std::size_t n_horizon) {
  KerchyBlocks kb;
  kb.gram = asymptote_gram(op, n_horizon, Direction::forward);
  kb.stable_basis = kb.gram.kernel_basis;
  kb.complement_basis = kb.gram.range_basis;
  const Eigen::Index k = kb.stable_basis.cols();
  const Eigen::Index r = kb.complement_basis.cols();
  Mat q(static_cast<Eigen::Index>(op.dim()), k + r);
  q << kb.stable_basis, kb.complement_basis;
  const Mat b = q.adjoint() * op.dense() * q;
  kb.t11 = b.topLeftCorner(k, k);
  kb.coupling = b.topRightCorner(k, r);
  kb.leak = b.bottomLeftCorner(r, k);
  kb.t22 = b.bottomRightCorner(r, r);
  kb.leak_norm = kb.leak.size() ? spectral_norm(kb.leak) : 0.0;
  if (kb.leak_norm > kKerchyLeakTol) {
    throw NumericalError("kerchy_blocks: block P_{N^perp} T|_N has norm " +
                         std::to_string(kb.leak_norm) +
                         " > 1e-8; forward Gram has not converged");
  }
  constexpr std::size_t kSamples = 3;
  if (k > 0) {
    const Operator t11 = dense_op(kb.t11, "T11");
    for (std::size_t s = 0; s < kSamples; ++s) {
      kb.t11_samples.push_back(orbit(t11, random_unit_vector(static_cast<std::size_t>(k), 1100 + s),
                                     n_horizon, Direction::forward));
      kb.t11_decaying &= kb.t11_samples.back().verdict == OrbitVerdict::decaying;
    }
  }
  if (r > 0) {
    const Operator t22 = dense_op(kb.t22, "T22");
    for (std::size_t s = 0; s < kSamples; ++s) {
      kb.t22_samples.push_back(orbit(t22, random_unit_vector(static_cast<std::size_t>(r), 2200 + s),
                                     n_horizon, Direction::forward));
      kb.t22_bounded_below &= kb.t22_samples.back().verdict == OrbitVerdict::bounded_below;
    }
  }
  return kb;
}

}  // namespace asymptotica
