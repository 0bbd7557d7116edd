#include <chrono>
#include <sstream>

#include "asymptotica/experiments.hpp"
#include "asymptotica/parallel.hpp"

namespace asymptotica {

namespace {

std::vector<Direction> directions(const std::string& d) {
  if (d == "forward") return {Direction::forward};
  if (d == "adjoint") return {Direction::adjoint};
  return {Direction::forward, Direction::adjoint};
}

std::vector<ChainMode> modes(const std::string& m) {
  if (m == "stepwise") return {ChainMode::stepwise};
  if (m == "joint") return {ChainMode::joint};
  return {ChainMode::stepwise, ChainMode::joint};
}

std::vector<VectorSpec> vectors_or_default(const ExperimentConfig& cfg) {
  if (!cfg.vectors.empty()) return cfg.vectors;
  VectorSpec v;
  v.kind = VectorSpec::Kind::random;
  v.seed = cfg.seed;
  v.id = "random:" + std::to_string(cfg.seed);
  return {v};
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void orbit_rows(Report& r, const std::string& id, const OrbitRecord& rec, std::size_t horizon) {
  const std::string mode(to_string(rec.direction));
  for (std::size_t n = 0; n < rec.norms.size(); ++n) {
    r.rows.push_back({"orbit", id, mode, n, {}, rec.norms[n], {}, "", {}, {}});
  }
  r.rows.push_back({"orbit-verdict", id, mode, rec.faithful_horizon == kUnboundedHorizon
                                                   ? horizon
                                                   : std::min(rec.faithful_horizon, horizon),
                    {}, {}, rec.liminf_proxy, std::string(to_string(rec.verdict)), horizon,
                    rec.thresholds.decay_tol});
}

void run_orbit(const ExperimentConfig& cfg, Report& r) {
  const Operator& op = *cfg.op;
  const std::size_t h = cfg.horizon.value_or(200);
  const auto specs = vectors_or_default(cfg);
  const auto dirs = directions(cfg.direction);
  std::vector<OrbitRecord> recs(specs.size() * dirs.size());
  parallel_for(recs.size(), [&](std::size_t k) {
    const auto& spec = specs[k / dirs.size()];
    recs[k] = orbit(op, spec.materialize(op.dim()), h, dirs[k % dirs.size()], cfg.tol.verdict);
  });
  for (std::size_t k = 0; k < recs.size(); ++k) {
    orbit_rows(r, specs[k / dirs.size()].id, recs[k], h);
  }
}

void run_classify(const ExperimentConfig& cfg, Report& r) {
  const Operator& op = *cfg.op;
  const std::size_t h = cfg.horizon.value_or(200);
  const auto specs = vectors_or_default(cfg);
  std::vector<Vec> samples;
  for (const auto& s : specs) samples.push_back(s.materialize(op.dim()));
  const ClassificationReport rep = classify(op, samples, h, cfg.tol.verdict);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    orbit_rows(r, specs[i].id, rep.forward[i], h);
    orbit_rows(r, specs[i].id, rep.adjoint[i], h);
  }
  const double tol = cfg.tol.verdict.decay_tol;
  const auto& e = rep.evidence;
  for (const auto& [name, flag] : std::vector<std::pair<std::string, bool>>{
           {"C0.", e.c0_dot}, {"C1.", e.c1_dot}, {"C.0", e.dot_c0}, {"C.1", e.dot_c1},
           {"not-C0.", e.not_c0_dot}, {"not-C.0", e.not_dot_c0}, {"mixed", e.mixed}}) {
    r.rows.push_back({"class-evidence", name, "", {}, {}, {}, {}, yes_no(flag), h, tol});
  }
  r.rows.push_back({"power-bound", rep.power_bound.method, "", rep.power_bound.attained_at, {}, {},
                    rep.power_bound.m_est, "", h, {}});
  r.rows.push_back({"stability-propagation", "", "", {}, {}, {}, rep.worst_propagation_ratio,
                    rep.stability_propagation_ok ? "ok" : "violated", h, 1e-9});
  r.diagnostics.emplace_back("power_bound_method", rep.power_bound.method);
}

void gram_rows(Report& r, const AsymptoteGram& g) {
  for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i) {
    r.rows.push_back({"gram-eigenvalue", "", std::string(to_string(g.direction)),
                      static_cast<std::size_t>(i), {}, {}, g.eigenvalues(i), "", g.horizon,
                      g.split_tol});
  }
  r.rows.push_back({"gram-stabilization", "", std::string(to_string(g.direction)), {}, {}, {},
                    g.stabilization, g.glim_unresolved ? "glim-unresolved" : "stable", g.horizon,
                    kGlimUnresolved});
  r.rows.push_back({"gram-split", "kernel", "", static_cast<std::size_t>(g.kernel_basis.cols()), {},
                    {}, {}, "", g.horizon, g.split_tol});
  r.rows.push_back({"gram-split", "range", "", static_cast<std::size_t>(g.range_basis.cols()), {},
                    {}, {}, "", g.horizon, g.split_tol});
  r.diagnostics.emplace_back("gram_window", "n in [" + std::to_string(g.window_start) + ", " +
                                                std::to_string(g.horizon) + "]");
  r.diagnostics.emplace_back("gram_stabilization", format_real(g.stabilization));
  if (g.warning) r.diagnostics.emplace_back("warning", *g.warning);
}

void run_gram(const ExperimentConfig& cfg, Report& r) {
  const std::size_t h = cfg.horizon.value_or(64);
  for (Direction d : directions(cfg.direction == "both" ? "adjoint" : cfg.direction)) {
    gram_rows(r, asymptote_gram(*cfg.op, h, d, cfg.tol.gram_split_tol));
  }
}

void run_decompose(const ExperimentConfig& cfg, Report& r) {
  const std::size_t h = cfg.horizon.value_or(64);
  const CorollaryDecomposition d = decompose_corollary(*cfg.op, h);
  gram_rows(r, d.gram);
  r.rows.push_back({"orthogonality-defect", "", "", {}, {}, {}, d.orthogonality_defect,
                    d.defect_flagged ? "flagged" : "ok", h, 1e-6});
  r.rows.push_back({"mt-confirmed", "", "", d.mt_confirmed, {}, {},
                    static_cast<double>(d.mt_checked),
                    d.mt_confirmed == d.mt_checked ? "all" : "partial", default_horizon(*cfg.op),
                    cfg.tol.chain.chain_tol_rel});
}

void run_kerchy(const ExperimentConfig& cfg, Report& r) {
  const std::size_t h = cfg.horizon.value_or(64);
  const KerchyBlocks kb = kerchy_blocks(*cfg.op, h);
  gram_rows(r, kb.gram);
  r.rows.push_back({"kerchy-leak", "", "", {}, {}, kb.leak_norm, {}, "ok", h, kKerchyLeakTol});
  r.rows.push_back({"kerchy-t11", "", "", static_cast<std::size_t>(kb.t11.rows()), {}, {}, {},
                    kb.t11_decaying ? "decaying" : "not-decaying", h,
                    cfg.tol.verdict.decay_tol});
  r.rows.push_back({"kerchy-t22", "", "", static_cast<std::size_t>(kb.t22.rows()), {}, {}, {},
                    kb.t22_bounded_below ? "bounded-below" : "not-bounded-below", h,
                    cfg.tol.verdict.floor_frac});
}

void chain_rows(Report& r, const std::string& id, const BackwardChain& c, std::size_t m) {
  const std::string mode(to_string(c.mode));
  for (std::size_t n = 0; n < c.norm_profile.size(); ++n) {
    const double res = n == 0 ? 0.0 : c.residuals[n - 1];
    const bool last = n + 1 == c.norm_profile.size();
    r.rows.push_back({"backward", id, mode, n, res, c.norm_profile[n], {},
                      last ? std::string(to_string(c.bounded_verdict)) : "", m, c.chain_tol});
  }
  r.rows.push_back({"backward-trusted", id, mode, c.trusted_prefix, {}, c.sup_norm,
                    c.growth_slope, std::string(to_string(c.bounded_verdict)), m, c.chain_tol});
}

void run_backward(const ExperimentConfig& cfg, Report& r) {
  const Operator& op = *cfg.op;
  const std::size_t m = cfg.horizon.value_or(default_horizon(op));
  for (const auto& spec : vectors_or_default(cfg)) {
    const Vec x = spec.materialize(op.dim());
    for (ChainMode mode : modes(cfg.mode)) {
      try {
        chain_rows(r, spec.id, backward_chain(op, x, m, mode, cfg.tol.chain), m);
      } catch (const NotInRangeError& e) {
        r.rows.push_back({"backward", spec.id, std::string(to_string(mode)), e.step(),
                          e.residual(), {}, {}, "not-in-range", m,
                          cfg.tol.chain.chain_tol_rel * x.norm()});
      }
    }
  }
}

void run_mt(const ExperimentConfig& cfg, Report& r) {
  const Operator& op = *cfg.op;
  for (const auto& spec : vectors_or_default(cfg)) {
    const Vec x = spec.materialize(op.dim());
    const MtMembership mt = is_in_mt(op, x, cfg.horizon.value_or(0), std::nullopt, cfg.tol.chain);
    for (const auto& row : mt.profile.rows) {
      r.rows.push_back({"t-infinity", spec.id, "joint", row.m, row.residual, row.preimage_norm, {},
                        row.residual <= mt.profile.tol ? "solvable" : "no-preimage", mt.horizon,
                        mt.profile.tol});
    }
    r.rows.push_back({"mt-membership", spec.id, "joint", mt.horizon, {}, mt.sup_norm,
                      mt.growth_slope, std::string(to_string(mt.verdict)), mt.horizon,
                      mt.bound_cap});
    if (!mt.witness.empty()) r.diagnostics.emplace_back("witness " + spec.id, mt.witness);
    if (mt.dual_checks) {
      r.diagnostics.emplace_back("dual_check " + spec.id,
                                 std::string(mt.dual_ok ? "ok" : "violated") + " on " +
                                     std::to_string(mt.dual_checks) + " samples");
    }
  }
}

void run_inverse(const ExperimentConfig& cfg, Report& r) {
  const Operator& op = *cfg.op;
  const std::size_t h = cfg.horizon.value_or(200);
  for (const auto& spec : vectors_or_default(cfg)) {
    const InverseOrbit io = inverse_orbit_growth(op, spec.materialize(op.dim()), h, cfg.tol.verdict);
    for (std::size_t n = 0; n < io.norms.size(); ++n) {
      r.rows.push_back({"inverse-orbit", spec.id, "inverse", n, {}, io.norms[n], {}, "", {}, {}});
    }
    r.rows.push_back({"inverse-verdict", spec.id, "inverse", io.norms.size() - 1, {}, {}, {},
                      std::string(to_string(io.verdict)), h, cfg.tol.verdict.growth_factor});
    orbit_rows(r, spec.id, io.adjoint_orbit, h);
    r.rows.push_back({"iff-check", spec.id, "", {}, {}, {}, {},
                      io.iff_consistent ? "consistent" : "inconsistent", h,
                      cfg.tol.verdict.decay_tol});
  }
}

}  // namespace

Report run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  if (cfg.experiment == ExperimentKind::verify) {
    VerifyOptions vo;
    vo.dim = cfg.dim;
    // Cases whose size parameter is the operator dimension can take it from
    // the operator expression.
    const bool dim_is_op_dim = cfg.verify_case == "example2" || cfg.verify_case == "example4" ||
                               cfg.verify_case == "example5" || cfg.verify_case == "corollary5";
    if (!vo.dim && cfg.op && dim_is_op_dim) vo.dim = cfg.op->dim();
    vo.horizon = cfg.horizon;
    vo.seed = cfg.seed;
    r = verify(cfg.verify_case, vo);
  } else {
    r.experiment = std::string(to_string(cfg.experiment));
    r.seed = cfg.seed;
    r.diagnostics.emplace_back("operator", cfg.op->label());
    r.diagnostics.emplace_back("dim", std::to_string(cfg.op->dim()));
    switch (cfg.experiment) {
      case ExperimentKind::orbit: run_orbit(cfg, r); break;
      case ExperimentKind::classify: run_classify(cfg, r); break;
      case ExperimentKind::gram: run_gram(cfg, r); break;
      case ExperimentKind::decompose: run_decompose(cfg, r); break;
      case ExperimentKind::kerchy: run_kerchy(cfg, r); break;
      case ExperimentKind::backward: run_backward(cfg, r); break;
      case ExperimentKind::mt_membership: run_mt(cfg, r); break;
      case ExperimentKind::inverse_growth: run_inverse(cfg, r); break;
      case ExperimentKind::verify: break;
    }
  }
  if (!cfg.operator_echo.empty()) r.echo = r.experiment + " " + cfg.operator_echo;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace asymptotica
