#include <algorithm>

#include "asymptotica/asymptotics.hpp"
#include "asymptotica/backward.hpp"
#include "asymptotica/parallel.hpp"

namespace asymptotica {

CorollaryDecomposition decompose_corollary(const Operator& op, std::size_t n_horizon) {
  CorollaryDecomposition d;
  d.gram = asymptote_gram(op, n_horizon, Direction::adjoint);
  d.stable_basis = d.gram.kernel_basis;
  d.mt_closure_basis = d.gram.range_basis;
  if (d.stable_basis.cols() > 0 && d.mt_closure_basis.cols() > 0) {
    d.orthogonality_defect = (d.stable_basis.adjoint() * d.mt_closure_basis).cwiseAbs().maxCoeff();
  }
  d.defect_flagged = d.orthogonality_defect > 1e-6;

  const auto r = static_cast<std::size_t>(d.mt_closure_basis.cols());
  std::vector<char> confirmed(r, 0);
  parallel_for(r, [&](std::size_t j) {
    const Vec v = d.mt_closure_basis.col(static_cast<Eigen::Index>(j));
    confirmed[j] = is_in_mt(op, v).verdict == MtVerdict::in_mt ? 1 : 0;
  });
  d.mt_checked = r;
  d.mt_confirmed = static_cast<std::size_t>(std::count(confirmed.begin(), confirmed.end(), 1));
  return d;
}

}  // namespace asymptotica
