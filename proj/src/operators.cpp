#include "asymptotica/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace asymptotica {

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::forward_shift: return "forward-shift";
    case OperatorKind::backward_shift: return "backward-shift";
    case OperatorKind::dense: return "dense";
    case OperatorKind::volterra: return "volterra";
    case OperatorKind::direct_sum: return "direct-sum";
    case OperatorKind::block_2x2: return "block-2x2";
    case OperatorKind::inverse: return "inverse";
    case OperatorKind::similarity: return "similarity";
    case OperatorKind::idempotent_pairsum: return "idempotent-pairsum";
  }
  return "unknown";
}

std::string_view to_string(QuadratureScheme scheme) {
  return scheme == QuadratureScheme::midpoint ? "midpoint" : "trapezoid";
}

QuadratureScheme parse_scheme(std::string_view name) {
  if (name == "midpoint") return QuadratureScheme::midpoint;
  if (name == "trapezoid") return QuadratureScheme::trapezoid;
  throw Error("unknown quadrature scheme '" + std::string(name) + "'");
}

namespace detail {

std::size_t Node::faithful_horizon(const Vec&) const { return kUnboundedHorizon; }

bool Node::faithful(std::size_t, std::size_t) const { return true; }

Mat Node::dense() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Mat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    out.col(j) = apply(e);
  }
  return out;
}

}  // namespace detail

namespace {

using detail::Node;

class DenseNode final : public Node {
 public:
  DenseNode(Mat a, std::string label, OperatorKind kind = OperatorKind::dense,
            std::optional<double> hint = std::nullopt)
      : a_(std::move(a)), label_(std::move(label)), kind_(kind), hint_(hint) {
    if (a_.rows() != a_.cols() || a_.rows() == 0) {
      throw DimensionError("dense operator must be square and nonempty");
    }
  }
  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  OperatorKind kind() const override { return kind_; }
  std::string label() const override { return label_; }
  Vec apply(const Vec& x) const override { return a_ * x; }
  Vec adjoint_apply(const Vec& y) const override { return a_.adjoint() * y; }
  std::optional<double> norm_bound_hint() const override { return hint_; }
  Mat dense() const override { return a_; }

 private:
  Mat a_;
  std::string label_;
  OperatorKind kind_;
  std::optional<double> hint_;
};

class DiagonalNode final : public Node {
 public:
  DiagonalNode(Vec d, std::string label) : d_(std::move(d)), label_(std::move(label)) {
    if (d_.size() == 0) {
      throw DimensionError("diagonal operator must be nonempty");
    }
  }
  std::size_t dim() const override { return static_cast<std::size_t>(d_.size()); }
  OperatorKind kind() const override { return OperatorKind::dense; }
  std::string label() const override { return label_; }
  Vec apply(const Vec& x) const override { return d_.cwiseProduct(x); }
  Vec adjoint_apply(const Vec& y) const override { return d_.conjugate().cwiseProduct(y); }
  std::optional<double> norm_bound_hint() const override { return d_.cwiseAbs().maxCoeff(); }
  Mat dense() const override { return d_.asDiagonal(); }

 private:
  Vec d_;
  std::string label_;
};

class ShiftNode final : public Node {
 public:
  ShiftNode(std::vector<double> weights, bool forward, std::string label)
      : w_(std::move(weights)), forward_(forward), label_(std::move(label)) {}
  std::size_t dim() const override { return w_.size() + 1; }
  OperatorKind kind() const override {
    return forward_ ? OperatorKind::forward_shift : OperatorKind::backward_shift;
  }
  std::string label() const override { return label_; }
  Vec apply(const Vec& x) const override { return forward_ ? up(x) : down(x); }
  Vec adjoint_apply(const Vec& y) const override { return forward_ ? down(y) : up(y); }
  std::size_t faithful_horizon(const Vec& x) const override {
    const std::size_t s = support(x);
    if (s == 0) {
      return kUnboundedHorizon;
    }
    return dim() - s;
  }
  bool faithful(std::size_t s, std::size_t n) const override { return s + n <= dim(); }
  std::optional<double> norm_bound_hint() const override {
    return w_.empty() ? 0.0 : *std::max_element(w_.begin(), w_.end());
  }
  const std::vector<double>& weights() const { return w_; }
  bool forward() const { return forward_; }

 private:
  // e_i -> w_i e_{i+1}
  Vec up(const Vec& x) const {
    Vec out = Vec::Zero(x.size());
    for (std::size_t i = 0; i < w_.size(); ++i) {
      out(static_cast<Eigen::Index>(i + 1)) = w_[i] * x(static_cast<Eigen::Index>(i));
    }
    return out;
  }
  // e_{i+1} -> w_i e_i
  Vec down(const Vec& x) const {
    Vec out = Vec::Zero(x.size());
    for (std::size_t i = 0; i < w_.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = w_[i] * x(static_cast<Eigen::Index>(i + 1));
    }
    return out;
  }

  std::vector<double> w_;
  bool forward_;
  std::string label_;
};

class PairSumNode final : public Node {
 public:
  explicit PairSumNode(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  OperatorKind kind() const override { return OperatorKind::idempotent_pairsum; }
  std::string label() const override { return "example2(" + std::to_string(dim_) + ")"; }
  Vec apply(const Vec& x) const override {
    Vec out = Vec::Zero(x.size());
    for (Eigen::Index k = 0; k + 1 < x.size(); k += 2) {
      out(k + 1) = x(k) + x(k + 1);
    }
    return out;
  }
  Vec adjoint_apply(const Vec& y) const override {
    Vec out = Vec::Zero(y.size());
    for (Eigen::Index k = 0; k + 1 < y.size(); k += 2) {
      out(k) = y(k + 1);
      out(k + 1) = y(k + 1);
    }
    return out;
  }
  // ||[[0,0],[1,1]]|| = sqrt(2)
  std::optional<double> norm_bound_hint() const override { return std::sqrt(2.0); }

 private:
  std::size_t dim_;
};

class VolterraNode final : public Node {
 public:
  VolterraNode(std::size_t m, QuadratureScheme scheme) : m_(m), scheme_(scheme) {}
  std::size_t dim() const override { return m_; }
  OperatorKind kind() const override { return OperatorKind::volterra; }
  std::string label() const override {
    return "volterra(" + std::to_string(m_) + "," + std::string(to_string(scheme_)) + ")";
  }
  Vec apply(const Vec& f) const override {
    const auto n = static_cast<Eigen::Index>(m_);
    Vec out(n);
    if (scheme_ == QuadratureScheme::midpoint) {
      const double h = 1.0 / static_cast<double>(m_);
      Complex acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        out(j) = h * (acc + 0.5 * f(j));
        acc += f(j);
      }
    } else {
      const double h = 1.0 / static_cast<double>(m_ - 1);
      out(0) = 0.0;
      Complex acc = 0.5 * f(0);
      for (Eigen::Index j = 1; j < n; ++j) {
        out(j) = h * (acc + 0.5 * f(j));
        acc += f(j);
      }
    }
    return out;
  }
  Vec adjoint_apply(const Vec& g) const override {
    const auto n = static_cast<Eigen::Index>(m_);
    Vec out(n);
    if (scheme_ == QuadratureScheme::midpoint) {
      const double h = 1.0 / static_cast<double>(m_);
      Complex acc = 0.0;
      for (Eigen::Index k = n - 1; k >= 0; --k) {
        out(k) = h * (acc + 0.5 * g(k));
        acc += g(k);
      }
    } else {
      const double h = 1.0 / static_cast<double>(m_ - 1);
      Complex acc = 0.0;
      for (Eigen::Index k = n - 1; k >= 1; --k) {
        out(k) = h * (acc + 0.5 * g(k));
        acc += g(k);
      }
      out(0) = 0.5 * h * acc;
    }
    return out;
  }
  Mat dense() const override {
    const auto n = static_cast<Eigen::Index>(m_);
    Mat a = Mat::Zero(n, n);
    if (scheme_ == QuadratureScheme::midpoint) {
      const double h = 1.0 / static_cast<double>(m_);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < j; ++k) a(j, k) = h;
        a(j, j) = 0.5 * h;
      }
    } else {
      const double h = 1.0 / static_cast<double>(m_ - 1);
      for (Eigen::Index j = 1; j < n; ++j) {
        a(j, 0) = 0.5 * h;
        for (Eigen::Index k = 1; k < j; ++k) a(j, k) = h;
        a(j, j) = 0.5 * h;
      }
    }
    return a;
  }

 private:
  std::size_t m_;
  QuadratureScheme scheme_;
};

class ProjectionConstantsNode final : public Node {
 public:
  explicit ProjectionConstantsNode(std::size_t m) : m_(m) {}
  std::size_t dim() const override { return m_; }
  OperatorKind kind() const override { return OperatorKind::dense; }
  std::string label() const override { return "projection_constants(" + std::to_string(m_) + ")"; }
  Vec apply(const Vec& f) const override {
    const Complex mean = f.sum() / static_cast<double>(m_);
    return Vec::Constant(f.size(), mean);
  }
  Vec adjoint_apply(const Vec& g) const override { return apply(g); }
  std::optional<double> norm_bound_hint() const override { return 1.0; }

 private:
  std::size_t m_;
};

class DirectSumNode final : public Node {
 public:
  explicit DirectSumNode(std::vector<Operator> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) {
      throw DimensionError("direct_sum needs at least one summand");
    }
    std::size_t off = 0;
    for (const auto& op : ops_) {
      offsets_.push_back(off);
      off += op.dim();
    }
    dim_ = off;
  }
  std::size_t dim() const override { return dim_; }
  OperatorKind kind() const override { return OperatorKind::direct_sum; }
  std::string label() const override {
    return "direct_sum[" + std::to_string(ops_.size()) + " blocks]";
  }
  Vec apply(const Vec& x) const override {
    Vec out(x.size());
    for (std::size_t b = 0; b < ops_.size(); ++b) {
      const auto off = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(ops_[b].dim());
      out.segment(off, n) = ops_[b].apply(x.segment(off, n));
    }
    return out;
  }
  Vec adjoint_apply(const Vec& y) const override {
    Vec out(y.size());
    for (std::size_t b = 0; b < ops_.size(); ++b) {
      const auto off = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(ops_[b].dim());
      out.segment(off, n) = ops_[b].adjoint_apply(y.segment(off, n));
    }
    return out;
  }
  std::size_t faithful_horizon(const Vec& x) const override {
    std::size_t h = kUnboundedHorizon;
    for (std::size_t b = 0; b < ops_.size(); ++b) {
      const auto off = static_cast<Eigen::Index>(offsets_[b]);
      const auto n = static_cast<Eigen::Index>(ops_[b].dim());
      h = std::min(h, ops_[b].faithful_horizon(x.segment(off, n)));
    }
    return h;
  }
  bool faithful(std::size_t s, std::size_t n) const override {
    return std::all_of(ops_.begin(), ops_.end(), [&](const Operator& op) {
      return op.faithful(std::min(s, op.dim()), n);
    });
  }
  std::optional<double> norm_bound_hint() const override {
    double best = 0.0;
    for (const auto& op : ops_) {
      const auto h = op.norm_bound_hint();
      if (!h) return std::nullopt;
      best = std::max(best, *h);
    }
    return best;
  }
  Mat dense() const override {
    const auto n = static_cast<Eigen::Index>(dim_);
    Mat out = Mat::Zero(n, n);
    for (std::size_t b = 0; b < ops_.size(); ++b) {
      const auto off = static_cast<Eigen::Index>(offsets_[b]);
      const auto d = static_cast<Eigen::Index>(ops_[b].dim());
      out.block(off, off, d, d) = ops_[b].dense();
    }
    return out;
  }
  const std::vector<Operator>& ops() const { return ops_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

 private:
  std::vector<Operator> ops_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
};

class BlockLowerNode final : public Node {
 public:
  BlockLowerNode(Operator t11, Mat t21, Operator t22)
      : t11_(std::move(t11)), t21_(std::move(t21)), t22_(std::move(t22)) {
    if (static_cast<std::size_t>(t21_.rows()) != t22_.dim() ||
        static_cast<std::size_t>(t21_.cols()) != t11_.dim()) {
      throw DimensionError("block_lower_2x2: T21 must be " + std::to_string(t22_.dim()) +
                           "x" + std::to_string(t11_.dim()));
    }
  }
  std::size_t dim() const override { return t11_.dim() + t22_.dim(); }
  OperatorKind kind() const override { return OperatorKind::block_2x2; }
  std::string label() const override {
    return "block_lower_2x2(" + t11_.label() + ", " + t22_.label() + ")";
  }
  Vec apply(const Vec& x) const override {
    const auto d1 = static_cast<Eigen::Index>(t11_.dim());
    const auto d2 = static_cast<Eigen::Index>(t22_.dim());
    const Vec a = x.head(d1);
    const Vec b = x.tail(d2);
    Vec out(x.size());
    out.head(d1) = t11_.apply(a);
    out.tail(d2) = t21_ * a + t22_.apply(b);
    return out;
  }
  Vec adjoint_apply(const Vec& y) const override {
    const auto d1 = static_cast<Eigen::Index>(t11_.dim());
    const auto d2 = static_cast<Eigen::Index>(t22_.dim());
    const Vec a = y.head(d1);
    const Vec b = y.tail(d2);
    Vec out(y.size());
    out.head(d1) = t11_.adjoint_apply(a) + t21_.adjoint() * b;
    out.tail(d2) = t22_.adjoint_apply(b);
    return out;
  }
  std::size_t faithful_horizon(const Vec& x) const override {
    const auto d1 = static_cast<Eigen::Index>(t11_.dim());
    const auto d2 = static_cast<Eigen::Index>(t22_.dim());
    return std::min(t11_.faithful_horizon(x.head(d1)), t22_.faithful_horizon(x.tail(d2)));
  }
  Mat dense() const override {
    const auto d1 = static_cast<Eigen::Index>(t11_.dim());
    const auto d2 = static_cast<Eigen::Index>(t22_.dim());
    Mat out = Mat::Zero(d1 + d2, d1 + d2);
    out.topLeftCorner(d1, d1) = t11_.dense();
    out.bottomLeftCorner(d2, d1) = t21_;
    out.bottomRightCorner(d2, d2) = t22_.dense();
    return out;
  }

 private:
  Operator t11_;
  Mat t21_;
  Operator t22_;
};

class InverseNode final : public Node {
 public:
  InverseNode(const Operator& op, double max_condition) : label_("inverse(" + op.label() + ")") {
    const Mat a = op.dense();
    Eigen::BDCSVD<Mat> svd(a);
    const RealVec& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    condition_ = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    if (!(condition_ < max_condition)) {
      std::ostringstream msg;
      msg << "inverse_op: operator " << op.label() << " is numerically singular (condition "
          << condition_ << ")";
      throw NumericalError(msg.str());
    }
    inv_ = a.partialPivLu().inverse();
    norm_ = 1.0 / smin;
  }
  std::size_t dim() const override { return static_cast<std::size_t>(inv_.rows()); }
  OperatorKind kind() const override { return OperatorKind::inverse; }
  std::string label() const override { return label_; }
  Vec apply(const Vec& x) const override { return inv_ * x; }
  Vec adjoint_apply(const Vec& y) const override { return inv_.adjoint() * y; }
  std::optional<double> norm_bound_hint() const override { return norm_; }
  Mat dense() const override { return inv_; }

 private:
  Mat inv_;
  std::string label_;
  double condition_ = 0.0;
  double norm_ = 0.0;
};

class SimilarityNode final : public Node {
 public:
  SimilarityNode(Operator s, Operator s_inv, Operator t)
      : s_(std::move(s)), s_inv_(std::move(s_inv)), t_(std::move(t)) {}
  std::size_t dim() const override { return t_.dim(); }
  OperatorKind kind() const override { return OperatorKind::similarity; }
  std::string label() const override {
    return "similarity(" + s_.label() + ", " + t_.label() + ")";
  }
  Vec apply(const Vec& x) const override { return s_inv_.apply(t_.apply(s_.apply(x))); }
  Vec adjoint_apply(const Vec& y) const override {
    return s_.adjoint_apply(t_.adjoint_apply(s_inv_.adjoint_apply(y)));
  }
  std::size_t faithful_horizon(const Vec& x) const override { return t_.faithful_horizon(x); }

 private:
  Operator s_;
  Operator s_inv_;
  Operator t_;
};

class AdjointNode final : public Node {
 public:
  explicit AdjointNode(Operator op) : op_(std::move(op)) {}
  std::size_t dim() const override { return op_.dim(); }
  OperatorKind kind() const override { return OperatorKind::dense; }
  std::string label() const override { return "adjoint(" + op_.label() + ")"; }
  Vec apply(const Vec& x) const override { return op_.adjoint_apply(x); }
  Vec adjoint_apply(const Vec& y) const override { return op_.apply(y); }
  std::size_t faithful_horizon(const Vec& x) const override { return op_.faithful_horizon(x); }
  std::optional<double> norm_bound_hint() const override { return op_.norm_bound_hint(); }
  Mat dense() const override { return op_.dense().adjoint(); }

 private:
  Operator op_;
};

class ScaleNode final : public Node {
 public:
  ScaleNode(Operator op, Complex c) : op_(std::move(op)), c_(c) {}
  std::size_t dim() const override { return op_.dim(); }
  OperatorKind kind() const override { return op_.kind(); }
  std::string label() const override {
    std::ostringstream s;
    s << "scale(" << op_.label() << ", " << c_ << ")";
    return s.str();
  }
  Vec apply(const Vec& x) const override { return c_ * op_.apply(x); }
  Vec adjoint_apply(const Vec& y) const override { return std::conj(c_) * op_.adjoint_apply(y); }
  std::size_t faithful_horizon(const Vec& x) const override { return op_.faithful_horizon(x); }
  bool faithful(std::size_t s, std::size_t n) const override { return op_.faithful(s, n); }
  std::optional<double> norm_bound_hint() const override {
    const auto h = op_.norm_bound_hint();
    if (!h) return std::nullopt;
    return std::abs(c_) * *h;
  }
  Mat dense() const override { return c_ * op_.dense(); }
  const Operator& inner_op() const { return op_; }
  Complex factor() const { return c_; }

 private:
  Operator op_;
  Complex c_;
};

class ComposeNode final : public Node {
 public:
  explicit ComposeNode(std::vector<Operator> f) : f_(std::move(f)) {
    if (f_.empty()) {
      throw DimensionError("compose needs at least one factor");
    }
    for (const auto& op : f_) {
      if (op.dim() != f_.front().dim()) {
        throw DimensionError("compose: factor dimensions differ (" +
                             std::to_string(op.dim()) + " vs " +
                             std::to_string(f_.front().dim()) + ")");
      }
    }
  }
  std::size_t dim() const override { return f_.front().dim(); }
  OperatorKind kind() const override { return OperatorKind::dense; }
  std::string label() const override {
    std::string s = "compose(";
    for (std::size_t i = 0; i < f_.size(); ++i) {
      s += (i ? ", " : "") + f_[i].label();
    }
    return s + ")";
  }
  Vec apply(const Vec& x) const override {
    Vec v = x;
    for (auto it = f_.rbegin(); it != f_.rend(); ++it) v = it->apply(v);
    return v;
  }
  Vec adjoint_apply(const Vec& y) const override {
    Vec v = y;
    for (const auto& op : f_) v = op.adjoint_apply(v);
    return v;
  }
  std::size_t faithful_horizon(const Vec& x) const override {
    std::size_t h = kUnboundedHorizon;
    for (const auto& op : f_) h = std::min(h, op.faithful_horizon(x));
    return h == kUnboundedHorizon ? h : h / f_.size();
  }
  std::optional<double> norm_bound_hint() const override {
    double prod = 1.0;
    for (const auto& op : f_) {
      const auto h = op.norm_bound_hint();
      if (!h) return std::nullopt;
      prod *= *h;
    }
    return prod;
  }

 private:
  std::vector<Operator> f_;
};

class SumNode final : public Node {
 public:
  explicit SumNode(std::vector<Operator> t) : t_(std::move(t)) {
    if (t_.empty()) {
      throw DimensionError("sum needs at least one term");
    }
    for (const auto& op : t_) {
      if (op.dim() != t_.front().dim()) {
        throw DimensionError("sum: term dimensions differ (" + std::to_string(op.dim()) +
                             " vs " + std::to_string(t_.front().dim()) + ")");
      }
    }
  }
  std::size_t dim() const override { return t_.front().dim(); }
  OperatorKind kind() const override { return OperatorKind::dense; }
  std::string label() const override {
    std::string s = "sum(";
    for (std::size_t i = 0; i < t_.size(); ++i) {
      s += (i ? ", " : "") + t_[i].label();
    }
    return s + ")";
  }
  Vec apply(const Vec& x) const override {
    Vec v = t_.front().apply(x);
    for (std::size_t i = 1; i < t_.size(); ++i) v += t_[i].apply(x);
    return v;
  }
  Vec adjoint_apply(const Vec& y) const override {
    Vec v = t_.front().adjoint_apply(y);
    for (std::size_t i = 1; i < t_.size(); ++i) v += t_[i].adjoint_apply(y);
    return v;
  }
  std::size_t faithful_horizon(const Vec& x) const override {
    std::size_t h = kUnboundedHorizon;
    for (const auto& op : t_) h = std::min(h, op.faithful_horizon(x));
    return h;
  }
  std::optional<double> norm_bound_hint() const override {
    double total = 0.0;
    for (const auto& op : t_) {
      const auto h = op.norm_bound_hint();
      if (!h) return std::nullopt;
      total += *h;
    }
    return total;
  }

 private:
  std::vector<Operator> t_;
};

}  // namespace

Operator::Operator(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {
  if (!node_) {
    throw Error("Operator: null node");
  }
}

void Operator::check_size(const Vec& x, const char* what) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw DimensionError(std::string(what) + ": vector of size " + std::to_string(x.size()) +
                         " for operator " + label() + " of dimension " +
                         std::to_string(dim()));
  }
}

Vec Operator::apply(const Vec& x) const {
  check_size(x, "apply");
  return node_->apply(x);
}

Vec Operator::adjoint_apply(const Vec& y) const {
  check_size(y, "adjoint_apply");
  return node_->adjoint_apply(y);
}

Vec Operator::apply_power(const Vec& x, std::size_t n) const {
  check_size(x, "apply_power");
  Vec v = x;
  for (std::size_t i = 0; i < n; ++i) v = node_->apply(v);
  return v;
}

Vec Operator::adjoint_apply_power(const Vec& y, std::size_t n) const {
  check_size(y, "adjoint_apply_power");
  Vec v = y;
  for (std::size_t i = 0; i < n; ++i) v = node_->adjoint_apply(v);
  return v;
}

std::size_t Operator::faithful_horizon(const Vec& x) const {
  check_size(x, "faithful_horizon");
  return node_->faithful_horizon(x);
}

std::span<const Operator> Operator::blocks() const {
  if (const auto* ds = dynamic_cast<const DirectSumNode*>(node_.get())) {
    return ds->ops();
  }
  return {};
}

std::span<const std::size_t> Operator::block_offsets() const {
  if (const auto* ds = dynamic_cast<const DirectSumNode*>(node_.get())) {
    return ds->offsets();
  }
  return {};
}

std::optional<ShiftView> Operator::shift_view() const {
  if (const auto* sh = dynamic_cast<const ShiftNode*>(node_.get())) {
    return ShiftView{sh->forward(), sh->weights(), Complex(1.0, 0.0)};
  }
  if (const auto* sc = dynamic_cast<const ScaleNode*>(node_.get())) {
    auto inner = sc->inner_op().shift_view();
    if (inner) {
      inner->factor *= sc->factor();
    }
    return inner;
  }
  return std::nullopt;
}

Operator identity(std::size_t dim) {
  if (dim == 0) {
    throw DimensionError("identity: dimension must be positive");
  }
  return Operator(std::make_shared<DiagonalNode>(Vec::Ones(static_cast<Eigen::Index>(dim)),
                                                 "identity(" + std::to_string(dim) + ")"));
}

Operator dense_op(Mat matrix, std::string label) {
  return Operator(std::make_shared<DenseNode>(std::move(matrix), std::move(label)));
}

Operator diagonal(Vec entries, std::string label) {
  return Operator(std::make_shared<DiagonalNode>(std::move(entries), std::move(label)));
}

Operator jordan_nilpotent(std::size_t dim) {
  if (dim == 0) {
    throw DimensionError("jordan_nilpotent: dimension must be positive");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Mat j = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) j(i + 1, i) = 1.0;
  return Operator(std::make_shared<DenseNode>(std::move(j), "jordan(" + std::to_string(dim) + ")",
                                              OperatorKind::dense, 1.0));
}

Operator diag_unitary(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  Vec d(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::polar(1.0, phase(gen));
  return diagonal(std::move(d), "diag_unitary(" + std::to_string(dim) + ")");
}

Operator forward_shift(const WeightSchedule& w, std::size_t dim) {
  if (dim < 2) {
    throw DimensionError("forward_shift: dimension must be at least 2");
  }
  return Operator(std::make_shared<ShiftNode>(w.truncated(dim - 1), true,
                                              "forward_shift(" + w.description + ", " +
                                                  std::to_string(dim) + ")"));
}

Operator backward_shift(const WeightSchedule& w, std::size_t dim) {
  if (dim < 2) {
    throw DimensionError("backward_shift: dimension must be at least 2");
  }
  return Operator(std::make_shared<ShiftNode>(w.truncated(dim - 1), false,
                                              "backward_shift(" + w.description + ", " +
                                                  std::to_string(dim) + ")"));
}

Operator example1(std::size_t dim) {
  if (dim < 2) {
    throw DimensionError("example1: dimension must be at least 2");
  }
  return Operator(std::make_shared<ShiftNode>(example1_weights(dim - 1), true,
                                              "example1(" + std::to_string(dim) + ")"));
}

Operator example2_op(std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) {
    throw DimensionError("example2: dimension must be a positive even number, got " +
                         std::to_string(dim));
  }
  return Operator(std::make_shared<PairSumNode>(dim));
}

Operator example3(std::size_t blocks, std::size_t block_dim) {
  if (blocks == 0) {
    throw DimensionError("example3: need at least one block");
  }
  std::vector<Operator> ops;
  ops.reserve(blocks);
  for (std::size_t n = 1; n <= blocks; ++n) {
    ops.push_back(backward_shift(example3_weights(n), block_dim));
  }
  return direct_sum(std::move(ops));
}

RealVec quadrature_grid(std::size_t m, QuadratureScheme scheme) {
  RealVec t(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    t(j) = scheme == QuadratureScheme::midpoint
               ? (static_cast<double>(j) + 0.5) / static_cast<double>(m)
               : static_cast<double>(j) / static_cast<double>(m - 1);
  }
  return t;
}

Operator volterra(std::size_t m, QuadratureScheme scheme) {
  if (m < 2) {
    throw DimensionError("volterra: need at least 2 grid points");
  }
  return Operator(std::make_shared<VolterraNode>(m, scheme));
}

Operator mult_exp(std::size_t m, QuadratureScheme scheme) {
  if (m < 2) {
    throw DimensionError("mult_exp: need at least 2 grid points");
  }
  const RealVec t = quadrature_grid(m, scheme);
  Vec d(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) d(j) = std::exp(t(j));
  return diagonal(std::move(d), "mult_exp(" + std::to_string(m) + ")");
}

Operator projection_constants(std::size_t m) {
  if (m == 0) {
    throw DimensionError("projection_constants: dimension must be positive");
  }
  return Operator(std::make_shared<ProjectionConstantsNode>(m));
}

Operator direct_sum(std::vector<Operator> ops) {
  return Operator(std::make_shared<DirectSumNode>(std::move(ops)));
}

Operator block_lower_2x2(Operator t11, Mat t21, Operator t22) {
  return Operator(
      std::make_shared<BlockLowerNode>(std::move(t11), std::move(t21), std::move(t22)));
}

Operator inverse_op(const Operator& op, double max_condition) {
  return Operator(std::make_shared<InverseNode>(op, max_condition));
}

Operator adjoint_op(const Operator& op) {
  if (const auto* sh = dynamic_cast<const ShiftNode*>(&op.node())) {
    // The adjoint of a weighted shift is the opposite shift with the same weights.
    return Operator(std::make_shared<ShiftNode>(sh->weights(), !sh->forward(),
                                                "adjoint(" + op.label() + ")"));
  }
  if (!op.blocks().empty()) {
    std::vector<Operator> adj;
    for (const auto& b : op.blocks()) adj.push_back(adjoint_op(b));
    return direct_sum(std::move(adj));
  }
  return Operator(std::make_shared<AdjointNode>(op));
}

Operator scale(const Operator& op, Complex factor) {
  return Operator(std::make_shared<ScaleNode>(op, factor));
}

Operator compose(const Operator& a, const Operator& b) { return compose({a, b}); }

Operator compose(std::vector<Operator> factors) {
  return Operator(std::make_shared<ComposeNode>(std::move(factors)));
}

Operator sum(std::vector<Operator> terms) {
  return Operator(std::make_shared<SumNode>(std::move(terms)));
}

Operator similarity(const Operator& s, const Operator& t) {
  if (s.dim() != t.dim()) {
    throw DimensionError("similarity: dimensions differ");
  }
  Operator s_inv = inverse_op(s);
  if (const auto* d = dynamic_cast<const DiagonalNode*>(&s.node())) {
    s_inv = diagonal(d->dense().diagonal().cwiseInverse(), "inverse(" + s.label() + ")");
  }
  return Operator(std::make_shared<SimilarityNode>(s, std::move(s_inv), t));
}

const std::vector<ZooEntry>& zoo_catalog() {
  static const std::vector<ZooEntry> catalog = {
      {"forward_shift", "forward_shift(weights, dim)", "weighted unilateral shift e_i -> w_i e_{i+1}"},
      {"backward_shift", "backward_shift(weights, dim)", "weighted backward shift e_{i+1} -> w_i e_i"},
      {"example1", "example1(dim)", "forward shift with the N_k block weight schedule"},
      {"example2", "example2(dim)", "idempotent pair-sum map (x1,x2,..) -> (0,x1+x2,0,x3+x4,..)"},
      {"example3", "example3(blocks, block_dim)", "direct sum of backward shifts with weights (1/n)^{1/(i-1)-1/i}"},
      {"volterra", "volterra(M, scheme)", "quadrature matrix of f -> int_0^x f"},
      {"mult_exp", "mult_exp(M, scheme)", "multiplication by e^t on the quadrature grid"},
      {"identity", "identity(dim)", "identity operator"},
      {"projection_constants", "projection_constants(M)", "rank-one averaging projection onto constants"},
      {"jordan", "jordan(dim)", "nilpotent Jordan block e_i -> e_{i+1}"},
      {"diag_unitary", "diag_unitary(dim, seed)", "diagonal unitary with seeded random phases"},
      {"diagonal", "diagonal(entries)", "diagonal operator with given entries"},
      {"matrix", "matrix(rows)", "explicit dense matrix"},
      {"sum", "sum(args...)", "sum of operators"},
      {"compose", "compose(args...)", "product, rightmost applied first"},
      {"inverse", "inverse(arg)", "dense inverse (condition number below 1e12)"},
      {"adjoint", "adjoint(arg)", "Hilbert-space adjoint"},
      {"scale", "scale(arg, factor)", "complex multiple"},
      {"direct_sum", "direct_sum(args...)", "orthogonal direct sum, blocks applied independently"},
      {"block_lower_2x2", "block_lower_2x2(t11, t21, t22)", "[[T11, 0], [T21, T22]]"},
      {"similarity", "similarity(s, t)", "s^{-1} t s"},
  };
  return catalog;
}

}  // namespace asymptotica
