#include "hierprox/linop.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hierprox/errors.hpp"

namespace hierprox {

namespace {

RealVec gaussian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RealVec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

void expect_dim(const char* what, int got, int want) {
  if (got != want) {
    std::ostringstream os;
    os << what << ": dimension " << got << ", expected " << want;
    throw StructuralError(os.str());
  }
}

}  // namespace

LinearMap::LinearMap(int domain_dim, int codomain_dim, Action apply, Action adjoint,
                     std::optional<double> opnorm_upper)
    : in_(domain_dim),
      out_(codomain_dim),
      apply_(std::move(apply)),
      adjoint_(std::move(adjoint)),
      upper_(opnorm_upper) {
  if (in_ < 1 || out_ < 1) throw StructuralError("LinearMap: dimensions must be positive");
  if (upper_ && !(*upper_ >= 0.0)) throw ConfigError("LinearMap: opnorm_upper must be >= 0");
}

LinearMap LinearMap::from_matrix(RealMat m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const double fro = m.norm();
  auto shared = std::make_shared<const RealMat>(std::move(m));
  LinearMap out(
      cols, rows, [shared](const RealVec& x) -> RealVec { return (*shared) * x; },
      [shared](const RealVec& u) -> RealVec { return shared->transpose() * u; }, fro);
  out.dense_ = *shared;
  return out;
}

LinearMap LinearMap::identity(int n) { return scaled_identity(n, 1.0); }

LinearMap LinearMap::scaled_identity(int n, double s) {
  return LinearMap(
      n, n, [s](const RealVec& x) -> RealVec { return s * x; },
      [s](const RealVec& u) -> RealVec { return s * u; }, std::abs(s));
}

LinearMap LinearMap::zero(int domain_dim, int codomain_dim) {
  return LinearMap(
      domain_dim, codomain_dim,
      [codomain_dim](const RealVec&) -> RealVec { return RealVec::Zero(codomain_dim); },
      [domain_dim](const RealVec&) -> RealVec { return RealVec::Zero(domain_dim); }, 0.0);
}

LinearMap LinearMap::row(const RealVec& a) {
  RealMat m(1, a.size());
  m.row(0) = a.transpose();
  return from_matrix(std::move(m));
}

RealVec LinearMap::apply(const RealVec& x) const {
  expect_dim("LinearMap::apply input", static_cast<int>(x.size()), in_);
  RealVec y = apply_(x);
  expect_dim("LinearMap::apply output", static_cast<int>(y.size()), out_);
  return y;
}

RealVec LinearMap::adjoint(const RealVec& u) const {
  expect_dim("LinearMap::adjoint input", static_cast<int>(u.size()), out_);
  RealVec x = adjoint_(u);
  expect_dim("LinearMap::adjoint output", static_cast<int>(x.size()), in_);
  return x;
}

RealMat LinearMap::to_dense() const {
  if (dense_) return *dense_;
  RealMat m(out_, in_);
  RealVec e = RealVec::Zero(in_);
  for (int j = 0; j < in_; ++j) {
    e[j] = 1.0;
    m.col(j) = apply(e);
    e[j] = 0.0;
  }
  return m;
}

StackedMap::StackedMap(std::vector<LinearMap> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw StructuralError("StackedMap: no blocks");
  in_ = blocks_.front().domain_dim();
  for (const auto& b : blocks_) {
    expect_dim("StackedMap block domain", b.domain_dim(), in_);
    offsets_.push_back(out_);
    out_ += b.codomain_dim();
  }
}

RealVec StackedMap::apply(const RealVec& x) const {
  RealVec y(out_);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    y.segment(offsets_[i], blocks_[i].codomain_dim()) = blocks_[i].apply(x);
  return y;
}

RealVec StackedMap::adjoint(const RealVec& u) const {
  expect_dim("StackedMap::adjoint input", static_cast<int>(u.size()), out_);
  RealVec x = RealVec::Zero(in_);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    x += blocks_[i].adjoint(u.segment(offsets_[i], blocks_[i].codomain_dim()));
  return x;
}

LinearMap StackedMap::as_map() const {
  bool all_dense = true;
  for (const auto& b : blocks_) all_dense = all_dense && b.matrix() != nullptr;
  if (all_dense) {
    RealMat m(out_, in_);
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      m.middleRows(offsets_[i], blocks_[i].codomain_dim()) = *blocks_[i].matrix();
    return LinearMap::from_matrix(std::move(m));
  }
  std::optional<double> upper = 0.0;
  for (const auto& b : blocks_) {
    if (!b.opnorm_upper()) {
      upper.reset();
      break;
    }
    *upper += *b.opnorm_upper() * *b.opnorm_upper();
  }
  if (upper) *upper = std::sqrt(*upper);
  auto self = std::make_shared<const StackedMap>(*this);
  return LinearMap(
      in_, out_, [self](const RealVec& x) { return self->apply(x); },
      [self](const RealVec& u) { return self->adjoint(u); }, upper);
}

GramSolver::GramSolver(const LinearMap& a) : base_(a) {
  const RealMat m = a.to_dense();
  // A* is taken from the map itself so an inconsistent adjoint shows up here.
  RealMat adj(a.domain_dim(), a.codomain_dim());
  if (const RealMat* d = a.matrix()) {
    adj = d->transpose();
  } else {
    RealVec e = RealVec::Zero(a.codomain_dim());
    for (int j = 0; j < a.codomain_dim(); ++j) {
      e[j] = 1.0;
      adj.col(j) = a.adjoint(e);
      e[j] = 0.0;
    }
  }
  RealMat g = m * adj;
  g.diagonal().array() += 1.0;
  if (g.allFinite()) llt_.compute(g);
  if (!g.allFinite() || llt_.info() != Eigen::Success) {
    const double dmax = g.diagonal().maxCoeff();
    const double dmin = g.diagonal().minCoeff();
    std::ostringstream os;
    os << "GramSolver: I + AA* is not numerically positive definite (diagonal range ["
       << dmin << ", " << dmax << "])";
    throw NumericalError(os.str());
  }
}

RealVec GramSolver::solve(const RealVec& v) const {
  expect_dim("GramSolver::solve", static_cast<int>(v.size()), dim());
  return llt_.solve(v);
}

RealMat GramSolver::solve(const RealMat& v) const {
  expect_dim("GramSolver::solve", static_cast<int>(v.rows()), dim());
  return llt_.solve(v);
}

bool adjoint_check(const LinearMap& a, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("adjoint_check: trials must be >= 1");
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const RealVec x = gaussian(a.domain_dim(), rng);
    const RealVec u = gaussian(a.codomain_dim(), rng);
    const double lhs = a.apply(x).dot(u);
    const double rhs = x.dot(a.adjoint(u));
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs))) return false;
  }
  return true;
}

double opnorm_estimate(const LinearMap& a, int iters, std::uint64_t seed) {
  if (iters < 1) throw ConfigError("opnorm_estimate: iters must be >= 1");
  std::mt19937_64 rng(seed);
  RealVec v = gaussian(a.domain_dim(), rng);
  v.normalize();
  // Running max keeps the estimate nondecreasing in iters.
  double best = 0.0;
  for (int k = 0; k < iters; ++k) {
    const RealVec av = a.apply(v);
    best = std::max(best, av.norm());
    RealVec w = a.adjoint(av);
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  if (a.opnorm_upper()) best = std::min(best, *a.opnorm_upper());
  return best;
}

RealVec gram_solve(const GramSolver& g, const RealVec& v) { return g.solve(v); }

}  // namespace hierprox
