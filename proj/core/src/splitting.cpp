#include "hierprox/splitting.hpp"

#include <cmath>
#include <sstream>

#include "hierprox/errors.hpp"

namespace hierprox {

SplitProblem::SplitProblem(ProxPtr f, std::vector<SplitTerm> terms)
    : f_(std::move(f)), terms_(std::move(terms)) {
  if (!f_) throw StructuralError("SplitProblem: null f");
  n_ = f_->dim();
  if (terms_.empty()) {
    terms_.push_back({std::make_shared<ZeroFunction>(1), LinearMap::zero(n_, 1)});
    padded_ = true;
  }
  std::vector<LinearMap> maps;
  std::vector<ProxPtr> gs;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (!t.g) throw StructuralError("SplitProblem: null g term");
    if (t.a.domain_dim() != n_ || t.a.codomain_dim() != t.g->dim()) {
      std::ostringstream os;
      os << "SplitProblem: term " << i << " has A: R^" << t.a.domain_dim() << " -> R^"
         << t.a.codomain_dim() << " but f lives on R^" << n_ << " and g on R^" << t.g->dim();
      throw StructuralError(os.str());
    }
    maps.push_back(t.a);
    gs.push_back(t.g);
  }
  stacked_ = std::make_shared<const StackedMap>(std::move(maps));
  g_ = std::make_shared<const SeparableSum>(std::move(gs));
  k_ = stacked_->codomain_dim();
}

double SplitProblem::objective(const RealVec& x) const {
  const double fx = f_->value(x);
  if (fx == kInfinity) return kInfinity;
  const double gx = g_->value(stacked_->apply(x));
  if (gx == kInfinity) return kInfinity;
  return fx + gx;
}

DrsOperator::DrsOperator(ProxPtr f, ProxPtr g) : f_(std::move(f)), g_(std::move(g)) {
  if (!f_ || !g_) throw StructuralError("drs_operator: null function");
  if (f_->dim() != g_->dim()) throw StructuralError("drs_operator: f and g dimensions differ");
}

RealVec DrsOperator::apply(const RealVec& z) const {
  const RealVec r = 2.0 * g_->prox(1.0, z) - z;
  return 2.0 * f_->prox(1.0, r) - r;
}

RealVec DrsOperator::extract(const RealVec& z) const { return g_->prox(1.0, z); }

DrsProductI::DrsProductI(const SplitProblem& p)
    : n_(p.dim()), k_(p.codomain_dim()), f_(p.f()), g_(p.g()) {
  a_ = p.stacked().as_map().to_dense();
  GramSolver gs(LinearMap::from_matrix(a_));
  const RealMat ginv = gs.solve(RealMat(RealMat::Identity(k_, k_)));
  xi_.resize(n_, n_ + k_);
  xi_.leftCols(n_) = RealMat::Identity(n_, n_) - a_.transpose() * ginv * a_;
  xi_.rightCols(k_) = a_.transpose() * ginv;
  proj_.resize(n_ + k_, n_ + k_);
  proj_.topRows(n_) = xi_;
  proj_.bottomRows(k_) = a_ * xi_;
}

RealVec DrsProductI::prox_F(const RealVec& z) const {
  RealVec out(n_ + k_);
  out.head(n_) = f_->prox(1.0, z.head(n_));
  out.tail(k_) = g_->prox(1.0, z.tail(k_));
  return out;
}

RealVec DrsProductI::apply(const RealVec& z) const {
  if (z.size() != dim()) throw StructuralError("DrsProductI::apply: dimension mismatch");
  const RealVec r = 2.0 * (proj_ * z) - z;
  return 2.0 * prox_F(r) - r;
}

RealVec DrsProductI::extract(const RealVec& z) const { return xi_ * z; }

std::optional<LinearMap> DrsProductI::extract_map() const { return LinearMap::from_matrix(xi_); }

DrsProductII::DrsProductII(const SplitProblem& p) : n_(p.dim()), f_(p.f()) {
  m_ = p.padded() ? 0 : static_cast<int>(p.terms().size());
  rows_.resize(m_, n_);
  nu_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const auto& t = p.terms()[i];
    if (t.a.codomain_dim() != 1) {
      std::ostringstream os;
      os << "drs_product_II: term " << i << " maps into R^" << t.a.codomain_dim()
         << ", scalar codomain required";
      throw StructuralError(os.str());
    }
    rows_.row(i) = t.a.adjoint(RealVec::Ones(1)).transpose();
    nu_[i] = rows_.row(i).squaredNorm();
    if (!(nu_[i] > 0.0)) {
      std::ostringstream os;
      os << "drs_product_II: term " << i << " has a zero linear map";
      throw StructuralError(os.str());
    }
    g_.push_back(t.g);
  }
}

RealVec DrsProductII::apply(const RealVec& z) const {
  if (z.size() != dim()) throw StructuralError("DrsProductII::apply: dimension mismatch");
  const RealVec mean = extract(z);
  RealVec out(dim());
  RealVec s(1);
  for (int i = 0; i < m_; ++i) {
    const RealVec r = 2.0 * mean - z.segment(i * n_, n_);
    const double ar = rows_.row(i).dot(r);
    s[0] = ar;
    const double pa = g_[i]->prox(nu_[i], s)[0];
    // 2 prox_{g o A}(r) - r = r + 2 A*(prox_{nu g}(Ar) - Ar) / nu
    out.segment(i * n_, n_) = r + (2.0 * (pa - ar) / nu_[i]) * rows_.row(i).transpose();
  }
  const RealVec r = 2.0 * mean - z.segment(m_ * n_, n_);
  out.segment(m_ * n_, n_) = 2.0 * f_->prox(1.0, r) - r;
  return out;
}

RealVec DrsProductII::extract(const RealVec& z) const {
  RealVec mean = RealVec::Zero(n_);
  for (int i = 0; i <= m_; ++i) mean += z.segment(i * n_, n_);
  return mean / static_cast<double>(m_ + 1);
}

std::optional<LinearMap> DrsProductII::extract_map() const {
  const int n = n_;
  const int blocks = m_ + 1;
  return LinearMap(
      n * blocks, n,
      [n, blocks](const RealVec& z) -> RealVec {
        RealVec mean = RealVec::Zero(n);
        for (int i = 0; i < blocks; ++i) mean += z.segment(i * n, n);
        return mean / static_cast<double>(blocks);
      },
      [n, blocks](const RealVec& u) -> RealVec {
        RealVec out(n * blocks);
        for (int i = 0; i < blocks; ++i) out.segment(i * n, n) = u / static_cast<double>(blocks);
        return out;
      },
      1.0 / std::sqrt(static_cast<double>(blocks)));
}

double lal_check_norm(const SplitProblem& p) {
  const double a = opnorm_estimate(p.stacked().as_map());
  return std::sqrt(1.0 + a * a);
}

LalOperator::LalOperator(const SplitProblem& p, double u)
    : n_(p.dim()), k_(p.codomain_dim()), f_(p.f()), g_(p.g()) {
  a_ = p.stacked().as_map().to_dense();
  const double check = lal_check_norm(p);
  u_ = u > 0.0 ? u : 0.99 / check;
  if (u_ * check > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "lal_operator: u * |A check|_op = " << u_ * check << " exceeds 1 (|A check|_op = "
       << check << ", so u must be <= " << 1.0 / check << ")";
    throw ConfigError(os.str());
  }
}

RealVec LalOperator::apply(const RealVec& z) const {
  if (z.size() != dim()) throw StructuralError("LalOperator::apply: dimension mismatch");
  const auto x = z.head(n_);
  const auto y = z.segment(n_, k_);
  const auto nu = z.tail(k_);
  const RealVec ax = a_ * x;
  const double u2 = u_ * u_;
  RealVec out(dim());
  out.head(n_) = f_->prox(1.0, x - u2 * (a_.transpose() * (ax - y)) + u_ * (a_.transpose() * nu));
  out.segment(n_, k_) = g_->prox(1.0, y - u2 * (y - ax) - u_ * nu);
  out.tail(k_) = nu - u_ * (a_ * out.head(n_) - out.segment(n_, k_));
  return out;
}

std::optional<LinearMap> LalOperator::extract_map() const {
  const int n = n_;
  const int d = dim();
  return LinearMap(
      d, n, [n](const RealVec& z) -> RealVec { return z.head(n); },
      [n, d](const RealVec& x) -> RealVec {
        RealVec out = RealVec::Zero(d);
        out.head(n) = x;
        return out;
      },
      1.0);
}

std::shared_ptr<const DrsOperator> drs_operator(ProxPtr f, ProxPtr g) {
  return std::make_shared<const DrsOperator>(std::move(f), std::move(g));
}

std::shared_ptr<const DrsProductI> drs_product_I(const SplitProblem& p) {
  return std::make_shared<const DrsProductI>(p);
}

std::shared_ptr<const DrsProductII> drs_product_II(const SplitProblem& p) {
  return std::make_shared<const DrsProductII>(p);
}

std::shared_ptr<const LalOperator> lal_operator(const SplitProblem& p, double u) {
  return std::make_shared<const LalOperator>(p, u);
}

KMResult km_iterate(const FixedPointOperator& t, const KMConfig& cfg, const RealVec& z0,
                    const SplitProblem* problem) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) throw ConfigError("km_iterate: alpha must lie in (0,2)");
  if (!(cfg.divergence_guard > 0.0)) throw ConfigError("km_iterate: divergence guard must be > 0");
  if (!(cfg.fp_residual_tol >= 0.0)) throw ConfigError("km_iterate: residual tolerance must be >= 0");
  if (z0.size() != t.dim()) throw StructuralError("km_iterate: z0 dimension does not match T");

  KMResult res;
  res.z = z0;
  const bool want_extract = problem != nullptr || static_cast<bool>(cfg.probe);
  if (cfg.record_trace) res.trace.reserve(std::min<std::size_t>(cfg.max_iter, 1u << 20));
  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    const RealVec tz = t.apply(res.z);
    RealVec next = (1.0 - cfg.alpha) * res.z + cfg.alpha * tz;
    const double step = (next - res.z).norm();
    const double znorm = res.z.norm();
    res.z = std::move(next);
    res.iterations = n;

    IterRecord rec;
    rec.iter = n;
    rec.iterate_norm = res.z.norm();
    rec.fp_residual = step;
    if (want_extract) {
      const RealVec x = t.extract(res.z);
      if (problem) rec.objective = problem->objective(x);
      if (cfg.probe) cfg.probe(rec, x);
    }
    if (cfg.record_trace) res.trace.push_back(rec);

    if (!std::isfinite(rec.iterate_norm) || rec.iterate_norm > cfg.divergence_guard) {
      std::ostringstream os;
      os << "km_iterate: iterate norm " << rec.iterate_norm << " exceeded guard "
         << cfg.divergence_guard << " at iteration " << n
         << "; the fixed-point set may be empty (no minimizer) or the relaxation too large";
      throw DivergenceError(os.str(), std::move(res.trace));
    }
    if (step <= cfg.fp_residual_tol * (1.0 + znorm)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace hierprox
