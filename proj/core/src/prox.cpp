#include "hierprox/prox.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hierprox/errors.hpp"

namespace hierprox {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("prox index gamma must be > 0");
}

void check_dim(const char* who, const RealVec& x, int n) {
  if (x.size() != n) {
    std::ostringstream os;
    os << who << ": got dimension " << x.size() << ", expected " << n;
    throw StructuralError(os.str());
  }
}

void check_positive_dim(int n) {
  if (n < 1) throw StructuralError("proximable dimension must be positive");
}

}  // namespace

double prox_hinge(double gamma, double t) {
  check_gamma(gamma);
  return std::min(t + gamma, std::max(t, 1.0));
}

RealVec soft_threshold(double gamma, const RealVec& x) {
  check_gamma(gamma);
  RealVec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    out[i] = std::abs(xi) > gamma ? xi - std::copysign(gamma, xi) : 0.0;
  }
  return out;
}

RealVec project_ball(double r, const RealVec& x) {
  if (!(r > 0.0)) throw ConfigError("project_ball: radius must be > 0");
  const double n = x.norm();
  if (n <= r) return x;
  return (r / n) * x;
}

RealVec prox_semiorthogonal(const Proximable& g, const LinearMap& a, double nu,
                            const RealVec& x) {
  const RealVec ax = a.apply(x);
  return x + a.adjoint(g.prox(nu, ax) - ax) / nu;
}

RealVec prox_conjugate(const Proximable& f, double gamma, const RealVec& x) {
  check_gamma(gamma);
  return x - gamma * f.prox(1.0 / gamma, x / gamma);
}

ZeroFunction::ZeroFunction(int n) : n_(n) { check_positive_dim(n); }

RealVec ZeroFunction::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("ZeroFunction::prox", x, n_);
  return x;
}

L1Norm::L1Norm(int n, double weight) : n_(n), w_(weight) {
  check_positive_dim(n);
  if (!(weight > 0.0)) throw ConfigError("L1Norm: weight must be > 0");
}

double L1Norm::value(const RealVec& x) const { return w_ * x.lpNorm<1>(); }

RealVec L1Norm::prox(double gamma, const RealVec& x) const {
  check_dim("L1Norm::prox", x, n_);
  return soft_threshold(gamma * w_, x);
}

HingeSum::HingeSum(int n, double weight) : n_(n), w_(weight) {
  check_positive_dim(n);
  if (!(weight > 0.0)) throw ConfigError("HingeSum: weight must be > 0");
}

double HingeSum::value(const RealVec& x) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::max(0.0, 1.0 - x[i]);
  return w_ * s;
}

RealVec HingeSum::prox(double gamma, const RealVec& x) const {
  check_dim("HingeSum::prox", x, n_);
  RealVec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = prox_hinge(gamma * w_, x[i]);
  return out;
}

IndicatorBall::IndicatorBall(int n, double radius) : n_(n), r_(radius) {
  check_positive_dim(n);
  if (!(radius > 0.0)) throw ConfigError("IndicatorBall: radius must be > 0");
}

double IndicatorBall::value(const RealVec& x) const {
  return x.norm() <= r_ * (1.0 + 1e-12) ? 0.0 : kInfinity;
}

RealVec IndicatorBall::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("IndicatorBall::prox", x, n_);
  return project_ball(r_, x);
}

IndicatorBox::IndicatorBox(RealVec lo, RealVec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  check_positive_dim(static_cast<int>(lo_.size()));
  if (lo_.size() != hi_.size()) throw StructuralError("IndicatorBox: bound sizes differ");
  if ((lo_.array() > hi_.array()).any()) throw ConfigError("IndicatorBox: lo > hi");
}

double IndicatorBox::value(const RealVec& x) const {
  const double tol = 1e-12;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double slack = tol * (1.0 + std::abs(x[i]));
    if (x[i] < lo_[i] - slack || x[i] > hi_[i] + slack) return kInfinity;
  }
  return 0.0;
}

RealVec IndicatorBox::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("IndicatorBox::prox", x, dim());
  return x.cwiseMax(lo_).cwiseMin(hi_);
}

IndicatorPoint::IndicatorPoint(RealVec c) : c_(std::move(c)) {
  check_positive_dim(static_cast<int>(c_.size()));
}

double IndicatorPoint::value(const RealVec& x) const {
  return (x - c_).norm() <= 1e-12 * (1.0 + c_.norm()) ? 0.0 : kInfinity;
}

RealVec IndicatorPoint::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("IndicatorPoint::prox", x, dim());
  return c_;
}

Quadratic::Quadratic(RealVec weights, RealVec center)
    : w_(std::move(weights)), c_(std::move(center)) {
  check_positive_dim(static_cast<int>(w_.size()));
  if (w_.size() != c_.size()) throw StructuralError("Quadratic: weight/center sizes differ");
  if ((w_.array() < 0.0).any()) throw ConfigError("Quadratic: weights must be >= 0");
}

std::shared_ptr<Quadratic> Quadratic::isotropic(double weight, RealVec center) {
  RealVec w = RealVec::Constant(center.size(), weight);
  return std::make_shared<Quadratic>(std::move(w), std::move(center));
}

double Quadratic::value(const RealVec& x) const {
  return 0.5 * (w_.array() * (x - c_).array().square()).sum();
}

RealVec Quadratic::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("Quadratic::prox", x, dim());
  return ((x.array() + gamma * w_.array() * c_.array()) / (1.0 + gamma * w_.array())).matrix();
}

SemiorthogonalComposition::SemiorthogonalComposition(ProxPtr g, LinearMap a, double nu)
    : g_(std::move(g)), a_(std::move(a)), nu_(nu) {
  if (!g_) throw StructuralError("SemiorthogonalComposition: null function");
  if (g_->dim() != a_.codomain_dim())
    throw StructuralError("SemiorthogonalComposition: g and A codomain differ");
  if (!(nu_ > 0.0)) throw StructuralError("SemiorthogonalComposition: nu must be > 0");
  std::mt19937_64 rng(0xa11ce);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 8; ++t) {
    RealVec u(a_.codomain_dim());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = nd(rng);
    const RealVec aau = a_.apply(a_.adjoint(u));
    if ((aau - nu_ * u).norm() > 1e-9 * (1.0 + nu_ * u.norm()))
      throw StructuralError("SemiorthogonalComposition: A A* != nu I");
  }
}

double SemiorthogonalComposition::value(const RealVec& x) const { return g_->value(a_.apply(x)); }

RealVec SemiorthogonalComposition::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  // prox_{gamma g o A} = prox_{(gamma g) o A}; the scaled g has prox index nu * gamma.
  const RealVec ax = a_.apply(x);
  return x + a_.adjoint(g_->prox(nu_ * gamma, ax) - ax) / nu_;
}

SeparableSum::SeparableSum(std::vector<ProxPtr> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw StructuralError("SeparableSum: no blocks");
  for (const auto& b : blocks_) {
    if (!b) throw StructuralError("SeparableSum: null block");
    offsets_.push_back(n_);
    n_ += b->dim();
  }
}

double SeparableSum::value(const RealVec& x) const {
  check_dim("SeparableSum::value", x, n_);
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const double v = blocks_[i]->value(x.segment(offsets_[i], blocks_[i]->dim()));
    if (v == kInfinity) return kInfinity;
    s += v;
  }
  return s;
}

RealVec SeparableSum::prox(double gamma, const RealVec& x) const {
  check_dim("SeparableSum::prox", x, n_);
  RealVec out(n_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int d = blocks_[i]->dim();
    out.segment(offsets_[i], d) = blocks_[i]->prox(gamma, x.segment(offsets_[i], d));
  }
  return out;
}

PerspectiveQ::PerspectiveQ(double q_, double beta_, double a_, RealVec b_)
    : q(q_), beta(beta_), a(a_), b(std::move(b_)) {
  if (!(q > 1.0) || !std::isfinite(q)) throw ConfigError("PerspectiveQ: q must be > 1");
  if (!(beta > 0.0)) throw ConfigError("PerspectiveQ: beta must be > 0");
}

double PerspectiveQ::rho() const {
  const double qs = qstar();
  return std::pow(beta * (1.0 - 1.0 / qs), qs - 1.0);
}

double PerspectiveQ::value(double eta, const RealVec& y) const {
  const double e = eta - a;
  const double ny = b.size() ? (y - b).norm() : y.norm();
  if (e < 0.0) return kInfinity;
  if (e == 0.0) return ny == 0.0 ? 0.0 : kInfinity;
  return std::pow(ny, q) / (beta * std::pow(e, q - 1.0));
}

double PerspectiveQ::conjugate_phi(const RealVec& u) const {
  const double qs = qstar();
  return rho() / qs * std::pow(u.norm(), qs);
}

std::pair<double, RealVec> prox_perspective(const PerspectiveQ& p, double eta, const RealVec& y) {
  if (p.b.size() && p.b.size() != y.size())
    throw StructuralError("prox_perspective: shift dimension differs from y");
  const double qs = p.qstar();
  const double rho = p.rho();
  const double e = eta - p.a;
  const RealVec yy = p.b.size() ? RealVec(y - p.b) : y;
  const double ny = yy.norm();

  auto shifted = [&](double eo, RealVec yo) {
    if (p.b.size()) yo += p.b;
    return std::make_pair(eo + p.a, std::move(yo));
  };

  if (qs * e + rho * std::pow(ny, qs) <= 0.0) return shifted(0.0, RealVec::Zero(y.size()));
  if (ny == 0.0) return shifted(e, RealVec::Zero(y.size()));

  // Unique zero of the decreasing function
  //   h(t) = |y| - t - (eta + (rho/q*) t^{q*}) rho t^{q*-1}
  // on [t_min, |y|], where t_min makes the first output coordinate vanish.
  auto eta_out = [&](double t) { return e + rho / qs * std::pow(t, qs); };
  auto h = [&](double t) { return ny - t - eta_out(t) * rho * std::pow(t, qs - 1.0); };
  auto dh = [&](double t) {
    return -1.0 - rho * (rho * std::pow(t, 2.0 * qs - 2.0) +
                         eta_out(t) * (qs - 1.0) * std::pow(t, qs - 2.0));
  };

  double lo = e < 0.0 ? std::pow(-qs * e / rho, 1.0 / qs) : 0.0;
  double hi = ny;
  lo = std::min(lo, hi);
  double t = 0.5 * (lo + hi);
  const double width_tol = 1e-15 * std::max(1.0, ny);
  bool done = false;
  for (int it = 0; it < 200; ++it) {
    const double ht = h(t);
    if (ht == 0.0) {
      done = true;
      break;
    }
    if (ht > 0.0)
      lo = t;
    else
      hi = t;
    if (hi - lo <= width_tol) {
      t = 0.5 * (lo + hi);
      done = true;
      break;
    }
    const double d = dh(t);
    double tn = std::isfinite(d) && d < 0.0 ? t - ht / d : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::abs(tn - t) <= width_tol) {
      t = tn;
      done = true;
      break;
    }
    t = tn;
  }
  if (!done) {
    std::ostringstream os;
    os.precision(17);
    os << "prox_perspective: root solve did not converge in 200 iterations, bracket [" << lo
       << ", " << hi << "]";
    throw NumericalError(os.str());
  }
  const RealVec pvec = (t / ny) * yy;
  return shifted(std::max(0.0, eta_out(t)), yy - pvec);
}

double perspective_subgradient_slack(const PerspectiveQ& p, double eta, const RealVec& y,
                                     double mu, const RealVec& u) {
  const double e = eta - p.a;
  const RealVec yy = p.b.size() ? RealVec(y - p.b) : y;
  const double ny = yy.norm();
  if (e > 0.0) {
    const RealVec v = yy / e;
    const double nv = v.norm();
    const RealVec ustar = nv > 0.0 ? RealVec((p.q / p.beta) * std::pow(nv, p.q - 2.0) * v)
                                   : RealVec(RealVec::Zero(v.size()));
    const double mustar = (1.0 - p.q) * std::pow(nv, p.q) / p.beta;
    const double gap = std::hypot(mu - mustar, (u - ustar).norm());
    return gap / (1.0 + std::abs(mustar) + ustar.norm());
  }
  if (e == 0.0 && ny == 0.0) return std::max(0.0, mu + p.conjugate_phi(u));
  return kInfinity;
}

Perspective::Perspective(int ydim, PerspectiveQ params) : ydim_(ydim), p_(std::move(params)) {
  check_positive_dim(ydim);
  if (p_.b.size() && p_.b.size() != ydim) throw StructuralError("Perspective: shift size");
}

double Perspective::value(const RealVec& x) const {
  check_dim("Perspective::value", x, dim());
  return p_.value(x[0], x.tail(ydim_));
}

RealVec Perspective::prox(double gamma, const RealVec& x) const {
  check_gamma(gamma);
  check_dim("Perspective::prox", x, dim());
  PerspectiveQ scaled = p_;
  scaled.beta = p_.beta / gamma;
  auto [eta, y] = prox_perspective(scaled, x[0], x.tail(ydim_));
  RealVec out(dim());
  out[0] = eta;
  out.tail(ydim_) = y;
  return out;
}

}  // namespace hierprox
