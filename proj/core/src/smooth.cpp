#include "hierprox/smooth.hpp"

#include <Eigen/Eigenvalues>

#include "hierprox/errors.hpp"

namespace hierprox {

QuadraticSmooth::QuadraticSmooth(RealMat d, RealVec c) : d_(std::move(d)), c_(std::move(c)) {
  if (d_.cols() < 1) throw StructuralError("QuadraticSmooth: empty operator");
  if (d_.rows() != c_.size()) throw StructuralError("QuadraticSmooth: D rows != size of c");
  Eigen::SelfAdjointEigenSolver<RealMat> es(d_.transpose() * d_, Eigen::EigenvaluesOnly);
  lip_ = es.eigenvalues().maxCoeff();
  mono_ = es.eigenvalues().minCoeff();
}

std::shared_ptr<QuadraticSmooth> QuadraticSmooth::distance_to(const RealVec& x0) {
  return std::make_shared<QuadraticSmooth>(RealMat::Identity(x0.size(), x0.size()), x0);
}

double QuadraticSmooth::value(const RealVec& x) const { return 0.5 * (d_ * x - c_).squaredNorm(); }

RealVec QuadraticSmooth::grad(const RealVec& x) const { return d_.transpose() * (d_ * x - c_); }

std::optional<double> QuadraticSmooth::strong_monotonicity() const {
  if (mono_ > 1e-12 * std::max(1.0, lip_)) return mono_;
  return std::nullopt;
}

MoreauEnvelope::MoreauEnvelope(ProxPtr f, double gamma) : f_(std::move(f)), gamma_(gamma) {
  if (!f_) throw StructuralError("MoreauEnvelope: null function");
  if (!(gamma > 0.0)) throw ConfigError("MoreauEnvelope: gamma must be > 0");
}

double MoreauEnvelope::value(const RealVec& x) const {
  const RealVec p = f_->prox(gamma_, x);
  return f_->value(p) + (x - p).squaredNorm() / (2.0 * gamma_);
}

RealVec MoreauEnvelope::grad(const RealVec& x) const { return (x - f_->prox(gamma_, x)) / gamma_; }

SmoothPtr moreau_envelope(ProxPtr f, double gamma) {
  return std::make_shared<MoreauEnvelope>(std::move(f), gamma);
}

LiftedSmooth::LiftedSmooth(SmoothPtr psi, LinearMap l) : psi_(std::move(psi)), l_(std::move(l)) {
  if (!psi_) throw StructuralError("LiftedSmooth: null function");
  if (psi_->dim() != l_.codomain_dim()) throw StructuralError("LiftedSmooth: dimension mismatch");
  const double ln = l_.opnorm_upper() ? *l_.opnorm_upper() : 1.01 * opnorm_estimate(l_);
  lip_ = psi_->lipschitz() * ln * ln;
}

double LiftedSmooth::value(const RealVec& z) const { return psi_->value(l_.apply(z)); }

RealVec LiftedSmooth::grad(const RealVec& z) const { return l_.adjoint(psi_->grad(l_.apply(z))); }

}  // namespace hierprox
