#pragma once

#include <memory>
#include <optional>

#include "hierprox/linop.hpp"
#include "hierprox/prox.hpp"

namespace hierprox {

// Convex function with a Lipschitz gradient.
class Smooth {
 public:
  virtual ~Smooth() = default;
  virtual int dim() const = 0;
  virtual double value(const RealVec& x) const = 0;
  virtual RealVec grad(const RealVec& x) const = 0;
  virtual double lipschitz() const = 0;
  // Modulus of strong monotonicity of grad, when known.
  virtual std::optional<double> strong_monotonicity() const { return std::nullopt; }
};

using SmoothPtr = std::shared_ptr<const Smooth>;

// 1/2 |D x - c|^2
class QuadraticSmooth final : public Smooth {
 public:
  QuadraticSmooth(RealMat d, RealVec c);
  // 1/2 |x - x0|^2
  static std::shared_ptr<QuadraticSmooth> distance_to(const RealVec& x0);

  int dim() const override { return static_cast<int>(d_.cols()); }
  double value(const RealVec& x) const override;
  RealVec grad(const RealVec& x) const override;
  double lipschitz() const override { return lip_; }
  std::optional<double> strong_monotonicity() const override;

 private:
  RealMat d_;
  RealVec c_;
  double lip_ = 0.0;
  double mono_ = 0.0;
};

class ZeroSmooth final : public Smooth {
 public:
  explicit ZeroSmooth(int n) : n_(n) {}
  int dim() const override { return n_; }
  double value(const RealVec&) const override { return 0.0; }
  RealVec grad(const RealVec& x) const override { return RealVec::Zero(x.size()); }
  double lipschitz() const override { return 1.0; }

 private:
  int n_;
};

// Moreau envelope of index gamma; gradient (x - prox_{gamma f}(x)) / gamma.
class MoreauEnvelope final : public Smooth {
 public:
  MoreauEnvelope(ProxPtr f, double gamma);
  int dim() const override { return f_->dim(); }
  double value(const RealVec& x) const override;
  RealVec grad(const RealVec& x) const override;
  double lipschitz() const override { return 1.0 / gamma_; }

 private:
  ProxPtr f_;
  double gamma_;
};

SmoothPtr moreau_envelope(ProxPtr f, double gamma);

// psi o L for a linear L, with gradient L* grad psi(L z).
class LiftedSmooth final : public Smooth {
 public:
  LiftedSmooth(SmoothPtr psi, LinearMap l);
  int dim() const override { return l_.domain_dim(); }
  double value(const RealVec& z) const override;
  RealVec grad(const RealVec& z) const override;
  double lipschitz() const override { return lip_; }

 private:
  SmoothPtr psi_;
  LinearMap l_;
  double lip_;
};

}  // namespace hierprox
