#pragma once

#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "hierprox/linop.hpp"

namespace hierprox {

// +inf marks points outside the domain. Callers compare against it and never
// do arithmetic with it.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Proper lsc convex function with a computable proximity operator
//   prox_{gamma f}(x) = argmin_y f(y) + |y - x|^2 / (2 gamma).
class Proximable {
 public:
  virtual ~Proximable() = default;
  virtual int dim() const = 0;
  virtual double value(const RealVec& x) const = 0;
  virtual RealVec prox(double gamma, const RealVec& x) const = 0;
};

using ProxPtr = std::shared_ptr<const Proximable>;

class ZeroFunction final : public Proximable {
 public:
  explicit ZeroFunction(int n);
  int dim() const override { return n_; }
  double value(const RealVec&) const override { return 0.0; }
  RealVec prox(double gamma, const RealVec& x) const override;

 private:
  int n_;
};

// weight * |x|_1
class L1Norm final : public Proximable {
 public:
  explicit L1Norm(int n, double weight = 1.0);
  int dim() const override { return n_; }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;
  double weight() const { return w_; }

 private:
  int n_;
  double w_;
};

// weight * sum_i max{0, 1 - x_i}
class HingeSum final : public Proximable {
 public:
  explicit HingeSum(int n, double weight = 1.0);
  int dim() const override { return n_; }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;
  double weight() const { return w_; }

 private:
  int n_;
  double w_;
};

// Indicator of the closed ball B(0, r).
class IndicatorBall final : public Proximable {
 public:
  IndicatorBall(int n, double radius);
  int dim() const override { return n_; }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;
  double radius() const { return r_; }

 private:
  int n_;
  double r_;
};

// Indicator of the box [lo, hi].
class IndicatorBox final : public Proximable {
 public:
  IndicatorBox(RealVec lo, RealVec hi);
  int dim() const override { return static_cast<int>(lo_.size()); }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;

 private:
  RealVec lo_;
  RealVec hi_;
};

// Indicator of the singleton {c}.
class IndicatorPoint final : public Proximable {
 public:
  explicit IndicatorPoint(RealVec c);
  int dim() const override { return static_cast<int>(c_.size()); }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;

 private:
  RealVec c_;
};

// sum_i (w_i / 2) (x_i - c_i)^2 with w_i >= 0.
class Quadratic final : public Proximable {
 public:
  Quadratic(RealVec weights, RealVec center);
  static std::shared_ptr<Quadratic> isotropic(double weight, RealVec center);
  int dim() const override { return static_cast<int>(w_.size()); }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;

 private:
  RealVec w_;
  RealVec c_;
};

// g o A for A with A A* = nu I, checked at construction.
class SemiorthogonalComposition final : public Proximable {
 public:
  SemiorthogonalComposition(ProxPtr g, LinearMap a, double nu);
  int dim() const override { return a_.domain_dim(); }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;

 private:
  ProxPtr g_;
  LinearMap a_;
  double nu_;
};

// (x_1, ..., x_m) -> sum_i f_i(x_i)
class SeparableSum final : public Proximable {
 public:
  explicit SeparableSum(std::vector<ProxPtr> blocks);
  int dim() const override { return n_; }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;
  std::size_t size() const { return blocks_.size(); }
  const ProxPtr& block(std::size_t i) const { return blocks_[i]; }
  int offset(std::size_t i) const { return offsets_[i]; }

 private:
  std::vector<ProxPtr> blocks_;
  std::vector<int> offsets_;
  int n_ = 0;
};

// Perspective of phi = |.|^q / beta, translated by (a, b):
//   (eta, y) -> eta' phi(y' / eta')  with  (eta', y') = (eta - a, y - b).
struct PerspectiveQ {
  double q = 2.0;
  double beta = 0.5;
  double a = 0.0;
  RealVec b;  // empty means zero shift

  PerspectiveQ() = default;
  PerspectiveQ(double q, double beta, double a = 0.0, RealVec b = RealVec());

  double qstar() const { return q / (q - 1.0); }
  double rho() const;
  double value(double eta, const RealVec& y) const;
  // phi*(u) = (rho / q*) |u|^{q*}
  double conjugate_phi(const RealVec& u) const;
};

// Vector form (eta, y) with eta first.
class Perspective final : public Proximable {
 public:
  Perspective(int ydim, PerspectiveQ params);
  int dim() const override { return ydim_ + 1; }
  double value(const RealVec& x) const override;
  RealVec prox(double gamma, const RealVec& x) const override;
  const PerspectiveQ& params() const { return p_; }

 private:
  int ydim_;
  PerspectiveQ p_;
};

double prox_hinge(double gamma, double t);
RealVec soft_threshold(double gamma, const RealVec& x);
RealVec project_ball(double r, const RealVec& x);
RealVec prox_semiorthogonal(const Proximable& g, const LinearMap& a, double nu, const RealVec& x);
std::pair<double, RealVec> prox_perspective(const PerspectiveQ& p, double eta, const RealVec& y);
RealVec prox_conjugate(const Proximable& f, double gamma, const RealVec& x);

// Distance-like slack of (mu, u) from the subdifferential of the perspective at
// (eta, y). Returns +inf where the subdifferential is empty.
double perspective_subgradient_slack(const PerspectiveQ& p, double eta, const RealVec& y,
                                     double mu, const RealVec& u);

}  // namespace hierprox
