#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hierprox/linop.hpp"
#include "hierprox/prox.hpp"
#include "hierprox/trace.hpp"

namespace hierprox {

struct SplitTerm {
  ProxPtr g;
  LinearMap a;
};

// minimize f(x) + sum_i g_i(A_i x)
class SplitProblem {
 public:
  SplitProblem(ProxPtr f, std::vector<SplitTerm> terms);

  int dim() const { return n_; }
  // Total codomain dimension of the stacked A.
  int codomain_dim() const { return k_; }
  const ProxPtr& f() const { return f_; }
  const std::vector<SplitTerm>& terms() const { return terms_; }
  // The problem always has at least one term. A problem given with none is
  // padded with g = 0 on R^1 composed with the zero map.
  const StackedMap& stacked() const { return *stacked_; }
  const std::shared_ptr<const SeparableSum>& g() const { return g_; }
  bool padded() const { return padded_; }

  double objective(const RealVec& x) const;

 private:
  ProxPtr f_;
  std::vector<SplitTerm> terms_;
  std::shared_ptr<const StackedMap> stacked_;
  std::shared_ptr<const SeparableSum> g_;
  int n_ = 0;
  int k_ = 0;
  bool padded_ = false;
};

enum class OperatorKind { DRS, DRS_I, DRS_II, LAL };

// Nonexpansive map T on a product space together with the map that recovers a
// primal candidate from a point of that space.
class FixedPointOperator {
 public:
  virtual ~FixedPointOperator() = default;
  virtual int dim() const = 0;
  virtual int primal_dim() const = 0;
  virtual OperatorKind kind() const = 0;
  virtual RealVec apply(const RealVec& z) const = 0;
  virtual RealVec extract(const RealVec& z) const = 0;
  // Present when extract is linear.
  virtual std::optional<LinearMap> extract_map() const { return std::nullopt; }
};

using OperatorPtr = std::shared_ptr<const FixedPointOperator>;

// (2 prox_f - I)(2 prox_g - I), extract = prox_g.
class DrsOperator final : public FixedPointOperator {
 public:
  DrsOperator(ProxPtr f, ProxPtr g);
  int dim() const override { return f_->dim(); }
  int primal_dim() const override { return f_->dim(); }
  OperatorKind kind() const override { return OperatorKind::DRS; }
  RealVec apply(const RealVec& z) const override;
  RealVec extract(const RealVec& z) const override;

 private:
  ProxPtr f_;
  ProxPtr g_;
};

// DRS on X x K with F(x, y) = f(x) + g(y) and the null space of (x, y) -> Ax - y.
class DrsProductI final : public FixedPointOperator {
 public:
  explicit DrsProductI(const SplitProblem& p);
  int dim() const override { return n_ + k_; }
  int primal_dim() const override { return n_; }
  OperatorKind kind() const override { return OperatorKind::DRS_I; }
  RealVec apply(const RealVec& z) const override;
  RealVec extract(const RealVec& z) const override;
  std::optional<LinearMap> extract_map() const override;

  // Projection onto N(A check).
  RealVec project(const RealVec& z) const { return proj_ * z; }
  RealVec prox_F(const RealVec& z) const;
  const RealMat& xi() const { return xi_; }
  const RealMat& a() const { return a_; }

 private:
  int n_;
  int k_;
  ProxPtr f_;
  std::shared_ptr<const SeparableSum> g_;
  RealMat a_;
  RealMat xi_;
  RealMat proj_;
};

// DRS on X^{m+1}: blocks 0..m-1 carry g_i o A_i, block m carries f, reflected
// through the diagonal. Every A_i must map into R^1.
class DrsProductII final : public FixedPointOperator {
 public:
  explicit DrsProductII(const SplitProblem& p);
  int dim() const override { return n_ * (m_ + 1); }
  int primal_dim() const override { return n_; }
  int blocks() const { return m_ + 1; }
  OperatorKind kind() const override { return OperatorKind::DRS_II; }
  RealVec apply(const RealVec& z) const override;
  RealVec extract(const RealVec& z) const override;
  std::optional<LinearMap> extract_map() const override;

 private:
  int n_;
  int m_;
  ProxPtr f_;
  std::vector<ProxPtr> g_;
  RealMat rows_;
  RealVec nu_;
};

// Linearized augmented Lagrangian map on X x K x K.
class LalOperator final : public FixedPointOperator {
 public:
  LalOperator(const SplitProblem& p, double u);
  int dim() const override { return n_ + 2 * k_; }
  int primal_dim() const override { return n_; }
  int codomain_dim() const { return k_; }
  OperatorKind kind() const override { return OperatorKind::LAL; }
  RealVec apply(const RealVec& z) const override;
  RealVec extract(const RealVec& z) const override { return z.head(n_); }
  std::optional<LinearMap> extract_map() const override;

  double u() const { return u_; }
  const RealMat& a() const { return a_; }

 private:
  int n_;
  int k_;
  double u_;
  ProxPtr f_;
  std::shared_ptr<const SeparableSum> g_;
  RealMat a_;
};

std::shared_ptr<const DrsOperator> drs_operator(ProxPtr f, ProxPtr g);
std::shared_ptr<const DrsProductI> drs_product_I(const SplitProblem& p);
std::shared_ptr<const DrsProductII> drs_product_II(const SplitProblem& p);
// u <= 0 selects 0.99 / |A check|.
std::shared_ptr<const LalOperator> lal_operator(const SplitProblem& p, double u = 0.0);

// Norm of (x, y) -> Ax - y, i.e. sqrt(1 + |A|^2).
double lal_check_norm(const SplitProblem& p);

// Called once per iteration with the record and the extracted primal point.
using TraceProbe = std::function<void(IterRecord&, const RealVec&)>;

struct KMConfig {
  double alpha = 1.0;
  std::size_t max_iter = 100000;
  double fp_residual_tol = 1e-10;
  double divergence_guard = 1e8;
  bool record_trace = true;
  TraceProbe probe;
};

struct KMResult {
  RealVec z;
  IterTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
};

KMResult km_iterate(const FixedPointOperator& t, const KMConfig& cfg, const RealVec& z0,
                    const SplitProblem* problem = nullptr);

}  // namespace hierprox
