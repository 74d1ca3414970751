#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace hierprox {

using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

// Bounded linear operator between Euclidean spaces, given by its action and
// the action of its adjoint.
class LinearMap {
 public:
  using Action = std::function<RealVec(const RealVec&)>;

  LinearMap(int domain_dim, int codomain_dim, Action apply, Action adjoint,
            std::optional<double> opnorm_upper = std::nullopt);

  static LinearMap from_matrix(RealMat m);
  static LinearMap identity(int n);
  static LinearMap scaled_identity(int n, double s);
  static LinearMap zero(int domain_dim, int codomain_dim);
  // x -> <a, x>, a map into R^1.
  static LinearMap row(const RealVec& a);

  int domain_dim() const { return in_; }
  int codomain_dim() const { return out_; }

  RealVec apply(const RealVec& x) const;
  RealVec adjoint(const RealVec& u) const;

  std::optional<double> opnorm_upper() const { return upper_; }

  // Present when the map was built from a dense matrix.
  const RealMat* matrix() const { return dense_ ? &*dense_ : nullptr; }
  RealMat to_dense() const;

 private:
  int in_;
  int out_;
  Action apply_;
  Action adjoint_;
  std::optional<double> upper_;
  std::optional<RealMat> dense_;
};

// x -> (A_1 x, ..., A_m x).
class StackedMap {
 public:
  explicit StackedMap(std::vector<LinearMap> blocks);

  int domain_dim() const { return in_; }
  int codomain_dim() const { return out_; }
  std::size_t size() const { return blocks_.size(); }
  const LinearMap& block(std::size_t i) const { return blocks_[i]; }
  int offset(std::size_t i) const { return offsets_[i]; }

  RealVec apply(const RealVec& x) const;
  RealVec adjoint(const RealVec& u) const;
  LinearMap as_map() const;

 private:
  std::vector<LinearMap> blocks_;
  std::vector<int> offsets_;
  int in_ = 0;
  int out_ = 0;
};

// Cached Cholesky factor of I + A A*.
class GramSolver {
 public:
  explicit GramSolver(const LinearMap& a);

  const LinearMap& base() const { return base_; }
  int dim() const { return base_.codomain_dim(); }
  RealVec solve(const RealVec& v) const;
  RealMat solve(const RealMat& v) const;

 private:
  LinearMap base_;
  Eigen::LLT<RealMat> llt_;
};

bool adjoint_check(const LinearMap& a, int trials, std::uint64_t seed = 0);

double opnorm_estimate(const LinearMap& a, int iters = 200, std::uint64_t seed = 0x5eed);

RealVec gram_solve(const GramSolver& g, const RealVec& v);

}  // namespace hierprox
