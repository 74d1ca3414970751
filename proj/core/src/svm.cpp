#include "hierprox/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "hierprox/errors.hpp"
#include "hierprox/hsdm.hpp"
#include "hierprox/prox.hpp"
#include "hierprox/smooth.hpp"
#include "hierprox/splitting.hpp"

namespace hierprox {

namespace {

// Training runs on centered points with b = b' + w.mean, which leaves every
// functional margin unchanged and keeps the bias on the scale of w.
struct Centered {
  RealVec mean;
  std::vector<SplitTerm> terms;
};

Centered centered_terms(const Dataset& d, double weight) {
  Centered c;
  c.mean = d.X.colwise().mean().transpose();
  const int p = d.features();
  for (int i = 0; i < d.size(); ++i) {
    RealVec row(p + 1);
    row.head(p) = d.y[i] * (d.X.row(i).transpose() - c.mean);
    row[p] = -d.y[i];
    c.terms.push_back({std::make_shared<HingeSum>(1, weight), LinearMap::row(row)});
  }
  return c;
}

LinearClassifier uncenter(const RealVec& x, const RealVec& mean) {
  const int p = static_cast<int>(mean.size());
  LinearClassifier c;
  c.w = x.head(p);
  c.b = x[p] + c.w.dot(mean);
  return c;
}

double default_radius(const Dataset& d, double r) {
  if (r > 0.0) return r;
  const double mx = d.X.rowwise().norm().maxCoeff();
  return 1e3 * std::max(mx, 1.0);
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 2) throw DataError("dataset: need at least two points");
  if (X.cols() < 1) throw DataError("dataset: need at least one feature");
  if (static_cast<int>(y.size()) != X.rows()) throw DataError("dataset: label count differs from point count");
  if (!X.allFinite()) throw DataError("dataset: non-finite feature value");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v != 1 && v != -1) throw DataError("dataset: labels must be -1 or +1");
    pos = pos || v == 1;
    neg = neg || v == -1;
  }
  if (!pos || !neg) throw StructuralError("dataset: both classes must be present");
}

double LinearClassifier::margin() const {
  const double n = w.norm();
  return n > 0.0 ? 1.0 / n : std::numeric_limits<double>::infinity();
}

double hinge_loss(const Dataset& d, const LinearClassifier& c) {
  if (c.w.size() != d.features()) throw StructuralError("hinge_loss: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < d.size(); ++i)
    s += std::max(0.0, 1.0 - d.y[i] * c.decision(d.X.row(i).transpose()));
  return s;
}

std::size_t error_count(const Dataset& d, const LinearClassifier& c, double tol) {
  if (c.w.size() != d.features()) throw StructuralError("error_count: dimension mismatch");
  std::size_t k = 0;
  for (int i = 0; i < d.size(); ++i)
    if (d.y[i] * c.decision(d.X.row(i).transpose()) < 1.0 - tol) ++k;
  return k;
}

double softmargin_objective(const Dataset& d, const LinearClassifier& c, double C) {
  return 0.5 * c.w.squaredNorm() + C * hinge_loss(d, c);
}

SvmTrainResult m2lehl_train(const Dataset& d, const SvmConfig& cfg) {
  d.validate();
  const int p = d.features();
  SvmTrainResult out;
  out.radius = default_radius(d, cfg.radius);
  Centered c = centered_terms(d, 1.0);
  SplitProblem split(std::make_shared<IndicatorBall>(p + 1, out.radius), std::move(c.terms));
  RealMat sel = RealMat::Zero(p, p + 1);
  sel.leftCols(p) = RealMat::Identity(p, p);
  HierProblem h(std::move(split), std::make_shared<QuadraticSmooth>(sel, RealVec::Zero(p)));
  HsdmConfig hc;
  out.lambda0 = cfg.lambda0 > 0.0 ? cfg.lambda0 : d.size() + 1.0;
  hc.schedule = StepSchedule::harmonic(out.lambda0);
  hc.alpha = cfg.alpha;
  hc.max_iter = cfg.max_iter;
  hc.record_trace = cfg.record_trace;
  HsdmResult r = hsdm_drs_II(h, hc);
  out.ball_binding = r.x.norm() >= 0.99 * out.radius;
  out.classifier = uncenter(r.x, c.mean);
  out.trace = std::move(r.trace);
  return out;
}

SvmTrainResult softmargin_train(const Dataset& d, double C, const SvmConfig& cfg) {
  d.validate();
  if (!(C > 0.0)) throw ConfigError("softmargin_train: C must be > 0");
  const int p = d.features();
  Centered c = centered_terms(d, C);
  RealVec wts = RealVec::Ones(p + 1);
  wts[p] = 0.0;
  SplitProblem split(std::make_shared<Quadratic>(wts, RealVec::Zero(p + 1)), std::move(c.terms));
  // The product route over N + 1 copies converges far too slowly here; the
  // single-product route reaches the same minimizer in ~1e4 iterations.
  const auto t = drs_product_I(split);
  KMConfig kc;
  kc.alpha = 1.0;
  kc.max_iter = cfg.max_iter;
  kc.fp_residual_tol = 1e-13;
  kc.record_trace = cfg.record_trace;
  KMResult r = km_iterate(*t, kc, RealVec::Zero(t->dim()), &split);
  SvmTrainResult out;
  out.classifier = uncenter(t->extract(r.z), c.mean);
  out.trace = std::move(r.trace);
  return out;
}

LinearClassifier original_svm_qp(const Dataset& d) {
  d.validate();
  const int p = d.features();
  const int n = d.size();
  if (p > 4) throw ConfigError("original_svm_qp: support enumeration is limited to p <= 4");

  LinearClassifier best;
  double best_norm = std::numeric_limits<double>::infinity();
  std::vector<int> idx;

  auto try_support = [&](const std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    const int dim = p + 1 + k;
    // Unknowns (w, b, alpha).
    RealMat m = RealMat::Zero(dim, dim);
    RealVec rhs = RealVec::Zero(dim);
    m.topLeftCorner(p, p) = RealMat::Identity(p, p);
    for (int j = 0; j < k; ++j) {
      const int i = s[j];
      const RealVec xi = d.X.row(i).transpose();
      m.block(0, p + 1 + j, p, 1) = -d.y[i] * xi;
      m(p, p + 1 + j) = d.y[i];
      m.block(p + 1 + j, 0, 1, p) = d.y[i] * xi.transpose();
      m(p + 1 + j, p) = -d.y[i];
      rhs[p + 1 + j] = 1.0;
    }
    Eigen::FullPivLU<RealMat> lu(m);
    if (!lu.isInvertible()) return;
    const RealVec sol = lu.solve(rhs);
    for (int j = 0; j < k; ++j)
      if (sol[p + 1 + j] < -1e-9) return;
    LinearClassifier c{sol.head(p), sol[p]};
    for (int i = 0; i < n; ++i)
      if (d.y[i] * c.decision(d.X.row(i).transpose()) < 1.0 - 1e-9) return;
    const double nw = c.w.norm();
    if (nw < best_norm) {
      best_norm = nw;
      best = c;
    }
  };

  // Enumerate subsets of size 2..p+1 that contain both labels.
  for (int k = 2; k <= std::min(p + 1, n); ++k) {
    std::vector<int> comb(k);
    for (int j = 0; j < k; ++j) comb[j] = j;
    while (true) {
      bool pos = false, neg = false;
      for (int i : comb) (d.y[i] > 0 ? pos : neg) = true;
      if (pos && neg) try_support(comb);
      int j = k - 1;
      while (j >= 0 && comb[j] == n - k + j) --j;
      if (j < 0) break;
      ++comb[j];
      for (int t = j + 1; t < k; ++t) comb[t] = comb[t - 1] + 1;
    }
  }
  if (!std::isfinite(best_norm))
    throw DataError("original_svm_qp: data are not linearly separable (no feasible support set)");
  return best;
}

Dataset iris_subset(const RealMat& features, const std::vector<int>& species, IrisSubset which) {
  if (features.rows() != static_cast<Eigen::Index>(species.size()) || features.cols() != 4)
    throw DataError("iris_subset: expected N x 4 features with one species label per row");
  const int pos_class = which == IrisSubset::Separable ? 0 : 1;
  const int neg_class = pos_class + 1;
  const int col = which == IrisSubset::Separable ? 0 : 2;
  std::vector<int> rows;
  Dataset d;
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (species[i] == pos_class || species[i] == neg_class) {
      rows.push_back(static_cast<int>(i));
      d.y.push_back(species[i] == pos_class ? 1 : -1);
    }
  }
  d.X.resize(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t r = 0; r < rows.size(); ++r) d.X.row(r) = features.block(rows[r], col, 1, 2);
  return d;
}

}  // namespace hierprox
