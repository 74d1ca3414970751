#pragma once

#include <cstddef>
#include <vector>

#include "hierprox/linop.hpp"
#include "hierprox/trace.hpp"

namespace hierprox {

// Points are the rows of X; labels are -1 or +1.
struct Dataset {
  RealMat X;
  std::vector<int> y;

  int size() const { return static_cast<int>(X.rows()); }
  int features() const { return static_cast<int>(X.cols()); }
  // Throws DataError on shape or label problems; StructuralError when a class is missing.
  void validate() const;
};

struct LinearClassifier {
  RealVec w;
  double b = 0.0;

  // 1 / |w|; +inf for w = 0.
  double margin() const;
  double decision(const RealVec& x) const { return w.dot(x) - b; }
};

struct SvmConfig {
  double radius = 0.0;  // <= 0 selects 1e3 * max point norm
  double alpha = 0.5;
  // <= 0 selects N + 1, the number of product blocks, which offsets the
  // 1 / (N + 1) scaling of the per-block gradient step.
  double lambda0 = 0.0;
  std::size_t max_iter = 100000;
  bool record_trace = true;
};

struct SvmTrainResult {
  LinearClassifier classifier;
  IterTrace trace;
  double radius = 0.0;
  double lambda0 = 0.0;
  bool ball_binding = false;  // solution norm reached 0.99 * radius
};

double hinge_loss(const Dataset& d, const LinearClassifier& c);

// Number of points with functional margin y_i (w.x_i - b) below 1 - tol.
std::size_t error_count(const Dataset& d, const LinearClassifier& c, double tol = 1e-6);

// 1/2 |w|^2 + C * hinge_loss
double softmargin_objective(const Dataset& d, const LinearClassifier& c, double C);

// Maximum margin among minimizers of the empirical hinge loss.
SvmTrainResult m2lehl_train(const Dataset& d, const SvmConfig& cfg = {});

// Minimizer of 1/2 |w|^2 + C * hinge_loss.
SvmTrainResult softmargin_train(const Dataset& d, double C, const SvmConfig& cfg = {});

// Hard-margin SVM by enumeration of support sets (small p only). Throws
// DataError when the data are not linearly separable.
LinearClassifier original_svm_qp(const Dataset& d);

enum class IrisSubset {
  Separable,     // setosa (+1) vs versicolor (-1), sepal length and width
  NonSeparable,  // versicolor (+1) vs virginica (-1), petal length and width
};

// features: 150 x 4, species: 0, 1, 2.
Dataset iris_subset(const RealMat& features, const std::vector<int>& species, IrisSubset which);

}  // namespace hierprox
