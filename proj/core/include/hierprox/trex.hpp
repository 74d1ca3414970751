#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hierprox/linop.hpp"
#include "hierprox/prox.hpp"
#include "hierprox/smooth.hpp"
#include "hierprox/splitting.hpp"
#include "hierprox/trace.hpp"

namespace hierprox {

struct RegressionData {
  RealMat X;  // N x p, no zero column
  RealVec z;  // N

  void validate() const;
};

// Generalized TREX with exponent q and scale beta. Candidate j in [0, 2p)
// uses x_j = X(:, j) for j < p and -X(:, j - p) otherwise.
struct TrexSpec {
  RegressionData data;
  double q = 2.0;
  double beta = 0.5;

  void validate() const;
  int p() const { return static_cast<int>(data.X.cols()); }
  int candidates() const { return 2 * p(); }
  RealVec x_j(int j) const;
  // b -> (x_j' X b, X b)
  RealMat M_j(int j) const;
  // Perspective shifted by (x_j' z, z).
  PerspectiveQ g_params(int j) const;
  SplitProblem subproblem(int j) const;
  // g_j(M_j b) + |b|_1
  double objective(int j, const RealVec& b) const;
};

struct TrexRunConfig {
  double relaxation = 1.95;  // in (0, 2); applied to the averaged map (I + T) / 2
  double lambda0 = 1.0;
  std::size_t max_iter = 10000;
  double divergence_guard = 1e8;
  bool record_trace = true;
  bool parallel = true;
  unsigned workers = 0;  // 0 selects the hardware thread count
  double band = 1e-8;    // relative band defining near-minimal objectives
  RealVec b_true;        // fills the distance column when set
  SmoothPtr report_psi;  // fills psi_value for plain TREX runs when set
};

struct TrexSubResult {
  RealVec b;
  double objective = kInfinity;
  double psi = std::numeric_limits<double>::quiet_NaN();
  RealVec z;  // final state on R^p x R^{N+1}
  IterTrace trace;
};

TrexSubResult trex_subproblem(const TrexSpec& s, int j, const TrexRunConfig& cfg = {});
TrexSubResult htrex_subproblem(const TrexSpec& s, int j, const SmoothPtr& psi,
                               const TrexRunConfig& cfg = {});

struct TrexResult {
  std::vector<RealVec> b_j;
  std::vector<double> objective;  // +inf for failed candidates
  std::vector<double> psi;        // NaN when no psi was used
  std::vector<std::string> failures;  // empty string for success
  int j_star = -1;
  RealVec b;
  // Per iteration, the record of the candidate the final selection rule would
  // pick at that iteration.
  IterTrace trace;
};

TrexResult trex_solve(const TrexSpec& s, const TrexRunConfig& cfg = {});
TrexResult htrex_solve(const TrexSpec& s, const SmoothPtr& psi, const TrexRunConfig& cfg = {});

// Among finite objectives: the lowest index with minimal objective, or, with
// psi values, the lowest index with minimal psi inside the band.
int select_candidate(const std::vector<double>& objective, const std::vector<double>& psi,
                     double band);

// 1/2 |D b|^2 with D the (p-1) x p forward difference.
SmoothPtr smooth_diff_psi(int p);

struct SynthData {
  RegressionData data;
  RealVec b_true;
  double sigma = 0.0;
};

// Gaussian design with columns 1, 2, 3 equal and every column of norm sqrt(N);
// b_true has 1/sqrt(p) on indices 3, 4, 5. snr_db = +inf gives no noise.
SynthData synth_generate(int N, int p, double snr_db, std::uint64_t seed);

double snr_db(const RealMat& X, const RealVec& b_true, const RealVec& z);

// Optimality certificate for candidate j from a KM state z of the subproblem
// operator, evaluated at the prox point w = prox_F(2 P z - z).
struct TrexCertificate {
  double l1_slack = 0.0;
  double perspective_slack = 0.0;
  double stationarity = 0.0;
  double consistency = 0.0;
  double worst() const;
};

TrexCertificate trex_certificate(const TrexSpec& s, int j, const RealVec& z);

}  // namespace hierprox
