#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hierprox/smooth.hpp"
#include "hierprox/splitting.hpp"
#include "hierprox/trace.hpp"

namespace hierprox {

// Step sizes lambda_1, lambda_2, ...
//
// Harmonic (lambda0 / n) is square summable but not summable, and also meets
// W1-W3. User lists are validated by prefix heuristics only: a finite list
// cannot prove a limit or a divergent sum.
class StepSchedule {
 public:
  enum class Kind { Harmonic, WSequence, LSequence };

  static StepSchedule harmonic(double lambda0 = 1.0);
  static StepSchedule w_sequence(std::vector<double> steps);
  static StepSchedule l_sequence(std::vector<double> steps);

  Kind kind() const { return kind_; }
  double lambda0() const { return lambda0_; }
  std::optional<std::size_t> length() const;
  // n >= 1; throws ConfigError past the end of a user list.
  double at(std::size_t n) const;

 private:
  StepSchedule() = default;
  Kind kind_ = Kind::Harmonic;
  double lambda0_ = 1.0;
  std::vector<double> steps_;
};

// minimize psi over argmin(f + sum g_i o A_i)
struct HierProblem {
  HierProblem(SplitProblem split, SmoothPtr psi, std::optional<double> strong_monotonicity = {});

  SplitProblem split;
  SmoothPtr psi;
  // Modulus of strong monotonicity of grad psi. Falls back to what psi reports.
  std::optional<double> strong_monotonicity;
};

struct HsdmConfig {
  StepSchedule schedule = StepSchedule::harmonic(1.0);
  double alpha = 0.5;
  std::size_t max_iter = 100000;
  double divergence_guard = 1e8;
  bool record_trace = true;
  TraceProbe probe;
};

struct HsdmResult {
  RealVec x;  // last primal iterate x*_n
  RealVec z;  // last state on the operator's space
  IterTrace trace;
};

// z+ = (1 - alpha) z + alpha T z;  z <- z+ - lambda grad theta(z+).
// theta lives on T's space; x in the result is T.extract of the last z+.
HsdmResult hsdm_generic(const FixedPointOperator& t, const Smooth& theta, const HsdmConfig& cfg,
                        const RealVec& z0);

// State (x, y) on X x K. Empty init means zero.
HsdmResult hsdm_drs_I(const HierProblem& h, const HsdmConfig& cfg, const RealVec& init = {});

// State is m + 1 copies of X. Every A_i must map into R^1.
HsdmResult hsdm_drs_II(const HierProblem& h, const HsdmConfig& cfg, const RealVec& init = {});

struct LalParams {
  double eta_xy = 1.0;
  double eta_nu = 1.0;
  double u = 0.0;  // <= 0 selects 0.99 / |A check|
};

// Strongly convergent variant; needs strong monotonicity of grad psi and
// alpha in (0, 1]. State (x, y, nu).
HsdmResult hsdm_lal_strong(const HierProblem& h, const HsdmConfig& cfg, const LalParams& lp = {},
                           const RealVec& init = {});

// State (x, y, nu), descent on the x block only.
HsdmResult hsdm_lal(const HierProblem& h, const HsdmConfig& cfg, double u = 0.0,
                    const RealVec& init = {});

}  // namespace hierprox
