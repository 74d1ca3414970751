#include "hierprox/hsdm.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hierprox/errors.hpp"

namespace hierprox {

namespace {

void validate_list(const std::vector<double>& s, bool strictly_positive) {
  if (s.size() < 2) throw ConfigError("step schedule: list needs at least two entries");
  double mx = 0.0;
  for (double v : s) {
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0))
      throw ConfigError("step schedule: entries must be finite and nonnegative (positive for L)");
    mx = std::max(mx, v);
  }
  if (mx == 0.0) throw ConfigError("step schedule: all steps are zero");
  const std::size_t tenth = std::max<std::size_t>(1, s.size() / 10);
  const double head = std::accumulate(s.begin(), s.begin() + tenth, 0.0) / tenth;
  const double tail = std::accumulate(s.end() - tenth, s.end(), 0.0) / tenth;
  if (!(tail < head)) throw ConfigError("step schedule: steps do not decay toward zero");
  const std::size_t half = s.size() / 2;
  const double first = std::accumulate(s.begin(), s.begin() + half, 0.0);
  const double second = std::accumulate(s.begin() + half, s.end(), 0.0);
  if (second < 0.02 * first)
    throw ConfigError("step schedule: partial sums stall, the series looks summable");
}

void check_alpha_open(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << who << ": alpha must lie in (0,1), got " << alpha;
    throw ConfigError(os.str());
  }
}

RealVec init_or_zero(const RealVec& init, int dim, const char* who) {
  if (init.size() == 0) return RealVec::Zero(dim);
  if (init.size() != dim) {
    std::ostringstream os;
    os << who << ": initial point has dimension " << init.size() << ", expected " << dim;
    throw StructuralError(os.str());
  }
  return init;
}

[[noreturn]] void diverged(const char* who, const IterRecord& rec, double guard, IterTrace trace) {
  std::ostringstream os;
  os << who << ": iterate norm " << rec.iterate_norm << " exceeded guard " << guard
     << " at iteration " << rec.iter
     << "; boundedness of Fix(T) is not guaranteed for this problem (check that the "
        "first-stage solution set is nonempty and bounded)";
  throw DivergenceError(os.str(), std::move(trace));
}

void finish_record(IterRecord& rec, const RealVec& x, const HierProblem& h, const HsdmConfig& cfg) {
  rec.psi_value = h.psi->value(x);
  rec.objective = h.split.objective(x);
  if (cfg.probe) cfg.probe(rec, x);
}

// HSDM on T with theta = psi o Xi and Xi linear.
HsdmResult lifted_run(const FixedPointOperator& t, const LinearMap& xi, const HierProblem& h,
                      const HsdmConfig& cfg, RealVec z, const char* who) {
  HsdmResult res;
  if (cfg.record_trace) res.trace.reserve(std::min<std::size_t>(cfg.max_iter, 1u << 20));
  const RealMat* xim = xi.matrix();
  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    const RealVec zh = (1.0 - cfg.alpha) * z + cfg.alpha * t.apply(z);
    RealVec x = xim ? RealVec((*xim) * zh) : xi.apply(zh);
    const RealVec g = h.psi->grad(x);
    const RealVec lifted = xim ? RealVec(xim->transpose() * g) : xi.adjoint(g);
    IterRecord rec;
    rec.iter = n;
    rec.fp_residual = (zh - z).norm();
    z = zh - cfg.schedule.at(n) * lifted;
    rec.iterate_norm = z.norm();
    finish_record(rec, x, h, cfg);
    res.x = std::move(x);
    if (cfg.record_trace) res.trace.push_back(rec);
    if (!std::isfinite(rec.iterate_norm) || rec.iterate_norm > cfg.divergence_guard)
      diverged(who, rec, cfg.divergence_guard, std::move(res.trace));
  }
  res.z = std::move(z);
  return res;
}

}  // namespace

StepSchedule StepSchedule::harmonic(double lambda0) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0))
    throw ConfigError("step schedule: lambda0 must be > 0");
  StepSchedule s;
  s.kind_ = Kind::Harmonic;
  s.lambda0_ = lambda0;
  return s;
}

StepSchedule StepSchedule::w_sequence(std::vector<double> steps) {
  validate_list(steps, false);
  double tv = 0.0, mx = 0.0;
  for (std::size_t i = steps.size() / 2; i + 1 < steps.size(); ++i)
    tv += std::abs(steps[i] - steps[i + 1]);
  for (double v : steps) mx = std::max(mx, v);
  if (tv > mx) throw ConfigError("step schedule: W3 heuristic failed (tail variation too large)");
  StepSchedule s;
  s.kind_ = Kind::WSequence;
  s.lambda0_ = steps.front();
  s.steps_ = std::move(steps);
  return s;
}

StepSchedule StepSchedule::l_sequence(std::vector<double> steps) {
  validate_list(steps, true);
  auto ratio = [&](std::size_t i) {
    return (steps[i] - steps[i + 1]) / (steps[i + 1] * steps[i + 1]);
  };
  double head = 0.0;
  const std::size_t tenth = std::max<std::size_t>(1, steps.size() / 10);
  for (std::size_t i = 0; i < tenth && i + 1 < steps.size(); ++i)
    head = std::max(head, std::abs(ratio(i)));
  const double tail = std::abs(ratio(steps.size() - 2));
  if (head > 0.0 && tail > 0.5 * head)
    throw ConfigError("step schedule: L3 heuristic failed ((l_n - l_{n+1}) / l_{n+1}^2 does not decay)");
  StepSchedule s;
  s.kind_ = Kind::LSequence;
  s.lambda0_ = steps.front();
  s.steps_ = std::move(steps);
  return s;
}

std::optional<std::size_t> StepSchedule::length() const {
  if (kind_ == Kind::Harmonic) return std::nullopt;
  return steps_.size();
}

double StepSchedule::at(std::size_t n) const {
  if (n == 0) throw ConfigError("step schedule: index starts at 1");
  if (kind_ == Kind::Harmonic) return lambda0_ / static_cast<double>(n);
  if (n > steps_.size()) {
    std::ostringstream os;
    os << "step schedule exhausted: requested step " << n << " of a list of " << steps_.size();
    throw ConfigError(os.str());
  }
  return steps_[n - 1];
}

HierProblem::HierProblem(SplitProblem split_, SmoothPtr psi_, std::optional<double> eta)
    : split(std::move(split_)), psi(std::move(psi_)), strong_monotonicity(eta) {
  if (!psi) throw StructuralError("HierProblem: null psi");
  if (psi->dim() != split.dim()) throw StructuralError("HierProblem: psi dimension differs from X");
  if (!strong_monotonicity) strong_monotonicity = psi->strong_monotonicity();
  if (strong_monotonicity) {
    if (!(*strong_monotonicity > 0.0)) throw ConfigError("HierProblem: eta must be > 0");
    std::mt19937_64 rng(0xe7a);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 32; ++t) {
      RealVec x(split.dim()), y(split.dim());
      for (int i = 0; i < split.dim(); ++i) {
        x[i] = nd(rng);
        y[i] = nd(rng);
      }
      const double lhs = (psi->grad(x) - psi->grad(y)).dot(x - y);
      const double rhs = *strong_monotonicity * (x - y).squaredNorm();
      if (lhs < rhs * (1.0 - 1e-9))
        throw ConfigError("HierProblem: grad psi is not strongly monotone with the given eta");
    }
  }
}

HsdmResult hsdm_generic(const FixedPointOperator& t, const Smooth& theta, const HsdmConfig& cfg,
                        const RealVec& z0) {
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw ConfigError("hsdm_generic: alpha must lie in (0,1]");
  if (theta.dim() != t.dim()) throw StructuralError("hsdm_generic: theta dimension differs from T");
  RealVec z = init_or_zero(z0, t.dim(), "hsdm_generic");
  HsdmResult res;
  for (std::size_t n = 1; n <= cfg.max_iter; ++n) {
    const RealVec zh = (1.0 - cfg.alpha) * z + cfg.alpha * t.apply(z);
    IterRecord rec;
    rec.iter = n;
    rec.fp_residual = (zh - z).norm();
    rec.psi_value = theta.value(zh);
    z = zh - cfg.schedule.at(n) * theta.grad(zh);
    rec.iterate_norm = z.norm();
    if (n == cfg.max_iter || cfg.probe) res.x = t.extract(zh);
    if (cfg.probe) cfg.probe(rec, res.x);
    if (cfg.record_trace) res.trace.push_back(rec);
    if (!std::isfinite(rec.iterate_norm) || rec.iterate_norm > cfg.divergence_guard)
      diverged("hsdm_generic", rec, cfg.divergence_guard, std::move(res.trace));
  }
  res.z = std::move(z);
  return res;
}

HsdmResult hsdm_drs_I(const HierProblem& h, const HsdmConfig& cfg, const RealVec& init) {
  check_alpha_open(cfg.alpha, "hsdm_drs_I");
  const auto t = drs_product_I(h.split);
  return lifted_run(*t, *t->extract_map(), h, cfg, init_or_zero(init, t->dim(), "hsdm_drs_I"),
                    "hsdm_drs_I");
}

HsdmResult hsdm_drs_II(const HierProblem& h, const HsdmConfig& cfg, const RealVec& init) {
  check_alpha_open(cfg.alpha, "hsdm_drs_II");
  const auto t = drs_product_II(h.split);
  return lifted_run(*t, *t->extract_map(), h, cfg, init_or_zero(init, t->dim(), "hsdm_drs_II"),
                    "hsdm_drs_II");
}

HsdmResult hsdm_lal_strong(const HierProblem& h, const HsdmConfig& cfg, const LalParams& lp,
                           const RealVec& init) {
  if (!h.strong_monotonicity)
    throw ConfigError("hsdm_lal_strong: grad psi must be strongly monotone (no modulus given)");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
    throw ConfigError("hsdm_lal_strong: alpha must lie in (0,1]");
  if (!(lp.eta_xy > 0.0 && lp.eta_nu > 0.0))
    throw ConfigError("hsdm_lal_strong: eta_xy and eta_nu must be > 0");
  const auto t = lal_operator(h.split, lp.u);
  const int n = t->primal_dim();
  const int k = t->codomain_dim();
  const RealMat& a = t->a();
  RealVec z = init_or_zero(init, t->dim(), "hsdm_lal_strong");
  HsdmResult res;
  if (cfg.record_trace) res.trace.reserve(std::min<std::size_t>(cfg.max_iter, 1u << 20));
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    const RealVec zh = (1.0 - cfg.alpha) * z + cfg.alpha * t->apply(z);
    const double lam = cfg.schedule.at(it);
    const RealVec r = a * zh.head(n) - zh.segment(n, k);
    IterRecord rec;
    rec.iter = it;
    rec.fp_residual = (zh - z).norm();
    z = zh;
    z.head(n) -= lam * (h.psi->grad(zh.head(n)) + lp.eta_xy * (a.transpose() * r));
    z.segment(n, k) += lam * lp.eta_xy * r;
    z.tail(k) -= lam * lp.eta_nu * zh.tail(k);
    rec.iterate_norm = z.norm();
    res.x = z.head(n);
    finish_record(rec, res.x, h, cfg);
    if (cfg.record_trace) res.trace.push_back(rec);
    if (!std::isfinite(rec.iterate_norm) || rec.iterate_norm > cfg.divergence_guard)
      diverged("hsdm_lal_strong", rec, cfg.divergence_guard, std::move(res.trace));
  }
  res.z = std::move(z);
  return res;
}

HsdmResult hsdm_lal(const HierProblem& h, const HsdmConfig& cfg, double u, const RealVec& init) {
  check_alpha_open(cfg.alpha, "hsdm_lal");
  const auto t = lal_operator(h.split, u);
  const int n = t->primal_dim();
  RealVec z = init_or_zero(init, t->dim(), "hsdm_lal");
  HsdmResult res;
  if (cfg.record_trace) res.trace.reserve(std::min<std::size_t>(cfg.max_iter, 1u << 20));
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    const RealVec zh = (1.0 - cfg.alpha) * z + cfg.alpha * t->apply(z);
    IterRecord rec;
    rec.iter = it;
    rec.fp_residual = (zh - z).norm();
    z = zh;
    z.head(n) -= cfg.schedule.at(it) * h.psi->grad(zh.head(n));
    res.x = z.head(n);
    rec.iterate_norm = z.norm();
    finish_record(rec, res.x, h, cfg);
    if (cfg.record_trace) res.trace.push_back(rec);
    if (!std::isfinite(rec.iterate_norm) || rec.iterate_norm > cfg.divergence_guard)
      diverged("hsdm_lal", rec, cfg.divergence_guard, std::move(res.trace));
  }
  res.z = std::move(z);
  return res;
}

}  // namespace hierprox
