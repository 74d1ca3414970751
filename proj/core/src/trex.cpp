#include "hierprox/trex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "hierprox/errors.hpp"
#include "hierprox/hsdm.hpp"

namespace hierprox {

namespace {

void check_index(const TrexSpec& s, int j) {
  if (j < 0 || j >= s.candidates()) {
    std::ostringstream os;
    os << "trex: candidate index " << j << " outside [0, " << s.candidates() << ")";
    throw ConfigError(os.str());
  }
}

double km_alpha(const TrexRunConfig& cfg) {
  if (!(cfg.relaxation > 0.0 && cfg.relaxation < 2.0))
    throw ConfigError("trex: relaxation must lie in (0,2)");
  return 0.5 * cfg.relaxation;
}

TraceProbe make_probe(const TrexRunConfig& cfg) {
  if (cfg.b_true.size() == 0 && !cfg.report_psi) return {};
  RealVec bt = cfg.b_true;
  SmoothPtr psi = cfg.report_psi;
  return [bt, psi](IterRecord& rec, const RealVec& b) {
    if (bt.size()) rec.distance = (b - bt).norm();
    if (psi && std::isnan(rec.psi_value)) rec.psi_value = psi->value(b);
  };
}

using SubSolver = std::function<TrexSubResult(int)>;

TrexResult run_all(const TrexSpec& s, const TrexRunConfig& cfg, const SubSolver& solve,
                   bool use_psi) {
  s.validate();
  const int m = s.candidates();
  std::vector<TrexSubResult> subs(m);
  std::vector<std::string> failures(m);

  auto work = [&](int j) {
    try {
      subs[j] = solve(j);
    } catch (const std::exception& e) {
      failures[j] = e.what();
      subs[j] = TrexSubResult{};
    }
  };

  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  if (!cfg.parallel) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(m));
  if (workers <= 1) {
    for (int j = 0; j < m; ++j) work(j);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int j = next++; j < m; j = next++) work(j);
      });
    for (auto& th : pool) th.join();
  }

  TrexResult out;
  out.failures = failures;
  for (int j = 0; j < m; ++j) {
    out.b_j.push_back(subs[j].b);
    out.objective.push_back(failures[j].empty() ? subs[j].objective : kInfinity);
    out.psi.push_back(subs[j].psi);
  }
  const std::vector<double> no_psi;
  out.j_star = select_candidate(out.objective, use_psi ? out.psi : no_psi, cfg.band);
  if (out.j_star < 0) {
    std::ostringstream os;
    os << "trex: no candidate produced a finite objective";
    for (int j = 0; j < m; ++j)
      if (!failures[j].empty()) os << "; j=" << j << ": " << failures[j];
    throw NumericalError(os.str());
  }
  out.b = out.b_j[out.j_star];

  if (cfg.record_trace) {
    std::size_t len = 0;
    for (int j = 0; j < m; ++j)
      if (failures[j].empty()) len = std::max(len, subs[j].trace.size());
    std::vector<double> obj(m), psi(m);
    for (std::size_t n = 0; n < len; ++n) {
      for (int j = 0; j < m; ++j) {
        const bool ok = failures[j].empty() && n < subs[j].trace.size();
        obj[j] = ok ? subs[j].trace[n].objective : kInfinity;
        psi[j] = ok ? subs[j].trace[n].psi_value : std::numeric_limits<double>::quiet_NaN();
      }
      const int pick = select_candidate(obj, use_psi ? psi : no_psi, cfg.band);
      IterRecord rec;
      if (pick >= 0) {
        rec = subs[pick].trace[n];
      } else {
        rec.iter = n + 1;
        rec.objective = kInfinity;
      }
      out.trace.push_back(rec);
    }
  }
  return out;
}

}  // namespace

void RegressionData::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw DataError("regression data: empty design");
  if (z.size() != X.rows()) throw DataError("regression data: z length differs from rows of X");
  if (!X.allFinite() || !z.allFinite()) throw DataError("regression data: non-finite entry");
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (X.col(j).norm() == 0.0) {
      std::ostringstream os;
      os << "regression data: column " << j << " of X is zero";
      throw DataError(os.str());
    }
}

void TrexSpec::validate() const {
  data.validate();
  if (!(q > 1.0)) throw ConfigError("trex: q must be > 1");
  if (!(beta > 0.0)) throw ConfigError("trex: beta must be > 0");
}

RealVec TrexSpec::x_j(int j) const {
  check_index(*this, j);
  return j < p() ? RealVec(data.X.col(j)) : RealVec(-data.X.col(j - p()));
}

RealMat TrexSpec::M_j(int j) const {
  const RealVec xj = x_j(j);
  const int n = static_cast<int>(data.X.rows());
  RealMat m(n + 1, p());
  m.row(0) = xj.transpose() * data.X;
  m.bottomRows(n) = data.X;
  return m;
}

PerspectiveQ TrexSpec::g_params(int j) const {
  const RealVec xj = x_j(j);
  return PerspectiveQ(q, beta, xj.dot(data.z), data.z);
}

SplitProblem TrexSpec::subproblem(int j) const {
  const int n = static_cast<int>(data.X.rows());
  std::vector<SplitTerm> terms;
  terms.push_back({std::make_shared<Perspective>(n, g_params(j)), LinearMap::from_matrix(M_j(j))});
  return SplitProblem(std::make_shared<L1Norm>(p()), std::move(terms));
}

double TrexSpec::objective(int j, const RealVec& b) const {
  const RealVec xj = x_j(j);
  const RealVec xb = data.X * b;
  const double g = g_params(j).value(xj.dot(xb), xb);
  if (g == kInfinity) return kInfinity;
  return g + b.lpNorm<1>();
}

TrexSubResult trex_subproblem(const TrexSpec& s, int j, const TrexRunConfig& cfg) {
  s.validate();
  check_index(s, j);
  const SplitProblem sp = s.subproblem(j);
  const auto t = drs_product_I(sp);
  KMConfig kc;
  kc.alpha = km_alpha(cfg);
  kc.max_iter = cfg.max_iter;
  kc.fp_residual_tol = 0.0;
  kc.divergence_guard = cfg.divergence_guard;
  kc.record_trace = cfg.record_trace;
  kc.probe = make_probe(cfg);
  KMResult r = km_iterate(*t, kc, RealVec::Zero(t->dim()), cfg.record_trace ? &sp : nullptr);
  TrexSubResult out;
  out.b = t->extract(r.z);
  out.objective = s.objective(j, out.b);
  if (cfg.report_psi) out.psi = cfg.report_psi->value(out.b);
  out.z = std::move(r.z);
  out.trace = std::move(r.trace);
  return out;
}

TrexSubResult htrex_subproblem(const TrexSpec& s, int j, const SmoothPtr& psi,
                               const TrexRunConfig& cfg) {
  s.validate();
  check_index(s, j);
  if (!psi || psi->dim() != s.p()) throw StructuralError("htrex: psi must live on R^p");
  HierProblem h(s.subproblem(j), psi);
  HsdmConfig hc;
  hc.schedule = StepSchedule::harmonic(cfg.lambda0);
  hc.alpha = km_alpha(cfg);
  hc.max_iter = cfg.max_iter;
  hc.divergence_guard = cfg.divergence_guard;
  hc.record_trace = cfg.record_trace;
  hc.probe = make_probe(cfg);
  HsdmResult r = hsdm_drs_I(h, hc);
  TrexSubResult out;
  out.b = std::move(r.x);
  out.objective = s.objective(j, out.b);
  out.psi = psi->value(out.b);
  out.z = std::move(r.z);
  out.trace = std::move(r.trace);
  return out;
}

int select_candidate(const std::vector<double>& objective, const std::vector<double>& psi,
                     double band) {
  int best = -1;
  for (std::size_t j = 0; j < objective.size(); ++j)
    if (std::isfinite(objective[j]) && (best < 0 || objective[j] < objective[best]))
      best = static_cast<int>(j);
  if (best < 0 || psi.empty()) return best;
  const double cut = objective[best] + band * std::max(1.0, std::abs(objective[best]));
  int pick = best;
  for (std::size_t j = 0; j < objective.size(); ++j) {
    if (!(objective[j] <= cut) || std::isnan(psi[j])) continue;
    if (std::isnan(psi[pick]) || psi[j] < psi[pick] ||
        (psi[j] == psi[pick] && static_cast<int>(j) < pick))
      pick = static_cast<int>(j);
  }
  return pick;
}

TrexResult trex_solve(const TrexSpec& s, const TrexRunConfig& cfg) {
  return run_all(s, cfg, [&](int j) { return trex_subproblem(s, j, cfg); }, false);
}

TrexResult htrex_solve(const TrexSpec& s, const SmoothPtr& psi, const TrexRunConfig& cfg) {
  return run_all(s, cfg, [&](int j) { return htrex_subproblem(s, j, psi, cfg); }, true);
}

SmoothPtr smooth_diff_psi(int p) {
  if (p < 2) throw StructuralError("smooth_diff_psi: p must be >= 2");
  RealMat d = RealMat::Zero(p - 1, p);
  for (int i = 0; i < p - 1; ++i) {
    d(i, i) = -1.0;
    d(i, i + 1) = 1.0;
  }
  return std::make_shared<QuadraticSmooth>(std::move(d), RealVec::Zero(p - 1));
}

SynthData synth_generate(int N, int p, double snr, std::uint64_t seed) {
  if (p < 6) throw ConfigError("synth_generate: p must be >= 6");
  if (N < 1) throw ConfigError("synth_generate: N must be >= 1");
  if (std::isnan(snr)) throw ConfigError("synth_generate: SNR is NaN");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  SynthData out;
  RealMat& X = out.data.X;
  X.resize(N, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < N; ++i) X(i, j) = nd(rng);
  X.col(2) = X.col(1);
  X.col(3) = X.col(1);
  for (int j = 0; j < p; ++j) X.col(j) *= std::sqrt(static_cast<double>(N)) / X.col(j).norm();
  X.col(2) = X.col(1);
  X.col(3) = X.col(1);

  out.b_true = RealVec::Zero(p);
  out.b_true.segment(3, 3).setConstant(1.0 / std::sqrt(static_cast<double>(p)));
  const RealVec clean = X * out.b_true;
  out.data.z = clean;
  if (std::isfinite(snr)) {
    RealVec e(N);
    for (int i = 0; i < N; ++i) e[i] = nd(rng);
    out.sigma = std::sqrt(clean.squaredNorm() / (std::pow(10.0, snr / 10.0) * e.squaredNorm()));
    out.data.z += out.sigma * e;
  }
  return out;
}

double snr_db(const RealMat& X, const RealVec& b_true, const RealVec& z) {
  const RealVec clean = X * b_true;
  const double noise = (z - clean).squaredNorm();
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(clean.squaredNorm() / noise);
}

double TrexCertificate::worst() const {
  return std::max({l1_slack, perspective_slack, stationarity, consistency});
}

TrexCertificate trex_certificate(const TrexSpec& s, int j, const RealVec& z) {
  const SplitProblem sp = s.subproblem(j);
  const DrsProductI t(sp);
  if (z.size() != t.dim()) throw StructuralError("trex_certificate: state dimension mismatch");
  const int p = s.p();
  const int k = sp.codomain_dim();
  const RealVec r = 2.0 * t.project(z) - z;
  const RealVec w = t.prox_F(r);
  const RealVec g = r - w;  // lies in the subdifferential of F at w
  TrexCertificate c;
  for (int i = 0; i < p; ++i) {
    const double gi = g[i];
    const double slack = w[i] != 0.0 ? std::abs(gi - std::copysign(1.0, w[i]))
                                     : std::max(0.0, std::abs(gi) - 1.0);
    c.l1_slack = std::max(c.l1_slack, slack);
  }
  const PerspectiveQ pq = s.g_params(j);
  c.perspective_slack = perspective_subgradient_slack(pq, w[p], w.segment(p + 1, k - 1), g[p],
                                                      g.segment(p + 1, k - 1));
  const RealVec stat = g.head(p) + t.a().transpose() * g.tail(k);
  c.stationarity = stat.norm() / (1.0 + g.head(p).norm());
  c.consistency = (w.tail(k) - t.a() * w.head(p)).norm() / (1.0 + w.tail(k).norm());
  return c;
}

}  // namespace hierprox
