#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <hierprox/errors.hpp>
#include <hierprox/hsdm.hpp>
#include <hierprox/prox.hpp>
#include <hierprox/splitting.hpp>

#include "hierprox_cli/commands.hpp"

namespace hierprox::cli {

namespace {

struct Check {
  std::string name;
  std::function<double()> observe;  // deviation, must stay <= limit
  double limit;
};

RealVec randn(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  RealVec v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

double firm_violation(const Proximable& f, double gamma, std::mt19937_64& rng, int pairs) {
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const RealVec x = randn(f.dim(), rng, 3.0), y = randn(f.dim(), rng, 3.0);
    const RealVec px = f.prox(gamma, x), py = f.prox(gamma, y);
    worst = std::max(worst, (px - py).squaredNorm() - (x - y).dot(px - py));
  }
  return worst;
}

RealVec km_extract(const FixedPointOperator& t, std::size_t iters) {
  KMConfig c;
  c.max_iter = iters;
  c.record_trace = false;
  return t.extract(km_iterate(t, c, RealVec::Zero(t.dim())).z);
}

SplitProblem abs_plus_quadratic() {
  std::vector<SplitTerm> terms;
  terms.push_back({Quadratic::isotropic(1.0, RealVec::Constant(1, 3.0)), LinearMap::identity(1)});
  return SplitProblem(std::make_shared<L1Norm>(1), std::move(terms));
}

}  // namespace

int run_selftest(const SelftestArgs& a, std::ostream& log, std::ostream& err) {
  const bool perturb = std::getenv("HIERPROX_SELFTEST_PERTURB") != nullptr &&
                       std::string(std::getenv("HIERPROX_SELFTEST_PERTURB")) != "" &&
                       std::string(std::getenv("HIERPROX_SELFTEST_PERTURB")) != "0";
  std::mt19937_64 rng(a.seed);
  const RealMat m = randn(24, rng).reshaped(4, 6);

  std::vector<Check> checks;
  checks.push_back({"linop.adjoint_identity", [&] {
                      return adjoint_check(LinearMap::from_matrix(m), 100, a.seed) ? 0.0 : 1.0;
                    }, 0.0});
  checks.push_back({"linop.gram_residual", [&] {
                      GramSolver g(LinearMap::from_matrix(m));
                      const RealVec v = randn(4, rng);
                      const RealVec w = g.solve(v);
                      return (w + m * (m.transpose() * w) - v).norm() / v.norm();
                    }, 1e-8});
  checks.push_back({"prox.hinge_formula", [&] {
                      return std::abs(prox_hinge(1.0, -0.5) - 0.5) + std::abs(prox_hinge(0.2, 0.9) - 1.0);
                    }, 1e-15});
  checks.push_back({"prox.l1_firm", [&] { return firm_violation(L1Norm(5), 0.7, rng, 50); }, 1e-9});
  checks.push_back({"prox.hinge_firm", [&] { return firm_violation(HingeSum(5), 0.7, rng, 50); }, 1e-9});
  checks.push_back({"prox.ball_firm", [&] { return firm_violation(IndicatorBall(5, 1.5), 1.0, rng, 50); }, 1e-9});
  checks.push_back({"prox.perspective_firm", [&] {
                      return firm_violation(Perspective(3, PerspectiveQ(2.0, 0.5)), 1.0, rng, 50);
                    }, 1e-9});
  checks.push_back({"prox.perspective_inclusion", [&] {
                      double worst = 0.0;
                      for (double q : {1.5, 2.0, 3.0}) {
                        const PerspectiveQ pq(q, 0.7);
                        for (int t = 0; t < 20; ++t) {
                          const RealVec v = randn(4, rng, 2.0);
                          auto [eo, yo] = prox_perspective(pq, v[0], v.tail(3));
                          worst = std::max(worst, perspective_subgradient_slack(pq, eo, yo, v[0] - eo,
                                                                                v.tail(3) - yo));
                        }
                      }
                      return worst;
                    }, 1e-6});
  checks.push_back({"prox.moreau_decomposition", [&] {
                      const L1Norm f(4);
                      const RealVec x = randn(4, rng, 2.0);
                      return (f.prox(1.0, x) + prox_conjugate(f, 1.0, x) - x).norm();
                    }, 1e-12});
  checks.push_back({"splitting.drs_desk", [&] {
                      auto t = drs_operator(std::make_shared<L1Norm>(1),
                                            Quadratic::isotropic(1.0, RealVec::Constant(1, 3.0)));
                      const double expected = perturb ? 3.0 : 2.0;
                      return std::abs(km_extract(*t, 2000)[0] - expected);
                    }, 1e-6});
  checks.push_back({"splitting.drs_I_desk", [&] {
                      return std::abs(km_extract(*drs_product_I(abs_plus_quadratic()), 5000)[0] - 2.0);
                    }, 1e-6});
  checks.push_back({"splitting.drs_II_desk", [&] {
                      return std::abs(km_extract(*drs_product_II(abs_plus_quadratic()), 5000)[0] - 2.0);
                    }, 1e-6});
  checks.push_back({"splitting.lal_desk", [&] {
                      std::vector<SplitTerm> terms;
                      RealVec row(2);
                      row << 0.5, 0.0;
                      terms.push_back({std::make_shared<IndicatorPoint>(RealVec::Zero(1)), LinearMap::row(row)});
                      RealVec c(2);
                      c << 2.0, 3.0;
                      SplitProblem p(Quadratic::isotropic(1.0, c), std::move(terms));
                      RealVec want(2);
                      want << 0.0, 3.0;
                      return (km_extract(*lal_operator(p), 20000) - want).norm();
                    }, 1e-6});
  checks.push_back({"hsdm.drs_I_nearest_point", [&] {
                      std::vector<SplitTerm> terms;
                      terms.push_back({std::make_shared<IndicatorBox>(RealVec::Constant(1, 1.0),
                                                                      RealVec::Constant(1, 2.0)),
                                       LinearMap::identity(1)});
                      HierProblem h(SplitProblem(std::make_shared<ZeroFunction>(1), std::move(terms)),
                                    QuadraticSmooth::distance_to(RealVec::Zero(1)));
                      HsdmConfig cfg;
                      cfg.max_iter = 20000;
                      cfg.record_trace = false;
                      return std::abs(hsdm_drs_I(h, cfg).x[0] - 1.0);
                    }, 1e-3});

  int failed = 0;
  char line[160];
  std::snprintf(line, sizeof line, "%-30s %14s %12s  %s\n", "check", "observed", "limit", "status");
  log << line;
  for (const auto& c : checks) {
    double v = 0.0;
    std::string note;
    try {
      v = c.observe();
    } catch (const std::exception& e) {
      v = std::numeric_limits<double>::infinity();
      note = std::string("  ") + e.what();
    }
    const bool ok = v <= c.limit;
    failed += ok ? 0 : 1;
    std::snprintf(line, sizeof line, "%-30s %14.6e %12.3e  %s", c.name.c_str(), v, c.limit,
                  ok ? "PASS" : "FAIL");
    log << line << note << "\n";
  }
  log << (failed ? std::to_string(failed) + " check(s) failed\n" : "all checks passed\n");
  if (failed) err << "selftest: " << failed << " check(s) failed\n";
  return failed ? kSelftestFailed : kOk;
}

}  // namespace hierprox::cli
