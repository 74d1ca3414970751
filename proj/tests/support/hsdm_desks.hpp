#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/LU>

#include <hierprox/hsdm.hpp>

#include "oracles.hpp"

// Small hierarchical problems whose nearest-point answers are known in
// closed form, plus a uniform way to call every HSDM driver.
namespace desk {

using namespace hierprox;

inline RealVec vec(std::initializer_list<double> v) {
  RealVec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline ProxPtr box(double lo, double hi) { return std::make_shared<IndicatorBox>(vec({lo}), vec({hi})); }
inline ProxPtr point(RealVec c) { return std::make_shared<IndicatorPoint>(std::move(c)); }
inline ProxPtr zero(int n) { return std::make_shared<ZeroFunction>(n); }
inline SmoothPtr dist_to(RealVec c) { return QuadraticSmooth::distance_to(c); }

// Projection of x0 onto {x in R^2 : <a_i, x> >= 1} by enumerating active sets.
inline RealVec polyhedron_projection(const RealVec& x0, const std::vector<RealVec>& rows) {
  auto feasible = [&](const RealVec& x) {
    for (auto& a : rows)
      if (a.dot(x) < 1.0 - 1e-12) return false;
    return true;
  };
  RealVec best;
  double bd = oracle::kInf;
  auto consider = [&](const RealVec& x) {
    if (feasible(x) && (x - x0).norm() < bd) { bd = (x - x0).norm(); best = x; }
  };
  consider(x0);
  for (auto& a : rows) consider(x0 + (1.0 - a.dot(x0)) / a.squaredNorm() * a);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      RealMat m(2, 2);
      m.row(0) = rows[i];
      m.row(1) = rows[j];
      if (std::abs(m.determinant()) > 1e-12) consider(m.partialPivLu().solve(RealVec::Ones(2)));
    }
  return best;
}

struct Desk {
  std::string name;
  SplitProblem split;
  RealVec x0;
  RealVec answer;  // projection of x0 onto the solution set
  bool scalar_rows;
};

inline std::vector<Desk> desks() {
  std::vector<Desk> out;
  out.push_back({"interval", SplitProblem(zero(1), {{box(1, 2), LinearMap::identity(1)}}), vec({0.0}),
                 vec({1.0}), true});
  out.push_back({"interval_far", SplitProblem(zero(1), {{box(1, 2), LinearMap::identity(1)}}), vec({3.5}),
                 vec({2.0}), true});
  out.push_back({"ball_diagonal",
                 SplitProblem(std::make_shared<IndicatorBall>(2, std::sqrt(2.0)),
                              {{point(RealVec::Zero(1)), LinearMap::row(vec({1, -1}))}}),
                 vec({2.0, 0.0}), vec({1.0, 1.0}), true});
  std::vector<RealVec> rows = {vec({1.0, 0.5}), vec({-0.3, 1.0}), vec({0.8, 0.9})};
  std::vector<SplitTerm> hinge_terms;
  for (auto& a : rows) hinge_terms.push_back({std::make_shared<HingeSum>(1), LinearMap::row(a)});
  RealVec x0 = vec({-0.5, -0.2});
  out.push_back({"hinge_polyhedron", SplitProblem(zero(2), hinge_terms), x0,
                 polyhedron_projection(x0, rows), true});
  return out;
}

enum class Driver { DrsI, DrsII, LalStrong, Lal };
inline const char* name(Driver d) {
  switch (d) {
    case Driver::DrsI: return "drs_I";
    case Driver::DrsII: return "drs_II";
    case Driver::LalStrong: return "lal_strong";
    case Driver::Lal: return "lal";
  }
  return "";
}

inline HsdmResult run(Driver d, const HierProblem& h, const HsdmConfig& cfg) {
  switch (d) {
    case Driver::DrsI: return hsdm_drs_I(h, cfg);
    case Driver::DrsII: return hsdm_drs_II(h, cfg);
    case Driver::LalStrong: {
      HsdmConfig c = cfg;
      c.alpha = 1.0;
      return hsdm_lal_strong(h, c);
    }
    case Driver::Lal: return hsdm_lal(h, cfg);
  }
  throw std::logic_error("driver");
}

// First-stage objective with indicator constraints read up to a 1e-5
// feasibility tolerance: each term is evaluated at its tiny-index prox.
inline double phi_tolerant(const SplitProblem& sp, const RealVec& x) {
  auto term = [](const Proximable& g, const RealVec& v) {
    RealVec p = g.prox(1e-12, v);
    return (p - v).norm() <= 1e-5 ? g.value(p) : kInfinity;
  };
  double v = term(*sp.f(), x);
  for (auto& t : sp.terms()) v += term(*t.g, t.a.apply(x));
  return v;
}

}  // namespace desk
