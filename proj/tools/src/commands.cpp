#include "hierprox_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include <hierprox/errors.hpp>
#include <hierprox/svm.hpp>
#include <hierprox/trex.hpp>

#include "hierprox_cli/io.hpp"

namespace hierprox::cli {

using nlohmann::json;

namespace {

json vec_json(const RealVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json classifier_json(const Dataset& d, const LinearClassifier& c) {
  return json{{"w", vec_json(c.w)},
              {"b", c.b},
              {"margin", num_or_null(c.margin())},
              {"errors", error_count(d, c)},
              {"hinge_loss", hinge_loss(d, c)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// path/name.ext -> path/name<tag>.ext
std::string with_tag(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + tag + p.extension().string());
  return out.string();
}

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || std::isnan(v))
    throw ConfigError("invalid SNR value '" + s + "' (number in dB or 'inf')");
  return v;
}

std::vector<double> parse_snr_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(parse_snr(f));
  if (out.empty()) throw ConfigError("empty SNR list");
  return out;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const StructuralError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DivergenceError& e) {
    err << "solver diverged: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
}

json method_json(const TrexResult& r, const RealVec& b_true, const SmoothPtr& psi) {
  int failed = 0;
  for (const auto& f : r.failures) failed += f.empty() ? 0 : 1;
  json objectives = json::array();
  for (double v : r.objective) objectives.push_back(num_or_null(v));
  return json{{"j_star", r.j_star},
              {"function_value", r.objective[r.j_star]},
              {"distance", b_true.size() ? json((r.b - b_true).norm()) : json(nullptr)},
              {"psi", psi ? json(psi->value(r.b)) : json(nullptr)},
              {"b", vec_json(r.b)},
              {"failed_candidates", failed},
              {"objectives", objectives}};
}

}  // namespace

int run_svm(const SvmArgs& a, std::ostream& log, std::ostream& err) {
  return guarded(
      [&]() -> int {
        if (a.subset != "sep" && a.subset != "nsep")
          throw ConfigError("--subset must be sep or nsep");
        if (a.mode != "m2lehl" && a.mode != "softmargin" && a.mode != "qp" && a.mode != "all")
          throw ConfigError("--mode must be m2lehl, softmargin, qp or all");
        if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw ConfigError("--alpha must lie in (0,1)");
        if (!(a.lambda0 >= 0.0)) throw ConfigError("--lambda0 must be >= 0");
        if (!(a.C > 0.0)) throw ConfigError("--C must be > 0");
        if (a.max_iter < 1) throw ConfigError("--max-iter must be >= 1");
        if (a.data.empty()) throw ConfigError("--data is required");

        const IrisTable iris = read_iris_csv(a.data);
        const Dataset d = iris_subset(iris.features, iris.species,
                                      a.subset == "sep" ? IrisSubset::Separable
                                                        : IrisSubset::NonSeparable);
        SvmConfig cfg;
        cfg.alpha = a.alpha;
        cfg.lambda0 = a.lambda0;
        cfg.max_iter = a.max_iter;
        cfg.radius = a.radius;

        json out{{"command", "svm"}, {"subset", a.subset}, {"points", d.size()}};
        json cls = json::object();
        IterTrace trace;
        const bool all = a.mode == "all";
        if (all || a.mode == "m2lehl") {
          SvmTrainResult r = m2lehl_train(d, cfg);
          json j = classifier_json(d, r.classifier);
          j["radius"] = r.radius;
          j["lambda0"] = r.lambda0;
          j["ball_binding"] = r.ball_binding;
          j["iterations"] = r.trace.size();
          if (r.ball_binding)
            err << "warning: M2LEHL solution reached 0.99 of the ball radius; increase --radius\n";
          cls["m2lehl"] = j;
          trace = std::move(r.trace);
        }
        if (all || a.mode == "softmargin") {
          SvmTrainResult r = softmargin_train(d, a.C, cfg);
          json j = classifier_json(d, r.classifier);
          j["C"] = a.C;
          j["objective"] = softmargin_objective(d, r.classifier, a.C);
          cls["softmargin"] = j;
          if (a.mode == "softmargin") trace = std::move(r.trace);
        }
        if (all || a.mode == "qp") {
          try {
            cls["qp"] = classifier_json(d, original_svm_qp(d));
          } catch (const DataError& e) {
            if (!all) throw;
            cls["qp"] = json{{"error", e.what()}};
          }
        }
        out["classifiers"] = cls;

        OutputSet files;
        if (!a.trace.empty()) files.add(a.trace, format_trace_csv(trace));
        if (!a.out.empty()) files.add(a.out, dump(out));
        files.commit();
        if (a.out.empty()) log << dump(out);
        return kOk;
      },
      err);
}

int run_trex(const TrexArgs& a, std::ostream& log, std::ostream& err) {
  return guarded(
      [&]() -> int {
        if (a.mode != "trex" && a.mode != "htrex" && a.mode != "both")
          throw ConfigError("--mode must be trex, htrex or both");
        if (a.psi != "none" && a.psi != "smoothdiff")
          throw ConfigError("--psi must be none or smoothdiff");
        if (!(a.q > 1.0)) throw ConfigError("--q must be > 1");
        if (!(a.beta > 0.0)) throw ConfigError("--beta must be > 0");
        if (!(a.alpha > 0.0 && a.alpha < 2.0)) throw ConfigError("--alpha must lie in (0,2)");
        if (!(a.lambda0 > 0.0)) throw ConfigError("--lambda0 must be > 0");
        if (a.max_iter < 1) throw ConfigError("--max-iter must be >= 1");
        if (a.x.empty() != a.z.empty()) throw ConfigError("--x and --z must be given together");
        const bool real = !a.x.empty();
        if (!real && (a.n < 1 || a.p < 6)) throw ConfigError("synthetic data needs --n >= 1 and --p >= 6");
        if (real && !a.snr_sweep.empty()) throw ConfigError("--snr-sweep needs synthetic data");

        const bool do_trex = a.mode != "htrex";
        const bool do_htrex = a.mode != "trex";

        auto make_psi = [&](int p) -> SmoothPtr {
          if (a.psi == "smoothdiff") return smooth_diff_psi(p);
          return std::make_shared<ZeroSmooth>(p);
        };

        TrexRunConfig base;
        base.relaxation = a.alpha;
        base.lambda0 = a.lambda0;
        base.max_iter = a.max_iter;
        base.workers = a.workers;

        json cfgj{{"mode", a.mode}, {"q", a.q},         {"beta", a.beta},
                  {"psi", a.psi},   {"max_iter", a.max_iter}, {"relaxation", a.alpha},
                  {"lambda0", a.lambda0}};
        json out{{"command", "trex"}};
        OutputSet files;

        if (!a.snr_sweep.empty()) {
          cfgj["n"] = a.n;
          cfgj["p"] = a.p;
          cfgj["seed"] = a.seed;
          json rows = json::array();
          for (double snr : parse_snr_list(a.snr_sweep)) {
            const SynthData sd = synth_generate(a.n, a.p, snr, a.seed);
            TrexSpec spec{sd.data, a.q, a.beta};
            TrexRunConfig cfg = base;
            cfg.record_trace = false;
            cfg.b_true = sd.b_true;
            const SmoothPtr psi = make_psi(a.p);
            json row{{"snr", num_or_null(snr)}};
            if (do_trex) row["trex"] = method_json(trex_solve(spec, cfg), sd.b_true, psi);
            if (do_htrex) row["htrex"] = method_json(htrex_solve(spec, psi, cfg), sd.b_true, psi);
            rows.push_back(row);
          }
          cfgj["snr_sweep"] = a.snr_sweep;
          out["config"] = cfgj;
          out["sweep"] = rows;
        } else {
          TrexSpec spec;
          RealVec b_true;
          spec.q = a.q;
          spec.beta = a.beta;
          if (real) {
            spec.data.X = read_numeric_csv(a.x);
            spec.data.z = read_vector_csv(a.z);
            spec.data.validate();
            cfgj["x"] = a.x;
            cfgj["z"] = a.z;
          } else {
            const double snr = parse_snr(a.snr);
            const SynthData sd = synth_generate(a.n, a.p, snr, a.seed);
            spec.data = sd.data;
            b_true = sd.b_true;
            cfgj["n"] = a.n;
            cfgj["p"] = a.p;
            cfgj["seed"] = a.seed;
            cfgj["snr"] = num_or_null(snr);
            out["realized_snr"] = num_or_null(snr_db(sd.data.X, sd.b_true, sd.data.z));
          }
          out["config"] = cfgj;
          const SmoothPtr psi = make_psi(spec.p());
          TrexRunConfig cfg = base;
          cfg.record_trace = !a.trace.empty();
          cfg.b_true = b_true;
          cfg.report_psi = psi;
          json results = json::object();
          if (do_trex) {
            const TrexResult r = trex_solve(spec, cfg);
            results["trex"] = method_json(r, b_true, psi);
            if (!a.trace.empty())
              files.add(do_htrex ? with_tag(a.trace, ".trex") : a.trace, format_trace_csv(r.trace));
          }
          if (do_htrex) {
            const TrexResult r = htrex_solve(spec, psi, cfg);
            results["htrex"] = method_json(r, b_true, psi);
            if (!a.trace.empty())
              files.add(do_trex ? with_tag(a.trace, ".htrex") : a.trace, format_trace_csv(r.trace));
          }
          out["results"] = results;
        }
        if (!a.out.empty()) files.add(a.out, dump(out));
        files.commit();
        if (a.out.empty()) log << dump(out);
        return kOk;
      },
      err);
}

}  // namespace hierprox::cli
