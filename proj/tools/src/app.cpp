#include <iostream>

#include <CLI11.hpp>

#include "hierprox_cli/commands.hpp"

namespace hierprox::cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"Hierarchical convex optimization experiments (SVM, TREX)"};
  app.set_config("--config", "", "INI file; one section per subcommand, flags override it");
  app.require_subcommand(1);

  SvmArgs svm;
  auto* s = app.add_subcommand("svm", "Hierarchical SVM on the Iris subsets");
  s->add_option("--data", svm.data, "Iris CSV (150 rows x 5 columns)");
  s->add_option("--subset", svm.subset, "sep or nsep")->capture_default_str();
  s->add_option("--mode", svm.mode, "m2lehl, softmargin, qp or all")->capture_default_str();
  s->add_option("--C", svm.C, "Soft-margin weight")->capture_default_str();
  s->add_option("--alpha", svm.alpha, "Averaging weight in (0,1)")->capture_default_str();
  s->add_option("--lambda0", svm.lambda0, "Step scale, lambda_n = lambda0 / n (0 = points + 1)")->capture_default_str();
  s->add_option("--max-iter", svm.max_iter, "Iteration budget")->capture_default_str();
  s->add_option("--radius", svm.radius, "Ball radius (0 = 1e3 x max point norm)")->capture_default_str();
  s->add_option("--out", svm.out, "JSON result file (stdout when omitted)");
  s->add_option("--trace", svm.trace, "Per-iteration CSV trace");

  TrexArgs trex;
  TrexArgs htrex;
  htrex.mode = "htrex";
  auto add_trex = [](CLI::App* c, TrexArgs& t, bool with_mode) {
    if (with_mode) c->add_option("--mode", t.mode, "trex, htrex or both")->capture_default_str();
    c->add_option("--q", t.q, "Exponent q > 1")->capture_default_str();
    c->add_option("--beta", t.beta, "Scale beta > 0")->capture_default_str();
    c->add_option("--psi", t.psi, "none or smoothdiff")->capture_default_str();
    c->add_option("--n", t.n, "Synthetic sample count N")->capture_default_str();
    c->add_option("--p", t.p, "Synthetic dimension p (>= 6)")->capture_default_str();
    c->add_option("--snr", t.snr, "SNR in dB or inf")->capture_default_str();
    c->add_option("--snr-sweep", t.snr_sweep, "Comma separated SNR list; writes a summary table");
    c->add_option("--seed", t.seed, "Seed for synthetic data")->capture_default_str();
    c->add_option("--max-iter", t.max_iter, "Iterations per candidate")->capture_default_str();
    c->add_option("--alpha", t.alpha, "Relaxation in (0,2)")->capture_default_str();
    c->add_option("--lambda0", t.lambda0, "Step scale, lambda_n = lambda0 / n")->capture_default_str();
    c->add_option("--workers", t.workers, "Worker threads (0 = all cores)")->capture_default_str();
    c->add_option("--x", t.x, "Design matrix CSV (N x p)");
    c->add_option("--z", t.z, "Response CSV (N values)");
    c->add_option("--out", t.out, "JSON result file (stdout when omitted)");
    c->add_option("--trace", t.trace, "Per-iteration CSV trace");
  };
  auto* tc = app.add_subcommand("trex", "TREX and hierarchical TREX");
  add_trex(tc, trex, true);
  auto* hc = app.add_subcommand("htrex", "Hierarchical TREX only");
  add_trex(hc, htrex, false);

  SelftestArgs st;
  auto* sc = app.add_subcommand("selftest", "Run the built-in invariant checks");
  sc->add_option("--seed", st.seed, "Seed for the randomized checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*s) return run_svm(svm, std::cout, std::cerr);
  if (*tc) return run_trex(trex, std::cout, std::cerr);
  if (*hc) return run_trex(htrex, std::cout, std::cerr);
  return run_selftest(st, std::cout, std::cerr);
}

}  // namespace hierprox::cli
