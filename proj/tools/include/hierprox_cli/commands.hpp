#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hierprox::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kSolverError = 4,
  kSelftestFailed = 5,
};

struct SvmArgs {
  std::string data;
  std::string subset = "nsep";  // sep | nsep
  std::string mode = "all";     // m2lehl | softmargin | qp | all
  double C = 1.0;
  double alpha = 0.5;
  double lambda0 = 0.0;  // 0 = number of points + 1
  std::size_t max_iter = 100000;
  double radius = 0.0;
  std::string out;
  std::string trace;
};

struct TrexArgs {
  std::string mode = "both";  // trex | htrex | both
  double q = 2.0;
  double beta = 0.5;
  std::string psi = "smoothdiff";  // none | smoothdiff
  int n = 30;
  int p = 20;
  std::string snr = "inf";
  std::string snr_sweep;  // comma separated list, replaces --snr
  std::uint64_t seed = 1;
  std::size_t max_iter = 10000;
  double alpha = 1.95;
  double lambda0 = 1.0;
  unsigned workers = 0;
  std::string x;
  std::string z;
  std::string out;
  std::string trace;
};

struct SelftestArgs {
  std::uint64_t seed = 7;
};

// Each returns an ExitCode and reports problems on err.
int run_svm(const SvmArgs& a, std::ostream& log, std::ostream& err);
int run_trex(const TrexArgs& a, std::ostream& log, std::ostream& err);
int run_selftest(const SelftestArgs& a, std::ostream& log, std::ostream& err);

// Full command line entry point.
int run_cli(int argc, char** argv);

}  // namespace hierprox::cli
