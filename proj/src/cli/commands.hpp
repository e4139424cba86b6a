#pragma once

#include "cli/report.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hobipb::cli {

/// Bad flag values detected after parsing; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemOptions {
  std::string vert;
  std::string face;
  /// {level, radius} of an icosahedral sphere centered at the origin.
  std::vector<double> sphere;
  std::string charges_file;
  /// "x,y,z,q" entries added after the charge file.
  std::vector<std::string> charges;
  double eps1 = 1.0;
  double eps2 = 80.0;
  double kappa = 0.0;
  int workers = 0;
  double tol = 1e-6;
  int restart = 100;
  int singular_points = 4;
  /// Zero all timings so reports are byte-stable.
  bool deterministic = false;
};

struct SolveOptions {
  ProblemOptions problem;
  std::string scheme = "hobi";
  std::string out;
  std::string format = "json";
};

struct ConvergenceOptions {
  ProblemOptions problem;  // mesh fields unused; sphere radius taken from `radius`
  std::vector<int> levels{1, 2, 3};
  double radius = 2.0;
  std::vector<std::string> schemes{"hobi"};
  std::string out;
  std::string format = "csv";
};

struct ScalingOptions {
  ProblemOptions problem;
  std::string scheme = "hobi";
  std::vector<int> workers{1, 2, 4};
  std::string out;
  std::string format = "csv";
};

struct ScalingRow {
  int workers = 1;
  double wall_time = 0.0;
  double speedup = 1.0;
  double efficiency = 1.0;
  /// Max |u_p - u_first| over the packed solution.
  double max_abs_diff = 0.0;
  int iterations = 0;
};

struct ConvergenceResult {
  std::vector<RunReport> runs;
  /// Set when both schemes ran: whether LOBI's e_phi beats HOBI's at the
  /// coarsest level. Recorded, never asserted.
  std::optional<bool> lobi_better_at_coarsest;
};

RunReport cmd_solve(const SolveOptions& opts);
ConvergenceResult cmd_convergence(const ConvergenceOptions& opts);
std::vector<ScalingRow> cmd_scaling(const ScalingOptions& opts);

std::string render_convergence(const ConvergenceResult& result, Format format);
std::string render_scaling(const std::vector<ScalingRow>& rows, Format format);

/// Full command-line entry point. Exit codes: 0 success, 1 runtime failure
/// (one "error: ..." line on `err`), 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hobipb::cli
