#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oodcp::cli {

// Process exit codes. "Infeasible" is a valid answer (the honest full
// prediction set), distinct from bad input so scripts can tell them apart.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;

inline constexpr int kSchemaVersion = 1;

struct GcurveOptions {
  std::string family = "chi2";
  double rho = 0.0;
  double step = 0.01;   // grid spacing, in (0, 0.5]
  std::string out;      // empty writes to stdout
};

struct ThresholdOptions {
  std::vector<std::string> score_files;  // one per source domain
  std::string family = "chi2";
  double rho = 0.0;
  double alpha = 0.1;
  int epsilon_grid = 2000;
  // Pretend every source holds this many points for the concentration
  // correction (quantiles still use the real scores).
  std::optional<std::uint64_t> assume_m;
  std::string out;  // empty writes to stdout
};

struct SimulateOptions {
  std::string config_file;
  std::string out_prefix;             // writes <prefix>.csv, <prefix>.summary.json
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

struct BoundOptions {
  std::vector<std::uint64_t> sample_sizes;  // calibration points per source
  std::string family = "chi2";
  double rho = 0.0;
  double alpha = 0.1;
  int epsilon_grid = 2000;
  std::optional<double> epsilon;  // omitted: optimized over the grid
  std::string out;                // empty writes to stdout
};

// Each runner validates its inputs, opens outputs before computing, writes
// the report, and returns one of the exit codes above. Diagnostics go to
// stderr; reports go to the selected output stream only.
int run_gcurve(const GcurveOptions& options);
int run_threshold(const ThresholdOptions& options);
int run_simulate(const SimulateOptions& options);
int run_bound(const BoundOptions& options);

}  // namespace oodcp::cli
