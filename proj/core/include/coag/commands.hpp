#ifndef COAG_COMMANDS_HPP
#define COAG_COMMANDS_HPP

#include <string>
#include <vector>

namespace coag {

// CLI verb implementations. Outcomes are reported through the exit code:
//   0 success, 2 configuration/data error, 3 numerical failure.
// Messages go to stderr; result tables to stdout. Output files are only
// created after the configuration has validated.

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

int run_command(const std::string& config_path, const std::string& out_dir, int threads);

// theta = 0 and theta = 1 runs per truncation level; writes study.csv and
// study.json, prints a table with per-row wall-clock time (stdout only, the
// files stay deterministic).
int study_command(const std::string& config_path, const std::vector<double>& n_values,
                  const std::string& out_dir, int threads);

int compare_command(const std::string& trajectory_dir, const std::string& oracle_spec,
                    const std::string& out_path);

int audit_kernel_command(const std::string& config_path, double sample_min,
                         double sample_max, int sample_points,
                         const std::string& out_path);

// COAG_THREADS, default 1; values < 1 or unparsable fall back to 1
int threads_from_env();

}  // namespace coag

#endif
