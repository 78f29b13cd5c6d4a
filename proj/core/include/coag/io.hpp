#ifndef COAG_IO_HPP
#define COAG_IO_HPP

#include <string>

#include "coag/solver.hpp"

namespace coag {

// Trajectory output bundle inside a directory:
//   moments.csv    t, m_neg2b, m_negb, m0, m1, m2, loss   (one row per step)
//   snapshots.csv  time, zeta_pivot, g                    (long format)
//   report.json    grid/kernel/truncation metadata, config hash, warnings,
//                  plus whatever diagnostics the caller attached
// Floats are written with %.17g, so a reload round-trips bit-exactly and
// reruns of the same config produce identical bytes.

void write_moments_csv(const Trajectory& traj, const std::string& path);
void write_snapshots_csv(const Trajectory& traj, const std::string& path);

// Reconstructs a trajectory from a bundle directory. Kernel and grid are
// rebuilt from report.json; custom kernels cannot be reloaded. Missing or
// inconsistent files raise std::runtime_error.
Trajectory load_trajectory(const std::string& dir);

// deterministic float formatting used by every writer
std::string format_double(double v);

}  // namespace coag

#endif
