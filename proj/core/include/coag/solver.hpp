#ifndef COAG_SOLVER_HPP
#define COAG_SOLVER_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coag/grid.hpp"
#include "coag/initial.hpp"
#include "coag/kernel.hpp"

namespace coag {

struct GridSpec {
    double min_volume = 0.0;
    double max_volume = 0.0;
    std::size_t cells = 0;
};

struct TimePolicy {
    enum class Method { rk4, rkf45 };
    Method method = Method::rk4;
    // fixed step for rk4; 0 selects dt so that dt * max |dg_i/g_i| <= 0.1 at
    // t = 0, the max taken over cells holding at least 1e-12 of the peak value
    double dt = 0.0;
    double rel_tol = 1e-8;         // rkf45 step control
    double dt_min_factor = 1e-12;  // hard stiffness error below initial dt * factor
};

struct SnapshotSchedule {
    // Fixed-step runs record every `stride` accepted steps (0 picks about 50
    // snapshots per run); explicit `times` win and map to the nearest step.
    // Adaptive runs ignore stride, land exactly on `times`, and default to 50
    // evenly spaced times. The final time is always recorded.
    std::size_t stride = 0;
    std::vector<double> times;
};

struct RunConfig {
    Kernel kernel = Kernel::constant();
    TruncationParams trunc;
    GridSpec grid;
    InitialDensity initial = InitialDensity::exponential(1.0, 1.0);
    double horizon = 0.0;
    TimePolicy time;
    SnapshotSchedule snapshots;
    int threads = 1;
    std::string config_hash;  // carried into outputs; empty outside the CLI
};

struct MomentRow {
    double t;
    double m_neg2b;  // moment of order -2*beta
    double m_negb;
    double m0;
    double m1;
    double m2;
    double loss;  // cumulative mass booked by the non-conservative escape term
};

struct Trajectory {
    std::shared_ptr<const Grid> grid;
    Kernel kernel = Kernel::constant();
    TruncationParams trunc;
    std::vector<DistributionState> snapshots;  // always includes t = 0 and t = horizon
    std::vector<MomentRow> moments;            // one row per accepted step, t = 0 first
    double dt_initial = 0.0;
    double initial_mass_outside_grid = 0.0;  // mass of g_in ignored by projection
    bool singular_norm_warning = false;      // z^-2beta moment of g_in diverges near 0
    std::string config_hash;

    const DistributionState& initial_state() const { return snapshots.front(); }
    const DistributionState& final_state() const { return snapshots.back(); }
    // snapshot with |time - t| <= 1e-9 * max(1, |t|); throws std::invalid_argument
    const DistributionState& snapshot_at(double t) const;
};

// Precomputed pairwise interaction rules for one (grid, kernel, truncation)
// triple. Every unordered pivot pair is present in canonical order (outer
// index i, inner j >= i), inert pairs with an exactly zero rate included, so
// the accumulation order and therefore the floating-point result depend only
// on the cell count; thread count, theta, n and kernel zeros never change it.
class PairTable {
public:
    PairTable(const Grid& grid, const Kernel& kernel, const TruncationParams& tp);

    // dgdt_i = sum of pair rules; loss_rate = mass flux of escaping pairs.
    // Bit-identical for any `threads`; chunk partials are merged in fixed order.
    void rhs(std::span<const double> g, std::span<double> dgdt, double& loss_rate,
             int threads = 1) const;

    std::size_t cells() const { return cells_; }
    std::size_t pair_count() const { return coeff_.size(); }
    std::size_t active_pairs() const;  // rules with a nonzero rate coefficient

private:
    void rhs_chunk(std::span<const double> g, std::size_t chunk, std::span<double> dgdt,
                   double& loss_rate) const;

    std::size_t cells_ = 0;
    std::size_t chunk_count_ = 1;
    std::vector<std::size_t> chunk_start_;  // chunk boundaries in flat pair index
    // flat arrays over pairs, canonical (i, j >= i) order
    std::vector<std::uint32_t> idx_i_, idx_j_, birth_lo_, birth_hi_;
    std::vector<double> coeff_;            // psi_n^theta(x_i,x_j) w_i w_j (1/2 on diagonal)
    std::vector<double> gain_lo_, gain_hi_;  // number fractions / target width
    std::vector<double> loss_volume_;        // x_i + x_j for escaping pairs, else 0
    std::vector<double> inv_w_;              // per cell
};

// Integrates the truncated equation on [0, horizon]. Checks grid support
// against the truncation level (e_0 <= 1/n and e_N >= n), projects the
// initial density, and records moments per accepted step plus scheduled
// snapshots. The cumulative escape loss is integrated as an extra state
// component with the same tableau, so mass + loss is conserved to round-off.
// Steps that would produce a negative or non-finite state are retried at
// half the step; underflow below dt * dt_min_factor raises a stiffness error
// (std::runtime_error). Configuration problems raise std::invalid_argument.
Trajectory run(const RunConfig& config);

// Same run with cells * refinement and dt / refinement, identical snapshot
// stride (so recorded times nest). refinement = 1 reproduces run() exactly.
Trajectory reference_run(const RunConfig& config, int refinement);

}  // namespace coag

#endif
