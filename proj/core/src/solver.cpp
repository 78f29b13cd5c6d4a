#include "coag/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace coag {

const DistributionState& Trajectory::snapshot_at(double t) const {
    double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (const auto& s : snapshots)
        if (std::abs(s.time - t) <= tol) return s;
    throw std::invalid_argument("no snapshot recorded at t = " + std::to_string(t));
}

PairTable::PairTable(const Grid& grid, const Kernel& kernel, const TruncationParams& tp) {
    cells_ = grid.cells();
    const auto& x = grid.pivots();
    const auto& w = grid.widths();
    const std::size_t N = cells_;
    const std::size_t P = N * (N + 1) / 2;

    inv_w_.resize(N);
    for (std::size_t i = 0; i < N; ++i) inv_w_[i] = 1.0 / w[i];

    idx_i_.reserve(P);
    idx_j_.reserve(P);
    birth_lo_.reserve(P);
    birth_hi_.reserve(P);
    coeff_.reserve(P);
    gain_lo_.reserve(P);
    gain_hi_.reserve(P);
    loss_volume_.reserve(P);

    // Every unordered pair gets a rule, inert ones with coefficient exactly
    // zero, so the flat layout and chunking depend on N alone and equal-math
    // configurations produce bit-identical sums.
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            double psi = eval_truncated(kernel, tp, x[i], x[j]);
            double c = psi * w[i] * w[j];
            if (i == j) c *= 0.5;  // unordered self-pair counts events once
            double v = x[i] + x[j];

            std::uint32_t lo = static_cast<std::uint32_t>(N - 1), hi = lo;
            double glo = 0.0, ghi = 0.0, lossv = 0.0;
            if (tp.theta == 0 && v >= tp.n) {
                lossv = v;  // escape: both partners die, newborn leaves the system
            } else if (v > x[N - 1]) {
                glo = (v / x[N - 1]) * inv_w_[N - 1];  // keep mass, inflate count
            } else {
                std::size_t a = grid.pivot_below(v);
                if (x[a] == v) {
                    lo = hi = static_cast<std::uint32_t>(a);
                    glo = inv_w_[a];
                } else {
                    double f = (v - x[a]) / (x[a + 1] - x[a]);
                    lo = static_cast<std::uint32_t>(a);
                    hi = static_cast<std::uint32_t>(a + 1);
                    glo = (1.0 - f) * inv_w_[a];
                    ghi = f * inv_w_[a + 1];
                }
            }
            idx_i_.push_back(static_cast<std::uint32_t>(i));
            idx_j_.push_back(static_cast<std::uint32_t>(j));
            birth_lo_.push_back(lo);
            birth_hi_.push_back(hi);
            coeff_.push_back(c);
            gain_lo_.push_back(glo);
            gain_hi_.push_back(ghi);
            loss_volume_.push_back(lossv);
        }
    }

    chunk_count_ = std::min<std::size_t>(64, P);
    if (chunk_count_ == 0) chunk_count_ = 1;
    chunk_start_.resize(chunk_count_ + 1);
    for (std::size_t c = 0; c <= chunk_count_; ++c)
        chunk_start_[c] = P * c / chunk_count_;
}

std::size_t PairTable::active_pairs() const {
    std::size_t n = 0;
    for (double c : coeff_)
        if (c != 0.0) ++n;
    return n;
}

void PairTable::rhs_chunk(std::span<const double> g, std::size_t chunk,
                          std::span<double> dgdt, double& loss_rate) const {
    double lr = 0.0;
    for (std::size_t k = chunk_start_[chunk]; k < chunk_start_[chunk + 1]; ++k) {
        const std::uint32_t i = idx_i_[k], j = idx_j_[k];
        const double R = coeff_[k] * g[i] * g[j];
        dgdt[i] -= R * inv_w_[i];
        dgdt[j] -= R * inv_w_[j];
        dgdt[birth_lo_[k]] += R * gain_lo_[k];
        dgdt[birth_hi_[k]] += R * gain_hi_[k];
        lr += R * loss_volume_[k];
    }
    loss_rate += lr;
}

void PairTable::rhs(std::span<const double> g, std::span<double> dgdt, double& loss_rate,
                    int threads) const {
    const std::size_t N = cells_, C = chunk_count_, stride = N + 1;
    // plain local so worker threads share it; thread_local would hand each
    // worker its own empty buffer
    std::vector<double> scratch(C * stride, 0.0);

    auto work_chunk = [&](std::size_t c) {
        std::span<double> buf(scratch.data() + c * stride, N);
        double lr = 0.0;
        rhs_chunk(g, c, buf, lr);
        scratch[c * stride + N] = lr;
    };

    if (threads <= 1) {
        for (std::size_t c = 0; c < C; ++c) work_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto drain = [&] {
            for (std::size_t c = next.fetch_add(1); c < C; c = next.fetch_add(1)) work_chunk(c);
        };
        std::vector<std::thread> pool;
        int extra = std::min<int>(threads, static_cast<int>(C)) - 1;
        pool.reserve(static_cast<std::size_t>(extra));
        for (int t = 0; t < extra; ++t) pool.emplace_back(drain);
        drain();
        for (auto& th : pool) th.join();
    }

    // merge in fixed chunk order; independent of scheduling above
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < C; ++c) acc += scratch[c * stride + i];
        dgdt[i] = acc;
    }
    double lacc = 0.0;
    for (std::size_t c = 0; c < C; ++c) lacc += scratch[c * stride + N];
    loss_rate = lacc;
}

namespace {

struct Integrator {
    const PairTable& table;
    int threads;
    std::size_t N;
    std::vector<double> k1, k2, k3, k4, k5, k6, tmp, proposal;
    double lk1 = 0, lk2 = 0, lk3 = 0, lk4 = 0, lk5 = 0, lk6 = 0;

    Integrator(const PairTable& pt, int th)
        : table(pt), threads(th), N(pt.cells()),
          k1(N), k2(N), k3(N), k4(N), k5(N), k6(N), tmp(N), proposal(N) {}

    static bool admissible(const std::vector<double>& g) {
        for (double v : g)
            if (!(v >= 0.0) || !std::isfinite(v)) return false;
        return true;
    }

    void axpy(const std::vector<double>& g, double a, const std::vector<double>& k) {
        for (std::size_t i = 0; i < N; ++i) tmp[i] = g[i] + a * k[i];
    }

    // classic RK4 over [t, t+dt]; returns false when the result leaves the
    // admissible cone (caller halves the step)
    bool rk4_step(std::vector<double>& g, double& loss, double dt) {
        table.rhs(g, k1, lk1, threads);
        axpy(g, 0.5 * dt, k1);
        table.rhs(tmp, k2, lk2, threads);
        axpy(g, 0.5 * dt, k2);
        table.rhs(tmp, k3, lk3, threads);
        axpy(g, dt, k3);
        table.rhs(tmp, k4, lk4, threads);
        for (std::size_t i = 0; i < N; ++i)
            proposal[i] = g[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!admissible(proposal)) return false;
        g = proposal;
        loss += dt / 6.0 * (lk1 + 2.0 * lk2 + 2.0 * lk3 + lk4);
        return true;
    }

    // substructured fixed step: halve on failure, keep the macro step length
    void rk4_macro_step(std::vector<double>& g, double& loss, double dt, double dt_min,
                        double t) {
        if (rk4_step(g, loss, dt)) return;
        if (dt * 0.5 < dt_min)
            throw std::runtime_error("stiffness: rk4 step underflow below dt_min near t = " +
                                     std::to_string(t));
        rk4_macro_step(g, loss, 0.5 * dt, dt_min, t);
        rk4_macro_step(g, loss, 0.5 * dt, dt_min, t + 0.5 * dt);
    }

    // Fehlberg 4(5) embedded pair; advances with the 5th-order solution.
    // Returns the error ratio (<= 1 accepted) or +inf on inadmissible states.
    double rkf45_attempt(const std::vector<double>& g, double loss, double dt,
                         double rel_tol, std::vector<double>& out, double& loss_out) {
        table.rhs(g, k1, lk1, threads);
        axpy(g, dt * (1.0 / 4.0), k1);
        table.rhs(tmp, k2, lk2, threads);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = g[i] + dt * (3.0 / 32.0 * k1[i] + 9.0 / 32.0 * k2[i]);
        table.rhs(tmp, k3, lk3, threads);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = g[i] + dt * (1932.0 / 2197.0 * k1[i] - 7200.0 / 2197.0 * k2[i] +
                                  7296.0 / 2197.0 * k3[i]);
        table.rhs(tmp, k4, lk4, threads);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = g[i] + dt * (439.0 / 216.0 * k1[i] - 8.0 * k2[i] +
                                  3680.0 / 513.0 * k3[i] - 845.0 / 4104.0 * k4[i]);
        table.rhs(tmp, k5, lk5, threads);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = g[i] + dt * (-8.0 / 27.0 * k1[i] + 2.0 * k2[i] - 3544.0 / 2565.0 * k3[i] +
                                  1859.0 / 4104.0 * k4[i] - 11.0 / 40.0 * k5[i]);
        table.rhs(tmp, k6, lk6, threads);

        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        double ratio = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double y5 = g[i] + dt * (16.0 / 135.0 * k1[i] + 6656.0 / 12825.0 * k3[i] +
                                     28561.0 / 56430.0 * k4[i] - 9.0 / 50.0 * k5[i] +
                                     2.0 / 55.0 * k6[i]);
            double y4 = g[i] + dt * (25.0 / 216.0 * k1[i] + 1408.0 / 2565.0 * k3[i] +
                                     2197.0 / 4104.0 * k4[i] - 1.0 / 5.0 * k5[i]);
            out[i] = y5;
            double tol = rel_tol * std::max(std::abs(g[i]), 1e-12 * gmax);
            if (tol > 0.0) ratio = std::max(ratio, std::abs(y5 - y4) / tol);
        }
        if (!admissible(out)) return std::numeric_limits<double>::infinity();
        loss_out = loss + dt * (16.0 / 135.0 * lk1 + 6656.0 / 12825.0 * lk3 +
                                28561.0 / 56430.0 * lk4 - 9.0 / 50.0 * lk5 + 2.0 / 55.0 * lk6);
        return ratio;
    }
};

double default_dt(const PairTable& table, const std::vector<double>& g0, double horizon,
                  int threads) {
    std::vector<double> dg(g0.size());
    double lr = 0.0;
    table.rhs(g0, dg, lr, threads);
    double gmax = 0.0;
    for (double v : g0) gmax = std::max(gmax, v);
    double max_rate = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i)
        if (g0[i] > 1e-12 * gmax) max_rate = std::max(max_rate, std::abs(dg[i]) / g0[i]);
    if (max_rate <= 0.0) return horizon;
    return std::min(horizon, 0.1 / max_rate);
}

}  // namespace

Trajectory run(const RunConfig& config) {
    if (!(config.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(config.trunc.n > 1.0)) throw std::invalid_argument("truncation level n must exceed 1");
    if (config.trunc.theta != 0 && config.trunc.theta != 1)
        throw std::invalid_argument("theta must be 0 or 1");
    if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");

    auto grid = Grid::geometric(config.grid.min_volume, config.grid.max_volume,
                                config.grid.cells);
    if (grid->min_volume() > 1.0 / config.trunc.n || grid->max_volume() < config.trunc.n)
        throw std::invalid_argument(
            "grid support must cover [1/n, n] for the chosen truncation level");

    DistributionState state0 = project_initial(config.initial, grid);
    const double beta = config.kernel.beta();

    Trajectory traj;
    traj.grid = grid;
    traj.kernel = config.kernel;
    traj.trunc = config.trunc;
    traj.config_hash = config.config_hash;
    traj.initial_mass_outside_grid =
        config.initial.mass_integral(0.0, grid->min_volume()) +
        config.initial.mass_integral(grid->max_volume(),
                                     std::numeric_limits<double>::infinity());
    traj.singular_norm_warning = !config.initial.singular_moment_finite(2.0 * beta);

    PairTable table(*grid, config.kernel, config.trunc);

    const std::size_t N = grid->cells();
    const auto& x = grid->pivots();
    const auto& w = grid->widths();
    std::array<std::vector<double>, 5> mw;  // moment weights -2b, -b, 0, 1, 2
    const double orders[5] = {-2.0 * beta, -beta, 0.0, 1.0, 2.0};
    for (int m = 0; m < 5; ++m) {
        mw[m].resize(N);
        for (std::size_t i = 0; i < N; ++i) mw[m][i] = std::pow(x[i], orders[m]) * w[i];
    }
    auto record_moments = [&](double t, const std::vector<double>& g, double loss) {
        MomentRow row;
        row.t = t;
        double acc[5];
        for (int m = 0; m < 5; ++m) {
            double a = 0.0;
            for (std::size_t i = 0; i < N; ++i) a += mw[m][i] * g[i];
            acc[m] = a;
        }
        row.m_neg2b = acc[0];
        row.m_negb = acc[1];
        row.m0 = acc[2];
        row.m1 = acc[3];
        row.m2 = acc[4];
        row.loss = loss;
        traj.moments.push_back(row);
    };
    auto record_snapshot = [&](double t, const std::vector<double>& g) {
        DistributionState s;
        s.grid = grid;
        s.time = t;
        s.values = g;
        traj.snapshots.push_back(std::move(s));
    };

    std::vector<double> g = state0.values;
    double loss = 0.0;
    Integrator integ(table, config.threads);

    record_moments(0.0, g, loss);
    record_snapshot(0.0, g);

    const double T = config.horizon;

    if (config.time.method == TimePolicy::Method::rk4) {
        double dt = config.time.dt > 0.0 ? config.time.dt
                                         : default_dt(table, g, T, config.threads);
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("fixed time step must be positive and finite");
        traj.dt_initial = dt;
        double dt_min = dt * config.time.dt_min_factor;

        std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
        if (steps == 0) steps = 1;
        std::size_t stride = config.snapshots.stride;
        if (stride == 0 && config.snapshots.times.empty())
            stride = std::max<std::size_t>(1, (steps + 49) / 50);
        // explicit times map to the nearest step
        std::vector<bool> snap_mark(steps + 1, false);
        for (double tau : config.snapshots.times) {
            if (!(tau >= 0.0) || tau > T * (1.0 + 1e-12)) continue;
            auto s = static_cast<std::size_t>(std::llround(tau / dt));
            snap_mark[std::min(s, steps)] = true;
        }

        for (std::size_t s = 1; s <= steps; ++s) {
            double t0 = (s - 1) * dt;
            double t1 = s == steps ? T : s * dt;
            integ.rk4_macro_step(g, loss, t1 - t0, dt_min, t0);
            record_moments(t1, g, loss);
            bool snap = config.snapshots.times.empty() ? (s % stride) == 0 : snap_mark[s];
            if (s == steps)
                record_snapshot(T, g);
            else if (snap)
                record_snapshot(t1, g);
        }
    } else {
        double rel_tol = config.time.rel_tol;
        if (!(rel_tol > 0.0)) throw std::invalid_argument("rkf45 needs rel_tol > 0");
        double dt = config.time.dt > 0.0 ? config.time.dt
                                         : default_dt(table, g, T, config.threads);
        traj.dt_initial = dt;
        double dt_min = dt * config.time.dt_min_factor;

        std::vector<double> targets = config.snapshots.times;
        if (targets.empty()) {
            constexpr std::size_t count = 50;  // stride is a fixed-step notion
            for (std::size_t k = 1; k <= count; ++k)
                targets.push_back(T * static_cast<double>(k) / static_cast<double>(count));
        }
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        targets.erase(std::remove_if(targets.begin(), targets.end(),
                                     [&](double v) { return !(v > 0.0) || v > T + 1e-12; }),
                      targets.end());
        if (targets.empty() || std::abs(targets.back() - T) > 1e-12 * std::max(1.0, T))
            targets.push_back(T);

        double t = 0.0;
        std::size_t next_target = 0;
        std::vector<double> out(N);
        double loss_out = 0.0;
        while (t < T) {
            double target = targets[next_target];
            bool clipped = t + dt >= target - 1e-14 * std::max(1.0, target);
            double h = clipped ? target - t : dt;
            double ratio = integ.rkf45_attempt(g, loss, h, rel_tol, out, loss_out);
            if (ratio <= 1.0) {
                g = out;
                loss = loss_out;
                t = clipped ? target : t + h;
                record_moments(t, g, loss);
                if (clipped) {
                    record_snapshot(t, g);
                    ++next_target;
                }
                double grow = std::isfinite(ratio) && ratio > 0.0
                                  ? 0.9 * std::pow(ratio, -0.2)
                                  : 5.0;
                dt = h * std::clamp(grow, 0.2, 5.0);
            } else {
                double shrink = std::isfinite(ratio) ? std::clamp(0.9 * std::pow(ratio, -0.2),
                                                                  0.1, 0.9)
                                                     : 0.5;
                dt = h * shrink;
                if (dt < dt_min)
                    throw std::runtime_error(
                        "stiffness: rkf45 step underflow below dt_min near t = " +
                        std::to_string(t));
            }
        }
    }

    return traj;
}

Trajectory reference_run(const RunConfig& config, int refinement) {
    if (refinement < 1) throw std::invalid_argument("refinement factor must be >= 1");
    RunConfig refined = config;
    refined.grid.cells = config.grid.cells * static_cast<std::size_t>(refinement);
    if (config.time.dt > 0.0) refined.time.dt = config.time.dt / refinement;
    return run(refined);
}

}  // namespace coag
