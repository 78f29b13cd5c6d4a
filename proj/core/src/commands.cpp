#include "coag/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "coag/config.hpp"
#include "coag/io.hpp"
#include "coag/oracle.hpp"
#include "coag/solver.hpp"

namespace coag {

namespace {

using nlohmann::json;

json report_json(const Trajectory& traj, const RunConfig& cfg, int threads) {
    json j;
    j["config_hash"] = traj.config_hash;
    j["kernel"]["name"] = cfg.kernel.name();
    j["kernel"]["params"] = json::object();
    for (const auto& [key, value] : cfg.kernel.params()) j["kernel"]["params"][key] = value;
    j["kernel"]["beta"] = cfg.kernel.beta();
    j["kernel"]["k_bound"] = cfg.kernel.k_bound();
    j["kernel"]["satisfies_growth"] = cfg.kernel.satisfies_growth();
    j["truncation"]["n"] = cfg.trunc.n;
    j["truncation"]["theta"] = cfg.trunc.theta;
    j["grid"]["min_volume"] = cfg.grid.min_volume;
    j["grid"]["max_volume"] = cfg.grid.max_volume;
    j["grid"]["cells"] = cfg.grid.cells;
    j["grid"]["ratio"] = traj.grid->ratio();
    j["horizon"] = cfg.horizon;
    j["threads"] = threads;
    j["dt_initial"] = traj.dt_initial;
    j["steps"] = traj.moments.size() - 1;
    j["snapshot_count"] = traj.snapshots.size();
    j["initial_mass_outside_grid"] = traj.initial_mass_outside_grid;
    j["singular_norm_warning"] = traj.singular_norm_warning;

    const auto& first = traj.moments.front();
    const auto& last = traj.moments.back();
    double drift = last.m1 + last.loss - first.m1;
    j["mass_ledger"]["initial_m1"] = first.m1;
    j["mass_ledger"]["final_m1"] = last.m1;
    j["mass_ledger"]["final_loss"] = last.loss;
    j["mass_ledger"]["drift"] = drift;
    j["mass_ledger"]["drift_rel"] = std::abs(drift) / std::max(first.m1, 1e-300);
    return j;
}

void write_bundle(const Trajectory& traj, const RunConfig& cfg, int threads,
                  const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_moments_csv(traj, dir + "/moments.csv");
    write_snapshots_csv(traj, dir + "/snapshots.csv");
    std::ofstream out(dir + "/report.json", std::ios::binary);
    if (!out) throw std::runtime_error(dir + "/report.json: cannot open for writing");
    out << report_json(traj, cfg, threads).dump(2) << '\n';
}

int resolve_threads(int requested, const RunConfig& cfg) {
    return requested > 0 ? requested : cfg.threads;
}

double nan_aware_max(double acc, double v) {
    if (std::isnan(v)) return acc;
    return std::isnan(acc) ? v : std::max(acc, v);
}

}  // namespace

int threads_from_env() {
    const char* env = std::getenv("COAG_THREADS");
    if (env == nullptr) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<int>(v);
}

int run_command(const std::string& config_path, const std::string& out_dir, int threads) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    cfg.threads = resolve_threads(threads, cfg);

    Trajectory traj;
    try {
        traj = run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical_error;
    }
    write_bundle(traj, cfg, cfg.threads, out_dir);

    const auto& first = traj.moments.front();
    const auto& last = traj.moments.back();
    std::cout << "run " << traj.config_hash << ": kernel=" << cfg.kernel.name()
              << " n=" << format_double(cfg.trunc.n) << " theta=" << cfg.trunc.theta
              << " cells=" << cfg.grid.cells << " horizon=" << format_double(cfg.horizon)
              << '\n';
    std::cout << "steps=" << traj.moments.size() - 1 << " snapshots=" << traj.snapshots.size()
              << " dt_initial=" << format_double(traj.dt_initial) << '\n';
    std::cout << "mass: initial=" << format_double(first.m1)
              << " final+loss=" << format_double(last.m1 + last.loss)
              << " drift=" << format_double(last.m1 + last.loss - first.m1) << '\n';
    if (traj.initial_mass_outside_grid > 0.0)
        std::cout << "note: initial mass outside grid = "
                  << format_double(traj.initial_mass_outside_grid) << '\n';
    if (traj.singular_norm_warning)
        std::cout << "warning: z^-2beta moment of the initial data diverges near 0\n";
    std::cout << "wrote " << out_dir << "/{moments.csv,snapshots.csv,report.json}\n";
    return exit_ok;
}

int study_command(const std::string& config_path, const std::vector<double>& n_values,
                  const std::string& out_dir, int threads) {
    RunConfig base;
    try {
        base = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    if (n_values.empty()) {
        std::cerr << "config error: study needs at least one truncation level\n";
        return exit_config_error;
    }
    for (double n : n_values)
        if (!(n > 1.0)) {
            std::cerr << "config error: truncation levels must exceed 1\n";
            return exit_config_error;
        }
    int eff_threads = resolve_threads(threads, base);

    struct Row {
        double n;
        int theta;
        std::string hash;
        std::size_t steps;
        MomentRow final;
        double drift_rel;
        double l1_to_finest;
        double wall_ms;
        Trajectory traj;
    };
    std::vector<Row> rows;
    std::filesystem::create_directories(out_dir);

    for (double n : n_values) {
        for (int theta : {1, 0}) {
            RunConfig cfg = base;
            cfg.trunc.n = n;
            cfg.trunc.theta = theta;
            cfg.threads = eff_threads;
            cfg.config_hash = config_fingerprint(cfg);

            auto t0 = std::chrono::steady_clock::now();
            Trajectory traj;
            try {
                traj = run(cfg);
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error (n=" << format_double(n) << " theta=" << theta
                          << "): " << e.what() << '\n';
                return exit_config_error;
            } catch (const std::runtime_error& e) {
                std::cerr << "numerical error (n=" << format_double(n) << " theta=" << theta
                          << "): " << e.what() << '\n';
                return exit_numerical_error;
            }
            auto t1 = std::chrono::steady_clock::now();

            Row row;
            row.n = n;
            row.theta = theta;
            row.hash = traj.config_hash;
            row.steps = traj.moments.size() - 1;
            row.final = traj.moments.back();
            double m1_0 = traj.moments.front().m1;
            row.drift_rel = std::abs(row.final.m1 + row.final.loss - m1_0) /
                            std::max(m1_0, 1e-300);
            row.l1_to_finest = 0.0;
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            row.traj = std::move(traj);

            std::string sub = out_dir + "/n" + format_double(n) + "_theta" +
                              std::to_string(theta);
            write_bundle(row.traj, cfg, eff_threads, sub);
            rows.push_back(std::move(row));
        }
    }

    // distance of each final state to the finest-n run with matching theta
    for (int theta : {1, 0}) {
        const Row* finest = nullptr;
        for (const auto& r : rows)
            if (r.theta == theta && (finest == nullptr || r.n > finest->n)) finest = &r;
        if (finest == nullptr) continue;
        for (auto& r : rows)
            if (r.theta == theta)
                r.l1_to_finest =
                    l1_distance(r.traj.final_state(), finest->traj.final_state());
    }

    {
        std::ofstream csv(out_dir + "/study.csv", std::ios::binary);
        csv << "n,theta,config_hash,steps,final_m0,final_m1,final_m2,final_loss,"
               "mass_drift_rel,l1_to_finest\n";
        for (const auto& r : rows)
            csv << format_double(r.n) << ',' << r.theta << ',' << r.hash << ',' << r.steps
                << ',' << format_double(r.final.m0) << ',' << format_double(r.final.m1) << ','
                << format_double(r.final.m2) << ',' << format_double(r.final.loss) << ','
                << format_double(r.drift_rel) << ',' << format_double(r.l1_to_finest) << '\n';
    }
    {
        json j;
        j["base_config_hash"] = base.config_hash;
        j["n_values"] = n_values;
        j["rows"] = json::array();
        for (const auto& r : rows) {
            json row;
            row["n"] = r.n;
            row["theta"] = r.theta;
            row["config_hash"] = r.hash;
            row["steps"] = r.steps;
            row["final_m0"] = r.final.m0;
            row["final_m1"] = r.final.m1;
            row["final_m2"] = r.final.m2;
            row["final_loss"] = r.final.loss;
            row["mass_drift_rel"] = r.drift_rel;
            row["l1_to_finest"] = r.l1_to_finest;
            j["rows"].push_back(row);
        }
        std::ofstream out(out_dir + "/study.json", std::ios::binary);
        out << j.dump(2) << '\n';
    }

    std::cout << "n,theta,steps,final_m1,final_loss,mass_drift_rel,l1_to_finest,wall_ms\n";
    for (const auto& r : rows)
        std::cout << format_double(r.n) << ',' << r.theta << ',' << r.steps << ','
                  << format_double(r.final.m1) << ',' << format_double(r.final.loss) << ','
                  << format_double(r.drift_rel) << ',' << format_double(r.l1_to_finest) << ','
                  << r.wall_ms << '\n';
    std::cout << "wrote " << out_dir << "/{study.csv,study.json} and per-run bundles\n";
    return exit_ok;
}

int compare_command(const std::string& trajectory_dir, const std::string& oracle_spec,
                    const std::string& out_path) {
    Trajectory traj;
    try {
        traj = load_trajectory(trajectory_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    OracleComparison cmp;
    try {
        if (oracle_spec.rfind("dir:", 0) == 0) {
            Trajectory ref = load_trajectory(oracle_spec.substr(4));
            cmp = compare_trajectories(traj, ref);
        } else {
            cmp = compare_oracle(traj, oracle_spec);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "config error: " << out_path << ": cannot open for writing\n";
        return exit_config_error;
    }
    out << "t,l1_density_error,m0_rel_error,m1_rel_error,m2_rel_error\n";
    for (const auto& r : cmp.rows)
        out << format_double(r.t) << ',' << format_double(r.l1_density_error) << ','
            << format_double(r.m0_rel_error) << ',' << format_double(r.m1_rel_error) << ','
            << format_double(r.m2_rel_error) << '\n';

    double nan = std::nan("");
    double max_l1 = nan, max_m0 = nan, max_m1 = nan, max_m2 = nan;
    for (const auto& r : cmp.rows) {
        max_l1 = nan_aware_max(max_l1, r.l1_density_error);
        max_m0 = nan_aware_max(max_m0, r.m0_rel_error);
        max_m1 = nan_aware_max(max_m1, r.m1_rel_error);
        max_m2 = nan_aware_max(max_m2, r.m2_rel_error);
    }
    std::cout << "compare " << trajectory_dir << " vs " << cmp.oracle << ": rows="
              << cmp.rows.size() << " max_l1=" << format_double(max_l1)
              << " max_m0_rel=" << format_double(max_m0)
              << " max_m1_rel=" << format_double(max_m1)
              << " max_m2_rel=" << format_double(max_m2) << '\n';
    std::cout << "wrote " << out_path << '\n';
    return exit_ok;
}

int audit_kernel_command(const std::string& config_path, double sample_min, double sample_max,
                         int sample_points, const std::string& out_path) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    SampleSpec spec{sample_min, sample_max, sample_points};
    HypothesisReport rep;
    try {
        rep = verify_hypotheses(cfg.kernel, spec);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    bool pass = rep.symmetric && rep.nonnegative && rep.envelope_holds &&
                cfg.kernel.satisfies_growth();

    json j;
    j["kernel"]["name"] = cfg.kernel.name();
    j["kernel"]["params"] = json::object();
    for (const auto& [key, value] : cfg.kernel.params()) j["kernel"]["params"][key] = value;
    j["kernel"]["beta"] = cfg.kernel.beta();
    j["kernel"]["k_bound"] = cfg.kernel.k_bound();
    j["kernel"]["satisfies_growth"] = cfg.kernel.satisfies_growth();
    j["sample"]["min"] = spec.min;
    j["sample"]["max"] = spec.max;
    j["sample"]["points"] = spec.points;
    j["report"]["symmetric"] = rep.symmetric;
    j["report"]["nonnegative"] = rep.nonnegative;
    j["report"]["envelope_holds"] = rep.envelope_holds;
    j["report"]["minimal_sampled_k"] = rep.minimal_sampled_k;
    j["report"]["worst_pair"] = {rep.worst_pair[0], rep.worst_pair[1]};
    j["pass"] = pass;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "config error: " << out_path << ": cannot open for writing\n";
        return exit_config_error;
    }
    out << j.dump(2) << '\n';

    std::cout << "kernel " << cfg.kernel.name() << ": symmetric=" << (rep.symmetric ? "yes" : "no")
              << " nonnegative=" << (rep.nonnegative ? "yes" : "no")
              << " envelope=" << (rep.envelope_holds ? "yes" : "no")
              << " growth=" << (cfg.kernel.satisfies_growth() ? "yes" : "no")
              << " sampled_k=" << format_double(rep.minimal_sampled_k)
              << " declared_k=" << format_double(cfg.kernel.k_bound()) << '\n';
    std::cout << "kernel audit: " << (pass ? "PASS" : "FAIL") << '\n';
    std::cout << "wrote " << out_path << '\n';
    return pass ? exit_ok : exit_numerical_error;
}

}  // namespace coag
