#include "coag/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coag {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    return in;
}

std::vector<double> split_doubles(const std::string& line, std::size_t expect,
                                  const std::string& path) {
    std::vector<double> out;
    const char* p = line.c_str();
    while (*p != '\0') {
        char* end = nullptr;
        out.push_back(std::strtod(p, &end));
        if (end == p) throw std::runtime_error(path + ": malformed number in '" + line + "'");
        p = end;
        if (*p == ',') ++p;
        else if (*p != '\0') throw std::runtime_error(path + ": malformed row '" + line + "'");
    }
    if (out.size() != expect)
        throw std::runtime_error(path + ": expected " + std::to_string(expect) +
                                 " columns, got " + std::to_string(out.size()));
    return out;
}

}  // namespace

void write_moments_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,m_neg2b,m_negb,m0,m1,m2,loss\n";
    for (const auto& r : traj.moments)
        out << format_double(r.t) << ',' << format_double(r.m_neg2b) << ','
            << format_double(r.m_negb) << ',' << format_double(r.m0) << ','
            << format_double(r.m1) << ',' << format_double(r.m2) << ','
            << format_double(r.loss) << '\n';
}

void write_snapshots_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "time,zeta_pivot,g\n";
    const auto& x = traj.grid->pivots();
    for (const auto& st : traj.snapshots)
        for (std::size_t i = 0; i < st.values.size(); ++i)
            out << format_double(st.time) << ',' << format_double(x[i]) << ','
                << format_double(st.values[i]) << '\n';
}

Trajectory load_trajectory(const std::string& dir) {
    nlohmann::json report;
    {
        std::ifstream in = open_in(dir + "/report.json");
        try {
            in >> report;
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(dir + "/report.json: " + e.what());
        }
    }

    Trajectory traj;
    try {
        std::map<std::string, double> params;
        for (const auto& el : report.at("kernel").at("params").items())
            params[el.key()] = el.value().get<double>();
        traj.kernel =
            Kernel::from_config(report.at("kernel").at("name").get<std::string>(), params);
        traj.trunc.n = report.at("truncation").at("n").get<double>();
        traj.trunc.theta = report.at("truncation").at("theta").get<int>();
        traj.grid = Grid::geometric(report.at("grid").at("min_volume").get<double>(),
                                    report.at("grid").at("max_volume").get<double>(),
                                    report.at("grid").at("cells").get<std::size_t>());
        traj.dt_initial = report.at("dt_initial").get<double>();
        traj.initial_mass_outside_grid = report.at("initial_mass_outside_grid").get<double>();
        traj.singular_norm_warning = report.at("singular_norm_warning").get<bool>();
        traj.config_hash = report.at("config_hash").get<std::string>();
    } catch (const std::exception& e) {
        throw std::runtime_error(dir + "/report.json: " + e.what());
    }

    {
        std::ifstream in = open_in(dir + "/moments.csv");
        std::string line;
        if (!std::getline(in, line) || line != "t,m_neg2b,m_negb,m0,m1,m2,loss")
            throw std::runtime_error(dir + "/moments.csv: unexpected header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto v = split_doubles(line, 7, dir + "/moments.csv");
            traj.moments.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
        }
        if (traj.moments.empty())
            throw std::runtime_error(dir + "/moments.csv: no rows");
    }

    {
        std::ifstream in = open_in(dir + "/snapshots.csv");
        std::string line;
        if (!std::getline(in, line) || line != "time,zeta_pivot,g")
            throw std::runtime_error(dir + "/snapshots.csv: unexpected header");
        const auto& x = traj.grid->pivots();
        const std::size_t N = x.size();
        DistributionState st;
        st.grid = traj.grid;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto v = split_doubles(line, 3, dir + "/snapshots.csv");
            std::size_t i = st.values.size();
            if (i == 0) st.time = v[0];
            else if (v[0] != st.time)
                throw std::runtime_error(dir + "/snapshots.csv: snapshot at t = " +
                                         format_double(st.time) + " is incomplete");
            if (i >= N || v[1] != x[i])
                throw std::runtime_error(dir + "/snapshots.csv: pivot mismatch at t = " +
                                         format_double(v[0]));
            st.values.push_back(v[2]);
            if (st.values.size() == N) {
                traj.snapshots.push_back(st);
                st.values.clear();
            }
        }
        if (!st.values.empty())
            throw std::runtime_error(dir + "/snapshots.csv: trailing partial snapshot");
        if (traj.snapshots.empty())
            throw std::runtime_error(dir + "/snapshots.csv: no snapshots");
    }
    return traj;
}

}  // namespace coag
