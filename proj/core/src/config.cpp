#include "coag/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coag/io.hpp"

namespace coag {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& origin) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(origin, std::string("missing key '") + key + "'");
    return *it;
}

double as_number(const json& v, const char* key, const std::string& origin) {
    if (!v.is_number()) fail(origin, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

long as_integer(const json& v, const char* key, const std::string& origin) {
    if (!v.is_number_integer()) fail(origin, std::string("'") + key + "' must be an integer");
    return v.get<long>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& origin, const char* where) {
    for (const auto& el : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (el.key() == a) { known = true; break; }
        if (!known)
            fail(origin, std::string("unknown key '") + el.key() + "' in " + where);
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    reject_unknown(root,
                   {"kernel", "truncation", "grid", "initial", "horizon", "time", "snapshots",
                    "threads"},
                   origin, "config");

    RunConfig cfg;
    try {
        const json& jk = require(root, "kernel", origin);
        if (!jk.is_object()) fail(origin, "'kernel' must be an object");
        reject_unknown(jk, {"name", "params"}, origin, "kernel");
        const json& jname = require(jk, "name", origin);
        if (!jname.is_string()) fail(origin, "'kernel.name' must be a string");
        std::map<std::string, double> params;
        if (jk.contains("params")) {
            if (!jk["params"].is_object()) fail(origin, "'kernel.params' must be an object");
            for (const auto& el : jk["params"].items())
                params[el.key()] = as_number(el.value(), el.key().c_str(), origin);
        }
        cfg.kernel = Kernel::from_config(jname.get<std::string>(), params);

        const json& jt = require(root, "truncation", origin);
        if (!jt.is_object()) fail(origin, "'truncation' must be an object");
        reject_unknown(jt, {"n", "theta"}, origin, "truncation");
        cfg.trunc.n = as_number(require(jt, "n", origin), "truncation.n", origin);
        if (!(cfg.trunc.n > 1.0)) fail(origin, "'truncation.n' must exceed 1");
        if (jt.contains("theta")) {
            long theta = as_integer(jt["theta"], "truncation.theta", origin);
            if (theta != 0 && theta != 1) fail(origin, "'truncation.theta' must be 0 or 1");
            cfg.trunc.theta = static_cast<int>(theta);
        }

        const json& jg = require(root, "grid", origin);
        if (!jg.is_object()) fail(origin, "'grid' must be an object");
        reject_unknown(jg, {"min_volume", "max_volume", "cells"}, origin, "grid");
        cfg.grid.min_volume = as_number(require(jg, "min_volume", origin), "grid.min_volume", origin);
        cfg.grid.max_volume = as_number(require(jg, "max_volume", origin), "grid.max_volume", origin);
        long cells = as_integer(require(jg, "cells", origin), "grid.cells", origin);
        if (cells < 2) fail(origin, "'grid.cells' must be at least 2");
        cfg.grid.cells = static_cast<std::size_t>(cells);

        const json& ji = require(root, "initial", origin);
        if (!ji.is_object()) fail(origin, "'initial' must be an object");
        const json& jtype = require(ji, "type", origin);
        if (!jtype.is_string()) fail(origin, "'initial.type' must be a string");
        std::string type = jtype.get<std::string>();
        if (type == "exponential") {
            reject_unknown(ji, {"type", "amplitude", "rate"}, origin, "initial");
            double amp = ji.contains("amplitude")
                             ? as_number(ji["amplitude"], "initial.amplitude", origin)
                             : 1.0;
            double rate = ji.contains("rate") ? as_number(ji["rate"], "initial.rate", origin)
                                              : 1.0;
            cfg.initial = InitialDensity::exponential(amp, rate);
        } else if (type == "constant") {
            reject_unknown(ji, {"type", "value"}, origin, "initial");
            cfg.initial = InitialDensity::constant(
                as_number(require(ji, "value", origin), "initial.value", origin));
        } else if (type == "tabulated") {
            reject_unknown(ji, {"type", "samples"}, origin, "initial");
            const json& js = require(ji, "samples", origin);
            if (!js.is_array() || js.size() < 2)
                fail(origin, "'initial.samples' must be an array of at least two [z, g] pairs");
            std::vector<std::pair<double, double>> samples;
            for (const auto& row : js) {
                if (!row.is_array() || row.size() != 2)
                    fail(origin, "'initial.samples' entries must be [z, g] pairs");
                samples.emplace_back(as_number(row[0], "sample z", origin),
                                     as_number(row[1], "sample g", origin));
            }
            cfg.initial = InitialDensity::tabulated(std::move(samples));
        } else {
            fail(origin, "'initial.type' must be exponential, constant or tabulated");
        }

        cfg.horizon = as_number(require(root, "horizon", origin), "horizon", origin);
        if (!(cfg.horizon > 0.0)) fail(origin, "'horizon' must be positive");

        if (root.contains("time")) {
            const json& jm = root["time"];
            if (!jm.is_object()) fail(origin, "'time' must be an object");
            reject_unknown(jm, {"method", "dt", "rel_tol", "dt_min_factor"}, origin, "time");
            if (jm.contains("method")) {
                if (!jm["method"].is_string()) fail(origin, "'time.method' must be a string");
                std::string m = jm["method"].get<std::string>();
                if (m == "rk4") cfg.time.method = TimePolicy::Method::rk4;
                else if (m == "rkf45") cfg.time.method = TimePolicy::Method::rkf45;
                else fail(origin, "'time.method' must be rk4 or rkf45");
            }
            if (jm.contains("dt")) {
                cfg.time.dt = as_number(jm["dt"], "time.dt", origin);
                if (cfg.time.dt < 0.0) fail(origin, "'time.dt' must be >= 0");
            }
            if (jm.contains("rel_tol")) {
                cfg.time.rel_tol = as_number(jm["rel_tol"], "time.rel_tol", origin);
                if (!(cfg.time.rel_tol > 0.0)) fail(origin, "'time.rel_tol' must be positive");
            }
            if (jm.contains("dt_min_factor")) {
                cfg.time.dt_min_factor =
                    as_number(jm["dt_min_factor"], "time.dt_min_factor", origin);
                if (!(cfg.time.dt_min_factor > 0.0) || cfg.time.dt_min_factor >= 1.0)
                    fail(origin, "'time.dt_min_factor' must lie in (0, 1)");
            }
        }

        if (root.contains("snapshots")) {
            const json& js = root["snapshots"];
            if (!js.is_object()) fail(origin, "'snapshots' must be an object");
            reject_unknown(js, {"stride", "times"}, origin, "snapshots");
            if (js.contains("stride")) {
                long stride = as_integer(js["stride"], "snapshots.stride", origin);
                if (stride < 0) fail(origin, "'snapshots.stride' must be >= 0");
                cfg.snapshots.stride = static_cast<std::size_t>(stride);
            }
            if (js.contains("times")) {
                if (!js["times"].is_array()) fail(origin, "'snapshots.times' must be an array");
                for (const auto& v : js["times"]) {
                    double tau = as_number(v, "snapshot time", origin);
                    if (tau < 0.0 || tau > cfg.horizon)
                        fail(origin, "snapshot times must lie in [0, horizon]");
                    cfg.snapshots.times.push_back(tau);
                }
            }
        }

        if (root.contains("threads")) {
            long threads = as_integer(root["threads"], "threads", origin);
            if (threads < 1) fail(origin, "'threads' must be >= 1");
            cfg.threads = static_cast<int>(threads);
        }
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }

    cfg.config_hash = config_fingerprint(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_fingerprint(const RunConfig& config) {
    // canonical form: fixed key order, map-sorted kernel params, %.17g numbers;
    // thread count is excluded, it never changes the mathematical problem
    std::string s = "kernel=" + config.kernel.name();
    for (const auto& [key, value] : config.kernel.params())
        s += "," + key + "=" + format_double(value);
    s += ";n=" + format_double(config.trunc.n);
    s += ";theta=" + std::to_string(config.trunc.theta);
    s += ";grid=" + format_double(config.grid.min_volume) + "," +
         format_double(config.grid.max_volume) + "," + std::to_string(config.grid.cells);
    s += ";initial=";
    switch (config.initial.kind()) {
        case InitialDensity::Kind::exponential:
            s += "exponential," + format_double(config.initial.amplitude()) + "," +
                 format_double(config.initial.rate());
            break;
        case InitialDensity::Kind::constant:
            s += "constant," + format_double(config.initial.amplitude());
            break;
        case InitialDensity::Kind::tabulated:
            s += "tabulated";
            for (const auto& [z, g] : config.initial.samples())
                s += "," + format_double(z) + ":" + format_double(g);
            break;
    }
    s += ";horizon=" + format_double(config.horizon);
    s += ";method=";
    s += config.time.method == TimePolicy::Method::rk4 ? "rk4" : "rkf45";
    s += ";dt=" + format_double(config.time.dt);
    s += ";rel_tol=" + format_double(config.time.rel_tol);
    s += ";dt_min_factor=" + format_double(config.time.dt_min_factor);
    s += ";stride=" + std::to_string(config.snapshots.stride);
    s += ";times=";
    for (double tau : config.snapshots.times) s += format_double(tau) + ",";

    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace coag
