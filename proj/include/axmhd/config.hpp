#pragma once

// Flat INI-style run configuration:
//   [section]
//   key = value        # trailing comments with '#' or ';'
// Unknown keys, duplicate keys, and type mismatches are errors carrying
// line numbers.  Cross-field invariants are validated after parsing.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "axmhd/expression.hpp"
#include "axmhd/grid.hpp"
#include "axmhd/interp.hpp"

namespace axmhd {

struct ConfigError : Error { using Error::Error; };

struct RunConfig {
    // [grid]
    int nr = 128, nz = 256;
    double r_max = 4.0, z_len = 8.0;

    // [params]
    double nu = 1.0;
    double cfl = 0.5;
    double dt_max = 0.02;
    std::string interp = "cubic";  // "cubic" | "linear"

    // [initial]
    std::string preset = "ring+gauss";  // zero|ring+gauss|gauss-pi|ns-ring|expr
    double pi_amp = 1.0;
    double omega_amp = 1.0;
    double width = 1.0;
    std::string pi_expr, omega_expr;
    std::uint64_t seed = 1234;

    // [run]
    double t_end = 0.0;  // must be set positive
    int diag_cadence = 1;
    int snapshot_cadence = 0;  // 0 disables mid-run snapshots
    std::string output_dir = "out";

    // [lp]
    int box_n = 64;            // 0 disables spectral diagnostics
    bool corrupt_bank = false;  // test hook: breaks the dyadic partition

    // [tolerances]
    double energy_rel = 0.02;
    double omega_interval_rel = 0.05;
    double cz_rel = 0.02;

    std::string echo;  // original text, carried into checkpoints

    Interp interp_mode() const {
        return interp == "linear" ? Interp::Linear : Interp::MonotoneCubic;
    }
};

namespace detail {

struct ConfigCursor {
    int line = 0;
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line) + ": " + what);
    }

    double num(const std::string& key, const std::string& val) const {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            fail("expected number for '" + key + "', got '" + val + "'");
        }
        if (used != val.size()) fail("expected number for '" + key + "', got '" + val + "'");
        return v;
    }

    int whole(const std::string& key, const std::string& val) const {
        double v = num(key, val);
        int i = int(v);
        if (double(i) != v) fail("expected integer for '" + key + "', got '" + val + "'");
        return i;
    }

    bool flag(const std::string& key, const std::string& val) const {
        if (val == "true" || val == "1") return true;
        if (val == "false" || val == "0") return false;
        fail("expected true/false for '" + key + "', got '" + val + "'");
    }
};

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.echo = text;
    std::map<std::string, int> seen;  // "section.key" -> first line
    detail::ConfigCursor cur;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++cur.line;
        std::string line = raw;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') cur.fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "params" && section != "initial" &&
                section != "run" && section != "lp" && section != "tolerances")
                cur.fail("unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) cur.fail("expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) cur.fail("empty key");
        if (section.empty()) cur.fail("key '" + key + "' outside any section");

        std::string full = section + "." + key;
        auto [it, fresh] = seen.emplace(full, cur.line);
        if (!fresh)
            cur.fail("duplicate key '" + key + "' in [" + section + "] (first set at line " +
                      std::to_string(it->second) + ")");

        if (full == "grid.nr") cfg.nr = cur.whole(key, val);
        else if (full == "grid.nz") cfg.nz = cur.whole(key, val);
        else if (full == "grid.r_max") cfg.r_max = cur.num(key, val);
        else if (full == "grid.z_len") cfg.z_len = cur.num(key, val);
        else if (full == "params.nu") cfg.nu = cur.num(key, val);
        else if (full == "params.cfl") cfg.cfl = cur.num(key, val);
        else if (full == "params.dt_max") cfg.dt_max = cur.num(key, val);
        else if (full == "params.interp") cfg.interp = val;
        else if (full == "initial.preset") cfg.preset = val;
        else if (full == "initial.pi_amp") cfg.pi_amp = cur.num(key, val);
        else if (full == "initial.omega_amp") cfg.omega_amp = cur.num(key, val);
        else if (full == "initial.width") cfg.width = cur.num(key, val);
        else if (full == "initial.pi_expr") cfg.pi_expr = val;
        else if (full == "initial.omega_expr") cfg.omega_expr = val;
        else if (full == "initial.seed") cfg.seed = std::uint64_t(cur.whole(key, val));
        else if (full == "run.t_end") cfg.t_end = cur.num(key, val);
        else if (full == "run.diag_cadence") cfg.diag_cadence = cur.whole(key, val);
        else if (full == "run.snapshot_cadence") cfg.snapshot_cadence = cur.whole(key, val);
        else if (full == "run.output_dir") cfg.output_dir = val;
        else if (full == "lp.box_n") cfg.box_n = cur.whole(key, val);
        else if (full == "lp.corrupt_bank") cfg.corrupt_bank = cur.flag(key, val);
        else if (full == "tolerances.energy_rel") cfg.energy_rel = cur.num(key, val);
        else if (full == "tolerances.omega_interval_rel")
            cfg.omega_interval_rel = cur.num(key, val);
        else if (full == "tolerances.cz_rel") cfg.cz_rel = cur.num(key, val);
        else cur.fail("unknown key '" + key + "' in [" + section + "]");
    }

    // cross-field invariants
    auto bad = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (cfg.nr < 4) bad("grid.nr must be at least 4");
    if (cfg.nz < 4 || !is_power_of_two(cfg.nz)) bad("grid.nz must be a power of two >= 4");
    if (!(cfg.r_max > 0.0)) bad("grid.r_max must be positive");
    if (!(cfg.z_len > 0.0)) bad("grid.z_len must be positive");
    if (!(cfg.nu >= 0.0)) bad("params.nu must be nonnegative");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) bad("params.cfl must lie in (0, 1]");
    if (!(cfg.dt_max > 0.0)) bad("params.dt_max must be positive");
    if (cfg.interp != "cubic" && cfg.interp != "linear")
        bad("params.interp must be 'cubic' or 'linear'");
    if (cfg.preset != "zero" && cfg.preset != "ring+gauss" && cfg.preset != "gauss-pi" &&
        cfg.preset != "ns-ring" && cfg.preset != "expr")
        bad("unknown initial.preset '" + cfg.preset + "'");
    if (!(cfg.width > 0.0)) bad("initial.width must be positive");
    if (!(cfg.t_end > 0.0)) bad("run.t_end must be positive");
    if (cfg.diag_cadence < 1) bad("run.diag_cadence must be >= 1");
    if (cfg.snapshot_cadence < 0) bad("run.snapshot_cadence must be >= 0");
    if (cfg.box_n < 0 || (cfg.box_n > 0 && !is_power_of_two(cfg.box_n)))
        bad("lp.box_n must be 0 or a power of two");
    if (cfg.preset == "expr") {
        // surface grammar errors at parse time, not mid-run
        if (!cfg.pi_expr.empty()) Expression dummy_pi(cfg.pi_expr);
        if (!cfg.omega_expr.empty()) Expression dummy_om(cfg.omega_expr);
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace axmhd
