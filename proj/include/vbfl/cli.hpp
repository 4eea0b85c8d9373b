// Command implementations behind the `vbfl` executable. Argument parsing lives
// in tools/vbfl.cpp; everything here is callable from tests.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "compare.hpp"
#include "metrics.hpp"
#include "presets.hpp"

namespace vbfl::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInvariantViolation = 2 };

inline constexpr const char* kOutDirEnv = "VBFL_OUT_DIR";
inline constexpr const char* kSuggestedVhFile = "suggested_vh.txt";

struct RunOptions {
    std::optional<std::string> preset;
    std::optional<std::string> config_file;
    std::optional<std::uint32_t> rounds;
    std::optional<std::uint64_t> seed;
    std::optional<double> vh;
    std::optional<std::string> vh_file;
    std::optional<std::string> consensus;
    std::optional<std::uint32_t> pow_difficulty;
    std::optional<std::uint32_t> malicious;
    std::optional<std::string> out_dir;
    std::vector<std::string> settings;  // extra key=value overrides
    bool quiet = false;
};

inline double read_vh_file(const std::string& path) {
    std::ifstream in(path);
    double v = 0.0;
    if (!in || !(in >> v)) throw ConfigError("vh-file", "cannot read a threshold from " + path);
    return v;
}

// Builds the final configuration: preset or file, then flag overrides.
inline SimConfig resolve_config(const RunOptions& o) {
    if (o.preset.has_value() == o.config_file.has_value()) {
        throw ConfigError("preset", "give exactly one of --preset or --config");
    }
    SimConfig c = o.preset ? preset_config(*o.preset) : load_config_file(*o.config_file, base_config());
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
        apply_setting(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    if (o.rounds) c.rounds = *o.rounds;
    if (o.seed) c.seed = *o.seed;
    if (o.consensus) apply_setting(c, "consensus", *o.consensus);
    if (o.pow_difficulty) c.pow_difficulty = *o.pow_difficulty;
    if (o.malicious) c.malicious = last_k_devices(c.n_devices, *o.malicious);
    if (o.vh_file) c.vh = read_vh_file(*o.vh_file);
    if (o.vh) c.vh = *o.vh;

    // The threshold is setup-specific: VBFL runs need one stated explicitly.
    if (c.mode == RunMode::Vbfl && !c.vh && c.vh_per_validator.size() < c.n_devices) {
        throw ConfigError("vh",
                          "no validator threshold; pass --vh, or --vh-file with the output of a CALIBRATE_VH run");
    }
    validate_config(c);
    return c;
}

inline std::filesystem::path default_out_dir(const SimConfig& c) {
    std::filesystem::path root = "vbfl-out";
    if (const char* env = std::getenv(kOutDirEnv); env && *env) root = env;
    return root / (c.name + "-s" + std::to_string(c.seed));
}

inline int run(const RunOptions& o, std::ostream& out, std::ostream& err) {
    SimConfig cfg;
    try {
        cfg = resolve_config(o);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    const std::filesystem::path dir = o.out_dir ? std::filesystem::path(*o.out_dir) : default_out_dir(cfg);
    try {
        const auto observe = [&](const Simulator&, const RoundOutcome& r) {
            if (o.quiet) return;
            const auto& m = r.metrics;
            char buf[160];
            std::snprintf(buf, sizeof buf, "round %3llu  acc %.4f  winner %s  malicious %d  forked %d%s\n",
                          static_cast<unsigned long long>(m.round), m.global_accuracy,
                          m.winner ? m.winner->hex().c_str() : "-", m.winner_malicious ? 1 : 0, m.forked ? 1 : 0,
                          m.skipped ? "  (skipped)" : "");
            out << buf;
        };
        const RunResult res = run_simulation(cfg, observe);
        write_run(res, dir);
        if (cfg.name == "CALIBRATE_VH" || res.suggestion) {
            if (res.suggestion) {
                std::ofstream f(dir / kSuggestedVhFile, std::ios::trunc);
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6f\n", res.suggestion->threshold);
                f << buf;
                if (cfg.name == "CALIBRATE_VH") {
                    out << "suggested vh " << buf << "  (legit p90 " << res.suggestion->legit_p90
                        << ", malicious p10 " << res.suggestion->malicious_p10 << ")\n";
                }
            } else {
                out << "no suggestion: the run logged no vad records for one of the two worker classes\n";
            }
        }
        for (const auto& f : res.failures) err << "device failure: " << f << '\n';
        out << "final accuracy " << detail::fmt_real(res.final_accuracy()) << ", malicious winners "
            << res.malicious_winner_rounds() << ", output in " << dir.string() << '\n';
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << '\n';
        return kInvariantViolation;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}

inline int compare(const std::vector<std::string>& dirs, std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
        print_comparison(out, compare_runs(paths));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}

inline void list_presets(std::ostream& out) {
    for (const auto& p : kPresets) {
        out << p.name << "  " << p.summary << (p.needs_calibrated_vh ? "  [needs --vh or --vh-file]" : "") << '\n';
    }
}

}  // namespace vbfl::cli
