// Cross-run summaries: final accuracy mean/std per setup, malicious-winner
// counts and accuracy ratios between setups.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace vbfl {

inline constexpr const char* kRoundsHeader = "round,consensus,winner,winner_malicious,forked,global_accuracy";

class CompareError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSummary {
    std::string dir;
    std::string name;
    std::uint64_t seed = 0;
    std::size_t rounds = 0;
    double final_accuracy = 0.0;
    std::size_t malicious_winners = 0;
    std::size_t forked_rounds = 0;
};

struct SetupSummary {
    std::string name;
    std::vector<RunSummary> runs;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std-dev across runs
};

inline RunSummary load_run_summary(const std::filesystem::path& dir) {
    RunSummary s;
    s.dir = dir.string();
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw CompareError("missing manifest.json in " + s.dir);
    nlohmann::json manifest;
    try {
        mf >> manifest;
        s.name = manifest.at("config").at("name").get<std::string>();
        s.seed = manifest.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw CompareError("malformed manifest in " + s.dir + ": " + e.what());
    }

    std::ifstream rf(dir / "rounds.csv");
    if (!rf) throw CompareError("missing rounds.csv in " + s.dir);
    std::string line;
    if (!std::getline(rf, line) || line != kRoundsHeader) throw CompareError("rounds.csv schema mismatch in " + s.dir);
    while (std::getline(rf, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (line.back() == ',') cols.emplace_back();
        if (cols.size() != 6) throw CompareError("rounds.csv row has wrong column count in " + s.dir);
        ++s.rounds;
        s.malicious_winners += cols[3] == "1" ? 1 : 0;
        s.forked_rounds += cols[4] == "1" ? 1 : 0;
        s.final_accuracy = std::stod(cols[5]);
    }
    return s;
}

// Groups runs by setup name in first-seen order.
inline std::vector<SetupSummary> compare_runs(const std::vector<std::filesystem::path>& dirs) {
    if (dirs.size() < 2) throw CompareError("compare needs at least two run directories");
    std::vector<SetupSummary> setups;
    std::map<std::string, std::size_t> slot;
    for (const auto& d : dirs) {
        RunSummary r = load_run_summary(d);
        auto [it, fresh] = slot.try_emplace(r.name, setups.size());
        if (fresh) setups.push_back({r.name, {}, 0.0, 0.0});
        setups[it->second].runs.push_back(std::move(r));
    }
    for (auto& s : setups) {
        double sum = 0.0;
        for (const auto& r : s.runs) sum += r.final_accuracy;
        s.mean_accuracy = sum / static_cast<double>(s.runs.size());
        double var = 0.0;
        for (const auto& r : s.runs) var += (r.final_accuracy - s.mean_accuracy) * (r.final_accuracy - s.mean_accuracy);
        s.std_accuracy = std::sqrt(var / static_cast<double>(s.runs.size()));
    }
    return setups;
}

inline void print_comparison(std::ostream& out, const std::vector<SetupSummary>& setups) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %5s %10s %9s %18s %12s\n", "setup", "runs", "final_acc", "std",
                  "malicious_winners", "ratio_vs_1st");
    out << buf;
    const double base = setups.empty() ? 0.0 : setups.front().mean_accuracy;
    for (const auto& s : setups) {
        std::string winners;
        for (const auto& r : s.runs) {
            if (!winners.empty()) winners += '/';
            winners += std::to_string(r.malicious_winners);
        }
        const double ratio = base > 0.0 ? s.mean_accuracy / base : 0.0;
        std::snprintf(buf, sizeof buf, "%-28s %5zu %10.4f %9.4f %18s %12.3f\n", s.name.c_str(), s.runs.size(),
                      s.mean_accuracy, s.std_accuracy, winners.c_str(), ratio);
        out << buf;
    }
}

}  // namespace vbfl
