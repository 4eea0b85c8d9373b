// Named experiment setups: the Vanilla FL baselines, the PoS and PoW variants,
// the malicious-validator variant and the threshold calibration run.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace vbfl {

struct Preset {
    std::string_view name;
    std::string_view summary;
    bool needs_calibrated_vh;
};

inline constexpr std::array<Preset, 8> kPresets{{
    {"VFL_0_20", "Vanilla FL, 20 honest devices", false},
    {"VFL_3_20", "Vanilla FL, 3 of 20 devices inject noise", false},
    {"VBFL_POS_0_20_VH1", "VBFL-PoS, 20 honest devices, threshold 1.0", false},
    {"VBFL_POS_3_20_VHCAL", "VBFL-PoS, 3 of 20 noisy workers, calibrated threshold", true},
    {"VBFL_POS_3_20_VHCAL_MV", "as VBFL_POS_3_20_VHCAL, malicious validators also flip votes", true},
    {"VBFL_POW_3_20_VHCAL_D1", "VBFL-PoW race, difficulty 1, calibrated threshold", true},
    {"VBFL_POW_3_20_VHCAL_D2", "VBFL-PoW race, difficulty 2, calibrated threshold", true},
    {"CALIBRATE_VH", "30-round vad logging run with 3 of 20 noisy workers", false},
}};

inline const Preset* find_preset(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

// Shared base: 20 devices split 12/5/3, KickR 6, unit reward 1, 5 local
// epochs at learning rate 0.01 with batch 10, 100 rounds, synthetic task.
inline SimConfig base_config() {
    SimConfig c;
    c.n_devices = 20;
    c.n_workers = 12;
    c.n_validators = 5;
    c.n_miners = 3;
    c.kick_r = 6;
    c.unit_reward = 1;
    c.train = {5, 0.01, 10};
    c.rounds = 100;
    c.noise_variance = 1.0;
    return c;
}

// Returns the preset's configuration. Presets that need a calibrated threshold
// come back with `vh` unset; the caller must supply one before running.
inline SimConfig preset_config(std::string_view name) {
    const Preset* p = find_preset(name);
    if (!p) throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
    SimConfig c = base_config();
    c.name = std::string(name);
    const auto three = last_k_devices(c.n_devices, 3);
    if (name == "VFL_0_20") {
        c.mode = RunMode::Vanilla;
    } else if (name == "VFL_3_20") {
        c.mode = RunMode::Vanilla;
        c.malicious = three;
    } else if (name == "VBFL_POS_0_20_VH1") {
        c.vh = 1.0;
    } else if (name == "VBFL_POS_3_20_VHCAL") {
        c.malicious = three;
    } else if (name == "VBFL_POS_3_20_VHCAL_MV") {
        c.malicious = three;
        c.validator_flip = true;
    } else if (name == "VBFL_POW_3_20_VHCAL_D1" || name == "VBFL_POW_3_20_VHCAL_D2") {
        c.malicious = three;
        c.consensus = ConsensusKind::Pow;
        c.pow_difficulty = name.back() == '1' ? 1 : 2;
    } else if (name == "CALIBRATE_VH") {
        // Votes never exclude anything here; the run exists to log vad.
        c.malicious = three;
        c.vh = 1.0;
        c.rounds = 30;
    }
    return c;
}

}  // namespace vbfl
