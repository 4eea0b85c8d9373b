// Whole-run driver and the on-disk metric bundle: rounds.csv, stake.csv,
// vad.csv, events.csv, chain.jsonl and manifest.json.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orchestrator.hpp"

#ifndef VBFL_SOURCE_HASH
#define VBFL_SOURCE_HASH "unknown"
#endif

namespace vbfl {

struct RoundEvent {
    std::uint64_t round;
    LedgerEvent event;
};

struct RunResult {
    SimConfig config;
    std::vector<RoundMetrics> rounds;  // vad and events moved out into the flat lists below
    std::vector<VadRecord> vad;
    std::vector<RoundEvent> events;
    Blockchain chain;  // reference device's chain
    std::set<DeviceId> malicious_ids;
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    std::optional<ThresholdSuggestion> suggestion;

    double final_accuracy() const { return rounds.empty() ? 0.0 : rounds.back().global_accuracy; }
    std::size_t malicious_winner_rounds() const {
        std::size_t n = 0;
        for (const auto& r : rounds) n += r.winner_malicious ? 1 : 0;
        return n;
    }
};

using RoundObserver = std::function<void(const Simulator&, const RoundOutcome&)>;

// Runs `config.rounds` rounds (Vanilla FL when config.mode says so).
inline RunResult run_simulation(const SimConfig& config, const RoundObserver& observe = {}) {
    Simulator sim(config);
    RunResult res;
    res.config = sim.config();
    for (auto m : config.malicious) res.malicious_ids.insert(DeviceId::from_index(m));
    while (!sim.done()) {
        RoundOutcome out = sim.step();
        if (observe) observe(sim, out);
        for (auto& v : out.metrics.vad) res.vad.push_back(std::move(v));
        for (auto& e : out.metrics.events) res.events.push_back({out.metrics.round, std::move(e)});
        out.metrics.vad.clear();
        out.metrics.events.clear();
        res.rounds.push_back(std::move(out.metrics));
    }
    res.chain = sim.chain(sim.reference_device());
    res.failures = sim.failures();
    res.notes = sim.notes();
    res.suggestion = suggest_threshold(res.vad);
    return res;
}

inline RunResult run_vanilla_fl(SimConfig config, const RoundObserver& observe = {}) {
    config.mode = RunMode::Vanilla;
    return run_simulation(config, observe);
}

namespace detail {

inline std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline const char* consensus_label(const SimConfig& c) {
    if (c.mode == RunMode::Vanilla) return "NONE";
    return c.consensus == ConsensusKind::Pos ? "POS" : "POW";
}

}  // namespace detail

inline void write_rounds_csv(std::ostream& out, const RunResult& r) {
    out << "round,consensus,winner,winner_malicious,forked,global_accuracy\n";
    for (const auto& m : r.rounds) {
        out << m.round << ',' << detail::consensus_label(r.config) << ',' << (m.winner ? m.winner->hex() : "") << ','
            << (m.winner_malicious ? 1 : 0) << ',' << (m.forked ? 1 : 0) << ',' << detail::fmt_real(m.global_accuracy)
            << '\n';
    }
}

inline void write_stake_csv(std::ostream& out, const RunResult& r) {
    out << "round,device,stake,is_malicious\n";
    for (const auto& m : r.rounds) {
        for (const auto& [id, s] : m.stakes) {
            out << m.round << ',' << id.hex() << ',' << s << ',' << (r.malicious_ids.count(id) ? 1 : 0) << '\n';
        }
    }
}

inline void write_events_csv(std::ostream& out, const RunResult& r) {
    out << "round,device,event\n";
    for (const auto& e : r.events) out << e.round << ',' << e.event.device.hex() << ',' << to_string(e.event.kind) << '\n';
}

// One JSON object per block. Model updates are represented by their digest.
inline nlohmann::json block_to_json(const Block& b) {
    nlohmann::json j;
    j["round"] = b.round;
    j["miner"] = b.miner.hex();
    j["prev_hash"] = to_hex(b.prev_hash);
    j["content_hash"] = to_hex(b.content_hash);
    j["init_model_hash"] = to_hex(b.init_model_hash);
    j["signature"] = to_hex(b.signature);
    j["miner_reward"] = b.miner_reward;
    j["nonce"] = b.nonce;
    nlohmann::json vr = nlohmann::json::object();
    for (const auto& [id, r] : b.validator_rewards) vr[id.hex()] = r;
    j["validator_rewards"] = vr;
    nlohmann::json tallies = nlohmann::json::array();
    for (const auto& t : b.tallies) {
        nlohmann::json voters = nlohmann::json::array();
        for (const auto& v : t.voters) voters.push_back(v.hex());
        tallies.push_back({{"worker", t.worker().hex()},
                           {"positives", t.positives},
                           {"negatives", t.negatives},
                           {"voters", voters},
                           {"epochs", t.worker_tx.epochs},
                           {"train_size", t.worker_tx.train_size},
                           {"expected_reward", t.worker_tx.expected_reward},
                           {"update_digest", to_hex(params_digest(t.worker_tx.update))},
                           {"worker_signature", to_hex(t.worker_tx.signature)}});
    }
    j["tallies"] = tallies;
    return j;
}

inline void write_chain_jsonl(std::ostream& out, const Blockchain& chain) {
    for (const auto& b : chain.blocks()) out << block_to_json(*b).dump() << '\n';
}

inline nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["mode"] = c.mode == RunMode::Vanilla ? "vanilla" : "vbfl";
    j["devices"] = c.n_devices;
    j["workers"] = c.n_workers;
    j["validators"] = c.n_validators;
    j["miners"] = c.n_miners;
    j["malicious_ids"] = std::vector<std::uint32_t>(c.malicious.begin(), c.malicious.end());
    j["worker_noise"] = c.worker_noise;
    j["validator_flip"] = c.validator_flip;
    j["noise_variance"] = c.noise_variance;
    j["vh"] = c.vh ? nlohmann::json(*c.vh) : nlohmann::json(nullptr);
    j["validation_scheme"] = c.validation == ValidationScheme::Legacy ? "legacy" : "proxy";
    j["kick_r"] = c.kick_r;
    j["unit_reward"] = c.unit_reward;
    j["epochs"] = c.train.epochs;
    j["learning_rate"] = c.train.learning_rate;
    j["batch_size"] = c.train.batch_size;
    j["consensus"] = c.consensus == ConsensusKind::Pos ? "pos" : "pow";
    j["pow_difficulty"] = c.pow_difficulty;
    j["pow_mode"] = c.pow_mode == PowMode::Race ? "race" : "nonce";
    j["rounds"] = c.rounds;
    j["seed"] = c.seed;
    j["link_delay"] = c.network.link_delay;
    j["jitter"] = c.network.jitter;
    j["block_wait"] = c.network.block_wait ? nlohmann::json(*c.network.block_wait) : nlohmann::json("unlimited");
    j["model"] = c.model == ModelKind::Mlp ? "mlp" : "softmax";
    j["hidden"] = c.hidden;
    j["role_policy"] = c.role_policy == RolePolicy::FixedSequence ? "fixed" : "random";
    j["test_set"] = c.test_set == TestSetPolicy::SharedFull ? "shared" : "sharded";
    j["sharding"] = c.sharding == ShardPolicy::Iid ? "iid" : "noniid";
    j["signatures"] = c.signatures == SignatureMode::Emulated ? "emulated" : "keyed";
    if (c.dataset.kind == DatasetKind::Blobs) {
        const auto& b = c.dataset.blobs;
        j["dataset"] = {{"kind", "blobs"},
                        {"dim", b.dim},
                        {"classes", b.classes},
                        {"train_per_class", b.train_per_class},
                        {"test_per_class", b.test_per_class},
                        {"center_scale", b.center_scale},
                        {"spread", b.spread},
                        {"offset", b.offset}};
    } else {
        j["dataset"] = {{"kind", "idx"},
                        {"train_images", c.dataset.idx_train_images},
                        {"train_labels", c.dataset.idx_train_labels},
                        {"test_images", c.dataset.idx_test_images},
                        {"test_labels", c.dataset.idx_test_labels}};
    }
    return j;
}

inline nlohmann::json manifest_json(const RunResult& r) {
    nlohmann::json j;
    j["config"] = config_to_json(r.config);
    j["seed"] = r.config.seed;
    j["hash_function"] = std::string(kHashName);
    j["code_hash"] = VBFL_SOURCE_HASH;
    j["rounds_completed"] = r.rounds.size();
    j["final_accuracy"] = r.final_accuracy();
    j["malicious_winner_rounds"] = r.malicious_winner_rounds();
    j["device_failures"] = r.failures;
    j["notes"] = r.notes;
    if (r.suggestion) {
        j["vh_suggestion"] = {{"threshold", r.suggestion->threshold},
                              {"legit_p90", r.suggestion->legit_p90},
                              {"malicious_p10", r.suggestion->malicious_p10},
                              {"legit_records", r.suggestion->legit_count},
                              {"malicious_records", r.suggestion->malicious_count}};
    }
    return j;
}

inline void write_run(const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("rounds.csv");
        write_rounds_csv(f, r);
    }
    {
        auto f = open("stake.csv");
        write_stake_csv(f, r);
    }
    {
        auto f = open("vad.csv");
        write_vad_csv(f, r.vad);
    }
    {
        auto f = open("events.csv");
        write_events_csv(f, r);
    }
    {
        auto f = open("chain.jsonl");
        write_chain_jsonl(f, r.chain);
    }
    {
        auto f = open("manifest.json");
        f << manifest_json(r).dump(2) << '\n';
    }
}

}  // namespace vbfl
