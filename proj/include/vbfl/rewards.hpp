// Role rewards, the replicated stake ledger, worker flagging and blacklisting.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "protocol.hpp"

namespace vbfl {

// Worker: epochs x samples x unit, granted only when Positive votes are no
// fewer than Negative votes.
inline std::uint64_t worker_reward(std::uint64_t epochs, std::uint64_t train_size, std::uint64_t positives,
                                   std::uint64_t negatives, std::uint64_t unit) {
    return positives >= negatives ? epochs * train_size * unit : 0;
}

// Validator: one unit per verified worker transaction plus one per vote cast.
inline std::uint64_t validator_reward(std::uint64_t n_verified_tx, std::uint64_t n_votes, std::uint64_t unit) {
    if (n_votes > n_verified_tx) throw std::invalid_argument("validator_reward: more votes than verified transactions");
    return (n_verified_tx + n_votes) * unit;
}

// Miner: one unit per verified validator transaction.
inline std::uint64_t miner_reward(std::uint64_t n_verified_vtx, std::uint64_t unit) { return n_verified_vtx * unit; }

enum class LedgerEventKind { Flagged, StreakReset, Blacklisted };

inline const char* to_string(LedgerEventKind k) {
    switch (k) {
        case LedgerEventKind::Flagged: return "FLAGGED";
        case LedgerEventKind::StreakReset: return "STREAK_RESET";
        case LedgerEventKind::Blacklisted: return "BLACKLISTED";
    }
    return "?";
}

struct LedgerEvent {
    DeviceId device;
    LedgerEventKind kind;
};

struct RewardSplit {
    std::uint64_t worker = 0;
    std::uint64_t validator = 0;
    std::uint64_t miner = 0;

    std::uint64_t total() const { return worker + validator + miner; }
    bool operator==(const RewardSplit&) const = default;
};

struct BlockApplication {
    std::set<DeviceId> flagged;
    std::set<DeviceId> newly_blacklisted;
    std::vector<LedgerEvent> events;  // device-id order
    std::map<DeviceId, RewardSplit> credited;
};

class StakeLedger;
inline BlockApplication apply_block(StakeLedger&, const Block&, const std::map<DeviceId, bool>&);

class StakeLedger {
public:
    StakeLedger() = default;
    StakeLedger(std::uint64_t unit_reward, std::uint32_t kick_r) : unit_(unit_reward), kick_r_(kick_r) {
        if (unit_ == 0) throw std::invalid_argument("StakeLedger: unit reward must be positive");
        if (kick_r_ == 0) throw std::invalid_argument("StakeLedger: KickR must be positive");
    }

    void register_device(const DeviceId& id) {
        stake_.try_emplace(id, 0);
        streak_.try_emplace(id, 0);
    }

    std::uint64_t unit_reward() const { return unit_; }
    std::uint32_t kick_r() const { return kick_r_; }

    std::uint64_t stake(const DeviceId& id) const {
        auto it = stake_.find(id);
        return it == stake_.end() ? 0 : it->second;
    }
    std::uint32_t flag_streak(const DeviceId& id) const {
        auto it = streak_.find(id);
        return it == streak_.end() ? 0 : it->second;
    }
    bool blacklisted(const DeviceId& id) const { return blacklist_.count(id) != 0; }

    const std::map<DeviceId, std::uint64_t>& stakes() const { return stake_; }
    const std::set<DeviceId>& blacklist() const { return blacklist_; }

    std::uint64_t total_stake() const {
        std::uint64_t t = 0;
        for (const auto& [id, s] : stake_) t += s;
        return t;
    }

    bool operator==(const StakeLedger&) const = default;

private:
    friend BlockApplication apply_block(StakeLedger&, const Block&, const std::map<DeviceId, bool>&);

    void credit(const DeviceId& id, std::uint64_t amount) { stake_[id] += amount; }

    std::uint64_t unit_ = 1;
    std::uint32_t kick_r_ = 6;
    std::map<DeviceId, std::uint64_t> stake_;
    std::map<DeviceId, std::uint32_t> streak_;
    std::set<DeviceId> blacklist_;
};

// Processes the round's legitimate block on one replica.
//
// Worker rewards are recomputed from the epochs and sample count embedded in
// the transaction; a self-reported reward that disagrees is denied and the
// worker flagged. The flag streak counts consecutive flagged rounds in which
// the device served as a worker: a qualified (or unvoted) worker round resets
// it and non-worker rounds leave it alone. Reaching KickR blacklists.
inline BlockApplication apply_block(StakeLedger& ledger, const Block& block,
                                    const std::map<DeviceId, bool>& was_worker) {
    BlockApplication out;
    const std::uint64_t unit = ledger.unit_;
    std::set<DeviceId> tallied;

    for (const auto& t : block.tallies) {
        const auto& tx = t.worker_tx;
        tallied.insert(tx.worker);
        const std::uint64_t due = worker_reward(tx.epochs, tx.train_size, t.positives, t.negatives, unit);
        const bool honest_report = tx.expected_reward == std::uint64_t{tx.epochs} * tx.train_size * unit;
        if (t.qualified() && honest_report) {
            ledger.credit(tx.worker, due);
            out.credited[tx.worker].worker += due;
        } else {
            out.flagged.insert(tx.worker);
        }
    }
    for (const auto& [id, r] : block.validator_rewards) {
        ledger.credit(id, r);
        out.credited[id].validator += r;
    }
    if (block.miner_reward > 0) {
        ledger.credit(block.miner, block.miner_reward);
        out.credited[block.miner].miner += block.miner_reward;
    }

    std::set<DeviceId> served = tallied;
    for (const auto& [id, w] : was_worker) {
        if (w) served.insert(id);
    }
    for (const auto& id : served) {
        auto& streak = ledger.streak_[id];
        if (out.flagged.count(id)) {
            ++streak;
            out.events.push_back({id, LedgerEventKind::Flagged});
            if (streak >= ledger.kick_r_ && !ledger.blacklist_.count(id)) {
                ledger.blacklist_.insert(id);
                out.newly_blacklisted.insert(id);
                out.events.push_back({id, LedgerEventKind::Blacklisted});
            }
        } else if (streak > 0) {
            streak = 0;
            out.events.push_back({id, LedgerEventKind::StreakReset});
        }
    }
    return out;
}

}  // namespace vbfl
