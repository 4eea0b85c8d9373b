// Vote aggregation, candidate blocks, stake-based block selection and the
// proof-of-work race used as a baseline.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "protocol.hpp"
#include "rewards.hpp"
#include "wire.hpp"

namespace vbfl {

struct ReceivedVotes {
    std::vector<ValidatorTransaction> accepted;  // signature-verified, one per (validator, worker)
    std::size_t bad_signature = 0;
    std::size_t duplicates = 0;
};

// Receipt filter applied by a miner: unverifiable transactions are dropped and
// a second vote by the same validator on the same worker is rejected.
inline ReceivedVotes receive_votes(std::span<const ValidatorTransaction> incoming, const SignatureScheme& scheme) {
    ReceivedVotes out;
    std::set<std::pair<DeviceId, DeviceId>> seen;
    for (const auto& vtx : incoming) {
        if (!verify_transaction(vtx, scheme)) {
            ++out.bad_signature;
            continue;
        }
        if (!seen.emplace(vtx.validator, vtx.inner.worker).second) {
            ++out.duplicates;
            continue;
        }
        out.accepted.push_back(vtx);
    }
    return out;
}

// One tally per worker, ordered by worker id. Vote-less transactions (the
// validator could not verify the worker) contribute nothing; duplicate
// (validator, worker) pairs are counted once.
inline std::vector<VoteTally> aggregate_votes(std::span<const ValidatorTransaction> vtxs) {
    std::map<DeviceId, VoteTally> by_worker;
    std::set<std::pair<DeviceId, DeviceId>> seen;
    for (const auto& vtx : vtxs) {
        if (!vtx.vote) continue;
        if (!seen.emplace(vtx.validator, vtx.inner.worker).second) continue;
        auto [it, fresh] = by_worker.try_emplace(vtx.inner.worker);
        VoteTally& t = it->second;
        if (fresh) t.worker_tx = vtx.inner;
        (*vtx.vote == Vote::Positive ? t.positives : t.negatives) += 1;
        t.voters.insert(std::upper_bound(t.voters.begin(), t.voters.end(), vtx.validator), vtx.validator);
    }
    std::vector<VoteTally> out;
    out.reserve(by_worker.size());
    for (auto& [id, t] : by_worker) out.push_back(std::move(t));
    return out;
}

// Per-validator duty rewards from the transactions a miner accepted.
inline std::map<DeviceId, std::uint64_t> tally_validator_rewards(std::span<const ValidatorTransaction> accepted,
                                                                 std::uint64_t unit) {
    std::map<DeviceId, std::pair<std::uint64_t, std::uint64_t>> counts;  // verified, voted
    for (const auto& vtx : accepted) {
        auto& c = counts[vtx.validator];
        ++c.first;
        if (vtx.vote) ++c.second;
    }
    std::map<DeviceId, std::uint64_t> out;
    for (const auto& [id, c] : counts) out[id] = validator_reward(c.first, c.second, unit);
    return out;
}

inline BlockPtr build_candidate(const DeviceId& miner, std::vector<VoteTally> tallies,
                                std::map<DeviceId, std::uint64_t> validator_rewards, std::uint64_t reward_for_miner,
                                const Digest& prev_hash, std::uint64_t round, const SignatureScheme& scheme) {
    Block b;
    b.round = round;
    b.miner = miner;
    b.prev_hash = prev_hash;
    b.tallies = std::move(tallies);
    b.miner_reward = reward_for_miner;
    b.validator_rewards = std::move(validator_rewards);
    seal_block(b, scheme);
    return std::make_shared<const Block>(std::move(b));
}

// Highest-stake miner's block; equal stakes go to the smallest miner id.
// Blocks from miners on the selecting ledger's blacklist are never chosen.
inline BlockPtr pos_select(std::span<const BlockPtr> blocks, const StakeLedger& ledger) {
    BlockPtr best;
    for (const auto& b : blocks) {
        if (ledger.blacklisted(b->miner)) continue;
        if (!best) {
            best = b;
            continue;
        }
        const auto sb = ledger.stake(b->miner), sbest = ledger.stake(best->miner);
        if (sb > sbest || (sb == sbest && b->miner < best->miner)) best = b;
    }
    if (!best) throw std::invalid_argument("pos_select: no eligible block");
    return best;
}

struct PowParams {
    std::uint32_t difficulty = 1;         // leading zero hex digits
    std::map<DeviceId, double> hash_rate;  // attempts per simulated second; missing = 1.0

    double rate_of(const DeviceId& id) const {
        auto it = hash_rate.find(id);
        return it == hash_rate.end() ? 1.0 : it->second;
    }
};

struct PowRace {
    DeviceId winner;
    std::map<DeviceId, double> mining_times;
};

// Time-to-solution per miner is exponential with rate hash_rate / 16^difficulty
// (a target of `difficulty` leading zero nibbles). Draws happen in miner-id
// order; the earliest solution wins, ties to the smallest id.
inline PowRace pow_race(const PowParams& params, const std::set<DeviceId>& miners, RngStream& rng) {
    if (miners.empty()) throw std::invalid_argument("pow_race: no miners");
    if (params.difficulty > 64) throw std::invalid_argument("pow_race: difficulty exceeds hash width");
    PowRace race;
    const double expected_attempts = std::pow(16.0, static_cast<double>(params.difficulty));
    bool first = true;
    double best = 0.0;
    for (const auto& m : miners) {
        double t = 0.0;
        if (params.difficulty > 0) {
            const double rate = params.rate_of(m);
            if (!(rate > 0.0)) throw std::invalid_argument("pow_race: hash rate must be positive");
            std::exponential_distribution<double> dist(rate / expected_attempts);
            t = dist(rng);
        }
        race.mining_times[m] = t;
        if (first || t < best) {
            best = t;
            race.winner = m;
            first = false;
        }
    }
    return race;
}

// Literal nonce grinding: bumps the nonce from `start` until the content hash
// has `difficulty` leading zero nibbles, then signs. Returns attempts used.
inline std::uint64_t mine_nonce(Block& b, std::uint32_t difficulty, std::uint64_t start,
                                const SignatureScheme& scheme) {
    if (difficulty > 64) throw std::invalid_argument("mine_nonce: difficulty exceeds hash width");
    std::uint64_t attempts = 0;
    b.nonce = start;
    for (;;) {
        ++attempts;
        b.content_hash = compute_content_hash(b);
        if (leading_zero_nibbles(b.content_hash) >= difficulty) break;
        ++b.nonce;
    }
    b.signature = scheme.sign(b.content_hash, b.miner);
    return attempts;
}

struct PropagatedBlock {
    BlockPtr block;
    double arrival = 0.0;  // simulated seconds after the propagation phase opened
};

// The miner's own candidate plus every propagated block that arrives within
// the wait deadline (nullopt = wait for all). Blocks from miners the collector
// has blacklisted are dropped at receipt.
inline std::vector<BlockPtr> collect_blocks(const BlockPtr& own, std::span<const PropagatedBlock> propagated,
                                            std::optional<double> wait_deadline,
                                            const std::set<DeviceId>& blacklist) {
    std::vector<BlockPtr> out;
    if (own) out.push_back(own);
    for (const auto& p : propagated) {
        if (blacklist.count(p.block->miner)) continue;
        if (wait_deadline && p.arrival > *wait_deadline) continue;
        out.push_back(p.block);
    }
    return out;
}

}  // namespace vbfl
