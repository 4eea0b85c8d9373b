// Round driver: role assignment, association, the worker -> validator -> miner
// pipeline, block selection and per-device block processing, plus the
// Vanilla FL baseline that averages every update with no validation.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chain.hpp"
#include "config.hpp"
#include "consensus.hpp"
#include "dataset.hpp"
#include "learning.hpp"
#include "protocol.hpp"
#include "rewards.hpp"
#include "rng.hpp"
#include "validation.hpp"
#include "wire.hpp"

namespace vbfl {

class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Disjoint train shards, remainder examples one each to the lowest indices.
// Non-IID sharding sorts the shuffled pool by label before cutting.
inline std::vector<DataShard> shard_dataset(const DataShard& pool, std::uint32_t n_devices, RngStream& rng,
                                            ShardPolicy policy = ShardPolicy::Iid) {
    if (n_devices == 0) throw std::invalid_argument("shard_dataset: no devices");
    if (pool.size() < n_devices) throw std::invalid_argument("shard_dataset: dataset smaller than device count");
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    if (policy == ShardPolicy::NonIid) {
        const auto& y = pool.labels();
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    }
    const std::size_t base = pool.size() / n_devices, extra = pool.size() % n_devices;
    std::vector<DataShard> shards;
    shards.reserve(n_devices);
    std::size_t pos = 0;
    for (std::uint32_t d = 0; d < n_devices; ++d) {
        const std::size_t len = base + (d < extra ? 1 : 0);
        shards.push_back(pool.subset(std::span(order).subspan(pos, len), static_cast<int>(d)));
        pos += len;
    }
    return shards;
}

struct RoleAssignment {
    std::map<std::uint32_t, Role> roles;
    std::vector<std::uint32_t> workers, validators, miners;  // ascending
    bool shrunk = false;
};

namespace detail {

inline void fill_role_lists(RoleAssignment& a) {
    for (const auto& [d, r] : a.roles) {
        (r == Role::Worker ? a.workers : r == Role::Validator ? a.validators : a.miners).push_back(d);
    }
}

}  // namespace detail

// `eligible` holds the non-blacklisted device indices in ascending order.
// When too few remain, worker slots are given up first, then validator slots.
inline RoleAssignment assign_roles(std::uint64_t round, const SimConfig& config,
                                   const std::vector<std::uint32_t>& eligible, RngStream& rng) {
    RoleAssignment a;
    if (config.role_policy == RolePolicy::FixedSequence) {
        const std::string& seq = config.role_sequence[(round - 1) % config.role_sequence.size()];
        std::set<std::uint32_t> ok(eligible.begin(), eligible.end());
        for (std::uint32_t d = 0; d < seq.size(); ++d) {
            if (!ok.count(d)) {
                a.shrunk = true;
                continue;
            }
            a.roles[d] = seq[d] == 'W' ? Role::Worker : seq[d] == 'V' ? Role::Validator : Role::Miner;
        }
        detail::fill_role_lists(a);
        return a;
    }
    std::uint32_t w = config.n_workers, v = config.n_validators, m = config.n_miners;
    auto n = static_cast<std::uint32_t>(eligible.size());
    if (w + v + m > n) {
        a.shrunk = true;
        std::uint32_t deficit = w + v + m - n;
        const auto take = [&](std::uint32_t& count) {
            const std::uint32_t cut = std::min(count, deficit);
            count -= cut;
            deficit -= cut;
        };
        take(w);
        take(v);
        take(m);
    }
    std::vector<std::uint32_t> perm = eligible;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::uint32_t i = 0; i < w + v + m; ++i) {
        a.roles[perm[i]] = i < w ? Role::Worker : i < w + v ? Role::Validator : Role::Miner;
    }
    detail::fill_role_lists(a);
    return a;
}

struct Association {
    std::map<std::uint32_t, std::uint32_t> worker_to_validator;
    std::map<std::uint32_t, std::uint32_t> validator_to_miner;
};

// Uniform association of each worker to a validator and each validator to a
// miner. Empty when there is no validator or no miner to associate with.
inline std::optional<Association> associate(const std::vector<std::uint32_t>& workers,
                                            const std::vector<std::uint32_t>& validators,
                                            const std::vector<std::uint32_t>& miners, RngStream& rng) {
    if (validators.empty() || miners.empty()) return std::nullopt;
    Association a;
    std::uniform_int_distribution<std::size_t> pick_v(0, validators.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_m(0, miners.size() - 1);
    for (auto w : workers) a.worker_to_validator[w] = validators[pick_v(rng)];
    for (auto v : validators) a.validator_to_miner[v] = miners[pick_m(rng)];
    return a;
}

// Per-hop delay model shared by every message in a run.
class Network {
public:
    Network(NetworkSpec spec, RngStream rng) : spec_(spec), rng_(std::move(rng)) {}

    double hop() {
        double d = spec_.link_delay;
        if (spec_.jitter > 0.0) d += std::uniform_real_distribution<double>(0.0, spec_.jitter)(rng_);
        return d;
    }
    const NetworkSpec& spec() const { return spec_; }

private:
    NetworkSpec spec_;
    RngStream rng_;
};

struct RoundMetrics {
    std::uint64_t round = 0;
    double global_accuracy = 0.0;
    std::optional<DeviceId> winner;
    bool winner_malicious = false;
    bool forked = false;
    bool skipped = false;
    std::map<DeviceId, std::uint64_t> stakes;
    std::vector<VadRecord> vad;
    std::vector<LedgerEvent> events;
    std::map<std::uint32_t, Role> roles;
    double sim_time = 0.0;  // simulated seconds at round end
};

// Raw material for the independent reward and tally oracles.
struct RoundTrace {
    std::vector<WorkerTransaction> worker_txs;
    std::map<DeviceId, std::vector<ValidatorTransaction>> accepted_by_miner;
    std::map<DeviceId, BlockPtr> selected_by_miner;
    BlockPtr legitimate;  // the block the reference device appended
    StakeLedger ledger_before;
    StakeLedger ledger_after;
    BlockApplication application;
    std::map<DeviceId, bool> was_worker;
};

struct RoundOutcome {
    RoundMetrics metrics;
    RoundTrace trace;
};

class Simulator {
public:
    explicit Simulator(SimConfig config) : cfg_(std::move(config)), scheme_(cfg_.signatures) {
        validate_config(cfg_);
        load_data();
        init_devices();
    }

    const SimConfig& config() const { return cfg_; }
    std::uint64_t rounds_done() const { return round_; }
    bool done() const { return round_ >= cfg_.rounds; }

    std::uint32_t device_count() const { return cfg_.n_devices; }
    const DeviceId& id(std::uint32_t d) const { return devices_.at(d).id; }
    std::uint32_t index_of(const DeviceId& id) const { return index_.at(id); }
    bool malicious(const DeviceId& id) const { return cfg_.is_malicious(index_of(id)); }

    const Blockchain& chain(std::uint32_t d) const { return devices_.at(d).chain; }
    const StakeLedger& ledger(std::uint32_t d) const { return devices_.at(d).ledger; }
    const ModelParams& global_model(std::uint32_t d) const { return devices_.at(d).global; }
    const DataShard& train_shard(std::uint32_t d) const { return train_.at(d); }
    const DataShard& test_shard(std::uint32_t d) const {
        return cfg_.test_set == TestSetPolicy::SharedFull ? test_full_ : test_shards_.at(d);
    }
    const SignatureScheme& signatures() const { return scheme_; }
    const std::vector<std::string>& failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

    // Lowest-index device still in the network; its view feeds the metrics.
    std::uint32_t reference_device() const {
        const auto e = eligible();
        return e.empty() ? 0 : e.front();
    }

    std::vector<std::uint32_t> eligible() const {
        std::set<DeviceId> banned;
        for (const auto& dev : devices_) banned.insert(dev.ledger.blacklist().begin(), dev.ledger.blacklist().end());
        std::vector<std::uint32_t> out;
        for (std::uint32_t d = 0; d < cfg_.n_devices; ++d) {
            if (!banned.count(devices_[d].id)) out.push_back(d);
        }
        return out;
    }

    RoundOutcome step() {
        if (done()) throw std::logic_error("Simulator::step: all rounds already run");
        ++round_;
        RoundOutcome out = cfg_.mode == RunMode::Vanilla ? vanilla_round() : vbfl_round();
        out.metrics.sim_time = clock_;
        return out;
    }

private:
    struct Device {
        DeviceId id;
        Blockchain chain;
        StakeLedger ledger;
        ModelParams global;
        RngStream batches;
        RngStream noise;
    };

    void load_data() {
        Task task;
        if (cfg_.dataset.kind == DatasetKind::Blobs) {
            task = make_blobs(cfg_.dataset.blobs, cfg_.seed);
        } else {
            const auto& ds = cfg_.dataset;
            task.train = load_idx_shard(ds.idx_train_images, ds.idx_train_labels, 10, ds.idx_train_limit);
            task.test = load_idx_shard(ds.idx_test_images, ds.idx_test_labels, 10, ds.idx_test_limit);
        }
        RngStream shard_rng = make_substream(cfg_.seed, "shard");
        train_ = shard_dataset(task.train, cfg_.n_devices, shard_rng, cfg_.sharding);
        if (cfg_.test_set == TestSetPolicy::Sharded) {
            test_shards_ = shard_dataset(task.test, cfg_.n_devices, shard_rng, ShardPolicy::Iid);
        }
        test_full_ = std::move(task.test);
        arch_ = architecture_for(cfg_, test_full_.dim(), test_full_.num_classes());
    }

    void init_devices() {
        const ModelParams g0 = init_global_model(arch_, cfg_.seed);
        const BlockPtr genesis = make_genesis(g0);
        devices_.reserve(cfg_.n_devices);
        for (std::uint32_t d = 0; d < cfg_.n_devices; ++d) {
            Device dev{DeviceId::from_index(d), {}, StakeLedger(cfg_.unit_reward, cfg_.kick_r), g0,
                       make_device_substream(cfg_.seed, "batches", d),
                       make_device_substream(cfg_.seed, "noise" + cfg_.noise_salt, d)};
            const Digest secret = sha256("device-secret:" + std::to_string(cfg_.seed) + ":" + std::to_string(d));
            scheme_.register_device(dev.id, Bytes(secret.begin(), secret.end()));
            index_[dev.id] = d;
            devices_.push_back(std::move(dev));
        }
        for (auto& dev : devices_) {
            for (const auto& other : devices_) dev.ledger.register_device(other.id);
            append_block(dev.chain, genesis, scheme_, {});
        }
        for (std::uint32_t d = 0; d < cfg_.n_devices; ++d) {
            pow_.hash_rate[devices_[d].id] = cfg_.hash_rates.empty() ? 1.0 : cfg_.hash_rates[d];
        }
        pow_.difficulty = cfg_.pow_difficulty;
    }

    void fail(const std::string& what) { failures_.push_back("round " + std::to_string(round_) + ": " + what); }

    ModelParams train_worker(std::uint32_t w) {
        Device& dev = devices_[w];
        ModelParams update = local_train(dev.global, train_[w], cfg_.train, dev.batches);
        if (cfg_.is_malicious(w) && cfg_.worker_noise) update = inject_gaussian_noise(update, cfg_.noise_variance, dev.noise);
        return update;
    }

    RoundOutcome vanilla_round() {
        RoundOutcome out;
        auto& m = out.metrics;
        m.round = round_;
        std::vector<ModelParams> updates;
        updates.reserve(cfg_.n_devices);
        for (std::uint32_t d = 0; d < cfg_.n_devices; ++d) {
            updates.push_back(train_worker(d));
            m.roles[d] = Role::Worker;
        }
        std::vector<WeightedUpdate> weighted;
        for (std::uint32_t d = 0; d < cfg_.n_devices; ++d) {
            weighted.push_back({updates[d], static_cast<double>(train_[d].size())});
        }
        const ModelParams g = fedavg(weighted);
        for (auto& dev : devices_) dev.global = g;
        m.global_accuracy = evaluate(g, test_shard(0));
        return out;
    }

    RoundOutcome vbfl_round() {
        RoundOutcome out;
        RoundMetrics& metrics = out.metrics;
        RoundTrace& trace = out.trace;
        metrics.round = round_;

        const auto elig = eligible();
        const RoleAssignment ra = assign_roles(round_, cfg_, elig, roles_rng_);
        if (ra.shrunk) notes_.push_back("round " + std::to_string(round_) + ": role counts shrunk by blacklisting");
        metrics.roles = ra.roles;
        const std::uint32_t ref = elig.empty() ? 0 : elig.front();
        trace.ledger_before = devices_[ref].ledger;

        const auto assoc = associate(ra.workers, ra.validators, ra.miners, assoc_rng_);
        if (!assoc || ra.workers.empty()) {
            notes_.push_back("round " + std::to_string(round_) + ": skipped, degenerate role draw");
            metrics.skipped = true;
            finish_metrics(metrics, ref);
            trace.ledger_after = devices_[ref].ledger;
            return out;
        }

        // Workers train and sign; validators each end up with every transaction
        // (direct delivery plus validator-to-validator broadcast).
        const double t0 = clock_;
        double t_tx = t0;
        for (auto w : ra.workers) {
            WorkerTransaction tx;
            tx.round = round_;
            tx.worker = devices_[w].id;
            tx.update = train_worker(w);
            tx.epochs = cfg_.train.epochs;
            tx.train_size = train_[w].size();
            tx.expected_reward = std::uint64_t{tx.epochs} * tx.train_size * cfg_.unit_reward;
            sign_transaction(tx, tx.worker, scheme_);
            trace.worker_txs.push_back(std::move(tx));
            t_tx = std::max(t_tx, t0 + network_.hop() + network_.hop());
        }

        // Validators: reference accuracy, then one vote per received transaction.
        std::vector<ValidatorTransaction> all_vtx;
        double t_vote = t_tx;
        for (auto v : ra.validators) {
            Device& dev = devices_[v];
            ValidatorState st;
            st.validator = dev.id;
            st.threshold = cfg_.threshold_for(v);
            st.test = &test_shard(v);
            st.train = &train_[v];
            st = cfg_.validation == ValidationScheme::Legacy
                     ? reference_from_global(dev.global, st, round_)
                     : pretrain_one_epoch(dev.global, st, cfg_.train, dev.batches, round_);

            std::set<DeviceId> seen_workers;
            for (const auto& tx : trace.worker_txs) {
                if (tx.round != round_ || dev.ledger.blacklisted(tx.worker)) continue;
                if (!seen_workers.insert(tx.worker).second) continue;
                ValidatorTransaction vtx;
                vtx.round = round_;
                vtx.validator = dev.id;
                vtx.inner = tx;
                vtx.verify_reward = cfg_.unit_reward;
                if (verify_transaction(tx, scheme_)) {
                    VoteDecision d = validate_by_voting(tx.update, st, cfg_.unit_reward);
                    Vote cast = d.vote;
                    if (cfg_.is_malicious(v) && cfg_.validator_flip) cast = malicious_flip(cast);
                    vtx.vote = cast;
                    vtx.vali_reward = d.vali_reward;
                    metrics.vad.push_back({round_, dev.id, tx.worker, d.vad, cast, malicious(tx.worker)});
                } else {
                    fail("validator " + dev.id.hex() + " could not verify worker " + tx.worker.hex());
                }
                sign_transaction(vtx, dev.id, scheme_);
                all_vtx.push_back(std::move(vtx));
            }
            t_vote = std::max(t_vote, t_tx + network_.hop() + network_.hop());
        }

        // Miners: every miner receives every validator transaction (direct plus
        // miner-to-miner broadcast), aggregates and builds a candidate.
        std::map<std::uint32_t, BlockPtr> candidates;
        for (auto mi : ra.miners) {
            Device& dev = devices_[mi];
            std::vector<ValidatorTransaction> inbox;
            for (const auto& vtx : all_vtx) {
                if (!dev.ledger.blacklisted(vtx.validator)) inbox.push_back(vtx);
            }
            ReceivedVotes rv = receive_votes(inbox, scheme_);
            if (rv.bad_signature) fail("miner " + dev.id.hex() + " dropped unverifiable validator transactions");
            auto tallies = aggregate_votes(rv.accepted);
            auto vrewards = tally_validator_rewards(rv.accepted, cfg_.unit_reward);
            const auto mreward = miner_reward(rv.accepted.size(), cfg_.unit_reward);
            candidates[mi] = build_candidate(dev.id, std::move(tallies), std::move(vrewards), mreward,
                                             dev.chain.tip_hash(), round_, scheme_);
            trace.accepted_by_miner[dev.id] = std::move(rv.accepted);
        }

        const double t_blocks = t_vote;
        std::map<std::uint32_t, BlockPtr> selected =
            cfg_.consensus == ConsensusKind::Pos ? select_pos(ra.miners, candidates) : select_pow(ra.miners, candidates);
        clock_ = t_blocks + block_phase_time_;

        std::set<Digest> distinct;
        for (const auto& [mi, b] : selected) {
            trace.selected_by_miner[devices_[mi].id] = b;
            distinct.insert(b->content_hash);
        }
        metrics.forked = distinct.size() > 1;

        for (auto w : ra.workers) trace.was_worker[devices_[w].id] = true;

        // Every device appends the block chosen by the miner it is associated
        // with, then processes it. Blocks are aggregated once per distinct hash.
        std::map<Digest, std::optional<ModelParams>> aggregated;
        for (const auto& [d, role] : ra.roles) {
            std::uint32_t via = d;
            if (role == Role::Worker) via = assoc->validator_to_miner.at(assoc->worker_to_validator.at(d));
            if (role == Role::Validator) via = assoc->validator_to_miner.at(d);
            auto sel = selected.find(via);
            if (sel == selected.end() || !sel->second) {
                fail("device " + devices_[d].id.hex() + " received no legitimate block");
                continue;
            }
            const BlockPtr& block = sel->second;
            Device& dev = devices_[d];
            try {
                append_block(dev.chain, block, scheme_, dev.ledger.blacklist());
            } catch (const ChainError& e) {
                fail("device " + dev.id.hex() + " rejected block from " + block->miner.hex() + ": " + e.what());
                continue;
            }
            BlockApplication app = apply_block(dev.ledger, *block, trace.was_worker);
            auto [it, fresh] = aggregated.try_emplace(block->content_hash);
            if (fresh) it->second = global_from_block(*block);
            if (it->second) dev.global = *it->second;
            if (d == ref) {
                trace.legitimate = block;
                trace.application = std::move(app);
            }
        }
        trace.ledger_after = devices_[ref].ledger;

        if (trace.legitimate) {
            metrics.winner = trace.legitimate->miner;
            metrics.winner_malicious = malicious(trace.legitimate->miner);
            metrics.events = trace.application.events;
        }
        finish_metrics(metrics, ref);
        check_invariants(trace, ra);
        return out;
    }

    // FedAvg over the updates whose tally has no fewer Positive than Negative
    // votes; empty when none qualify (the previous global model stays).
    std::optional<ModelParams> global_from_block(const Block& b) const {
        std::vector<WeightedUpdate> q;
        for (const auto& t : b.tallies) {
            if (t.qualified()) q.push_back({t.worker_tx.update, static_cast<double>(t.worker_tx.train_size)});
        }
        if (q.empty()) return std::nullopt;
        return fedavg(q);
    }

    std::map<std::uint32_t, BlockPtr> select_pos(const std::vector<std::uint32_t>& miners,
                                                 const std::map<std::uint32_t, BlockPtr>& candidates) {
        std::map<std::uint32_t, BlockPtr> selected;
        double phase = 0.0;
        for (auto mi : miners) {
            const Device& dev = devices_[mi];
            std::vector<PropagatedBlock> incoming;
            for (auto other : miners) {
                if (other == mi) continue;
                const double arrival = network_.hop();
                incoming.push_back({candidates.at(other), arrival});
                if (!cfg_.network.block_wait || arrival <= *cfg_.network.block_wait) phase = std::max(phase, arrival);
            }
            const auto blocks = collect_blocks(candidates.at(mi), incoming, cfg_.network.block_wait,
                                               dev.ledger.blacklist());
            selected[mi] = pos_select(blocks, dev.ledger);
        }
        if (cfg_.network.block_wait) phase = std::max(phase, *cfg_.network.block_wait);
        block_phase_time_ = phase;
        return selected;
    }

    // Each miner adopts whichever valid block it holds first: its own solution
    // or a propagated one that arrives earlier (mining stops on receipt).
    std::map<std::uint32_t, BlockPtr> select_pow(const std::vector<std::uint32_t>& miners,
                                                 std::map<std::uint32_t, BlockPtr>& candidates) {
        std::set<DeviceId> ids;
        for (auto mi : miners) ids.insert(devices_[mi].id);
        std::map<DeviceId, double> times;
        if (cfg_.pow_mode == PowMode::Race) {
            times = pow_race(pow_, ids, pow_rng_).mining_times;
        } else {
            for (auto mi : miners) {
                Block b = *candidates.at(mi);
                const std::uint64_t start = pow_rng_();
                const auto attempts = mine_nonce(b, cfg_.pow_difficulty, start, scheme_);
                times[b.miner] = static_cast<double>(attempts) / pow_.rate_of(b.miner);
                candidates[mi] = std::make_shared<const Block>(std::move(b));
            }
        }
        std::map<std::uint32_t, BlockPtr> selected;
        double phase = 0.0;
        for (auto mi : miners) {
            const Device& dev = devices_[mi];
            double best_t = times.at(dev.id);
            BlockPtr best = candidates.at(mi);
            for (auto other : miners) {
                if (other == mi) continue;
                const BlockPtr& b = candidates.at(other);
                if (dev.ledger.blacklisted(b->miner)) continue;
                const double arrival = times.at(b->miner) + network_.hop();
                if (arrival < best_t || (arrival == best_t && b->miner < best->miner)) {
                    best_t = arrival;
                    best = b;
                }
            }
            phase = std::max(phase, best_t);
            selected[mi] = best;
        }
        block_phase_time_ = phase;
        return selected;
    }

    void finish_metrics(RoundMetrics& m, std::uint32_t ref) const {
        const Device& r = devices_[ref];
        m.global_accuracy = evaluate(r.global, test_shard(ref));
        m.stakes = r.ledger.stakes();
    }

    void check_invariants(const RoundTrace& trace, const RoleAssignment& ra) {
        for (const auto& [d, role] : ra.roles) {
            if (!verify_chain(devices_[d].chain, false)) {
                throw InvariantViolation("device " + devices_[d].id.hex() + " holds a broken hash chain");
            }
        }
        for (const auto& [id, before] : trace.ledger_before.stakes()) {
            if (trace.ledger_after.stake(id) < before) throw InvariantViolation("stake decreased for " + id.hex());
        }
        if (trace.legitimate) {
            std::uint64_t minted = 0;
            for (const auto& [id, split] : trace.application.credited) minted += split.total();
            if (trace.ledger_after.total_stake() != trace.ledger_before.total_stake() + minted) {
                throw InvariantViolation("stake minted outside the legitimate block");
            }
        }
        if (!cfg_.network.ideal()) return;
        const std::uint32_t ref = ra.roles.empty() ? 0 : ra.roles.begin()->first;
        const Device& r = devices_[ref];
        for (const auto& [d, role] : ra.roles) {
            const Device& dev = devices_[d];
            if (!dev.chain.same_as(r.chain) || !(dev.ledger == r.ledger) || !(dev.global == r.global)) {
                throw InvariantViolation("replicas diverged in the ideal network at device " + dev.id.hex());
            }
        }
    }

    SimConfig cfg_;
    SignatureScheme scheme_;
    Architecture arch_;
    std::vector<DataShard> train_;
    std::vector<DataShard> test_shards_;
    DataShard test_full_;
    std::vector<Device> devices_;
    std::map<DeviceId, std::uint32_t> index_;
    PowParams pow_;
    RngStream roles_rng_ = make_substream(cfg_.seed, "roles");
    RngStream assoc_rng_ = make_substream(cfg_.seed, "assoc");
    RngStream pow_rng_ = make_substream(cfg_.seed, "pow");
    Network network_{cfg_.network, make_substream(cfg_.seed, "net")};
    std::uint64_t round_ = 0;
    double clock_ = 0.0;
    double block_phase_time_ = 0.0;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

}  // namespace vbfl
