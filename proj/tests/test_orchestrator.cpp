#include <numeric>

#include <gtest/gtest.h>

#include "vbfl/metrics.hpp"
#include "vbfl/presets.hpp"

using namespace vbfl;

namespace {

SimConfig small_config(std::uint32_t rounds = 4) {
    SimConfig c = base_config();
    c.model = ModelKind::Softmax;
    c.dataset.blobs.dim = 8;
    c.dataset.blobs.classes = 3;
    c.dataset.blobs.train_per_class = 100;
    c.dataset.blobs.test_per_class = 20;
    c.dataset.blobs.spread = 1.0;
    c.dataset.blobs.center_scale = 1.0;
    c.rounds = rounds;
    c.vh = 0.1;
    return c;
}

DataShard counting_pool(std::size_t n, std::size_t classes) {
    std::vector<double> x(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = static_cast<int>(i % classes);
    }
    return DataShard(1, classes, std::move(x), std::move(y));
}

std::vector<std::uint32_t> iota_devices(std::uint32_t n) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

}  // namespace

TEST(Sharding, DisjointCoverWithRemainderToLowestIndices) {
    const DataShard pool = counting_pool(23, 3);
    RngStream g(1);
    const auto shards = shard_dataset(pool, 5, g);
    ASSERT_EQ(shards.size(), 5u);
    const std::vector<std::size_t> sizes{5, 5, 5, 4, 4};
    std::multiset<double> seen;
    for (std::size_t d = 0; d < 5; ++d) {
        EXPECT_EQ(shards[d].size(), sizes[d]);
        EXPECT_EQ(shards[d].owner(), static_cast<int>(d));
        for (std::size_t i = 0; i < shards[d].size(); ++i) seen.insert(shards[d].features(i)[0]);
    }
    std::multiset<double> all;
    for (std::size_t i = 0; i < 23; ++i) all.insert(static_cast<double>(i));
    EXPECT_EQ(seen, all);
}

TEST(Sharding, NonIidShardsHoldFewLabels) {
    const DataShard pool = counting_pool(100, 10);
    RngStream g(2);
    const auto shards = shard_dataset(pool, 10, g, ShardPolicy::NonIid);
    for (const auto& s : shards) {
        std::set<int> labels(s.labels().begin(), s.labels().end());
        EXPECT_EQ(labels.size(), 1u);
    }
}

TEST(Sharding, RejectsTooFewExamples) {
    RngStream g(3);
    EXPECT_THROW(shard_dataset(counting_pool(3, 2), 4, g), std::invalid_argument);
    EXPECT_THROW(shard_dataset(counting_pool(3, 2), 0, g), std::invalid_argument);
}

TEST(Roles, RandomDrawHasConfiguredCounts) {
    const SimConfig c = base_config();
    RngStream g(4);
    for (std::uint64_t r = 1; r <= 50; ++r) {
        const auto a = assign_roles(r, c, iota_devices(20), g);
        EXPECT_EQ(a.workers.size(), 12u);
        EXPECT_EQ(a.validators.size(), 5u);
        EXPECT_EQ(a.miners.size(), 3u);
        EXPECT_EQ(a.roles.size(), 20u);
        EXPECT_FALSE(a.shrunk);
        EXPECT_TRUE(std::is_sorted(a.workers.begin(), a.workers.end()));
    }
}

TEST(Roles, ShrinkingGivesUpWorkerSlotsFirst) {
    const SimConfig c = base_config();
    RngStream g(5);
    const auto a = assign_roles(1, c, iota_devices(10), g);
    EXPECT_TRUE(a.shrunk);
    EXPECT_EQ(a.workers.size(), 2u);
    EXPECT_EQ(a.validators.size(), 5u);
    EXPECT_EQ(a.miners.size(), 3u);
    const auto b = assign_roles(1, c, iota_devices(4), g);
    EXPECT_EQ(b.workers.size(), 0u);
    EXPECT_EQ(b.validators.size(), 1u);
    EXPECT_EQ(b.miners.size(), 3u);
}

TEST(Roles, FixedSequenceCyclesAndSkipsIneligible) {
    SimConfig c = small_config();
    c.n_devices = 4;
    c.n_workers = 2;
    c.n_validators = 1;
    c.n_miners = 1;
    c.role_policy = RolePolicy::FixedSequence;
    c.role_sequence = {"WWVM", "MVWW"};
    RngStream g(6);
    EXPECT_EQ(assign_roles(1, c, {0, 1, 2, 3}, g).miners, std::vector<std::uint32_t>{3});
    EXPECT_EQ(assign_roles(2, c, {0, 1, 2, 3}, g).miners, std::vector<std::uint32_t>{0});
    EXPECT_EQ(assign_roles(3, c, {0, 1, 2, 3}, g).miners, std::vector<std::uint32_t>{3});
    const auto a = assign_roles(1, c, {1, 2, 3}, g);
    EXPECT_TRUE(a.shrunk);
    EXPECT_EQ(a.workers, std::vector<std::uint32_t>{1});
}

TEST(Association, EveryWorkerAndValidatorIsMapped) {
    RngStream g(7);
    const std::vector<std::uint32_t> w{0, 1, 2, 3}, v{4, 5}, m{6};
    const auto a = associate(w, v, m, g);
    ASSERT_TRUE(a.has_value());
    for (auto x : w) EXPECT_TRUE(a->worker_to_validator.at(x) == 4 || a->worker_to_validator.at(x) == 5);
    for (auto x : v) EXPECT_EQ(a->validator_to_miner.at(x), 6u);
    EXPECT_FALSE(associate(w, {}, m, g).has_value());
    EXPECT_FALSE(associate(w, v, {}, g).has_value());
}

TEST(Simulation, SameSeedSameRun) {
    const auto a = run_simulation(small_config());
    const auto b = run_simulation(small_config());
    ASSERT_EQ(a.rounds.size(), b.rounds.size());
    for (std::size_t i = 0; i < a.rounds.size(); ++i) {
        EXPECT_EQ(a.rounds[i].global_accuracy, b.rounds[i].global_accuracy);
        EXPECT_EQ(a.rounds[i].winner, b.rounds[i].winner);
        EXPECT_EQ(a.rounds[i].stakes, b.rounds[i].stakes);
    }
    EXPECT_TRUE(a.chain.same_as(b.chain));
}

TEST(Simulation, DifferentSeedDifferentChain) {
    SimConfig c = small_config();
    const auto a = run_simulation(c);
    c.seed = 2;
    const auto b = run_simulation(c);
    EXPECT_FALSE(a.chain.same_as(b.chain));
}

TEST(Simulation, ZeroRoundsLeavesOnlyGenesis) {
    const auto r = run_simulation(small_config(0));
    EXPECT_TRUE(r.rounds.empty());
    EXPECT_EQ(r.chain.size(), 1u);
    EXPECT_EQ(r.final_accuracy(), 0.0);
}

TEST(Simulation, StepPastTheEndThrows) {
    Simulator sim(small_config(1));
    sim.step();
    EXPECT_TRUE(sim.done());
    EXPECT_THROW(sim.step(), std::logic_error);
}

TEST(Simulation, IdealNetworkKeepsReplicasIdentical) {
    SimConfig c = small_config(6);
    c.malicious = last_k_devices(20, 3);
    Simulator sim(c);
    while (!sim.done()) {
        const auto out = sim.step();
        EXPECT_FALSE(out.metrics.forked);
        for (std::uint32_t d = 1; d < 20; ++d) EXPECT_TRUE(sim.chain(d).same_as(sim.chain(0)));
        for (std::uint32_t d = 1; d < 20; ++d) EXPECT_EQ(sim.ledger(d), sim.ledger(0));
        for (const auto& [id, s] : out.trace.ledger_before.stakes()) EXPECT_GE(out.trace.ledger_after.stake(id), s);
    }
}

TEST(Simulation, NoiseSaltChangesOnlyMaliciousUpdates) {
    SimConfig c = small_config(1);
    c.malicious = last_k_devices(20, 3);
    c.role_policy = RolePolicy::FixedSequence;
    c.role_sequence = {"VVVVVMMMWWWWWWWWWWWW"};
    SimConfig salted = c;
    salted.noise_salt = "x";
    Simulator a(c), b(salted);
    const auto ta = a.step().trace.worker_txs, tb = b.step().trace.worker_txs;
    ASSERT_EQ(ta.size(), 12u);
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        const auto& ua = ta[i].update.values;
        const auto& ub = tb[i].update.values;
        std::size_t differ = 0;
        for (std::size_t k = 0; k < ua.size(); ++k) differ += ua[k] != ub[k];
        if (c.is_malicious(a.index_of(ta[i].worker))) {
            EXPECT_GE(differ * 100, ua.size() * 99) << ta[i].worker.hex();
        } else {
            EXPECT_EQ(differ, 0u) << ta[i].worker.hex();
        }
    }
}

TEST(Simulation, AlwaysRejectedWorkersAreBlacklistedAfterKickR) {
    SimConfig c = small_config(8);
    c.vh = -1.0;  // every vad exceeds it, so every vote is Negative
    c.role_policy = RolePolicy::FixedSequence;
    c.role_sequence = {"WWWWWWWWWWWWVVVVVMMM"};
    Simulator sim(c);
    for (int r = 1; r <= 5; ++r) {
        sim.step();
        EXPECT_EQ(sim.eligible().size(), 20u) << "round " << r;
    }
    const auto sixth = sim.step();
    EXPECT_EQ(sixth.trace.application.newly_blacklisted.size(), 12u);
    EXPECT_EQ(sim.eligible(), (std::vector<std::uint32_t>{12, 13, 14, 15, 16, 17, 18, 19}));
    const auto seventh = sim.step();
    for (const auto& [d, role] : seventh.metrics.roles) EXPECT_GE(d, 12u);
    EXPECT_TRUE(seventh.metrics.skipped);  // no eligible device left in a worker slot
}

TEST(Simulation, VanillaUsesEveryDeviceAsWorker) {
    SimConfig c = small_config(2);
    c.mode = RunMode::Vanilla;
    Simulator sim(c);
    const auto out = sim.step();
    EXPECT_EQ(out.metrics.roles.size(), 20u);
    for (const auto& [d, r] : out.metrics.roles) EXPECT_EQ(r, Role::Worker);
    EXPECT_FALSE(out.metrics.winner.has_value());
}

TEST(Simulation, PowRaceRunsWithoutForksInIdealNetwork) {
    SimConfig c = small_config(5);
    c.consensus = ConsensusKind::Pow;
    const auto r = run_simulation(c);
    for (const auto& m : r.rounds) {
        EXPECT_FALSE(m.forked);
        EXPECT_TRUE(m.winner.has_value());
    }
}

TEST(Simulation, StakesGrowEveryRoundForSomeone) {
    const auto r = run_simulation(small_config(3));
    std::uint64_t prev = 0;
    for (const auto& m : r.rounds) {
        std::uint64_t total = 0;
        for (const auto& [id, s] : m.stakes) total += s;
        EXPECT_GT(total, prev);
        prev = total;
    }
}
