#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include "vbfl/dataset.hpp"
#include "vbfl/learning.hpp"

using namespace vbfl;

namespace {

DataShard two_blob_task(std::size_t per_class, std::uint64_t seed) {
    BlobSpec s;
    s.dim = 8;
    s.classes = 2;
    s.train_per_class = per_class;
    s.test_per_class = per_class;
    s.center_scale = 2.0;
    s.spread = 0.5;
    return make_blobs(s, seed).train;
}

// Cross-entropy of a softmax-regression model computed directly from the
// definition, used as an oracle for the analytic gradient.
double softmax_loss(const std::vector<double>& w, std::size_t d, std::size_t k, std::span<const double> x, int y) {
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
        z[c] = w[k * d + c];
        for (std::size_t i = 0; i < d; ++i) z[c] += w[c * d + i] * x[i];
    }
    double denom = 0.0;
    for (double v : z) denom += std::exp(v);
    return -std::log(std::exp(z[static_cast<std::size_t>(y)]) / denom);
}

}  // namespace

TEST(Architecture, ParamCountMatchesLayerArithmetic) {
    EXPECT_EQ(Architecture::softmax(784, 10).param_count(), 784u * 10 + 10);
    EXPECT_EQ(Architecture::mlp(32, 16, 10).param_count(), 32u * 16 + 16 + 16 * 10 + 10);
    EXPECT_FALSE(Architecture{{5}}.valid());
    EXPECT_FALSE(Architecture::softmax(4, 1).valid());
}

TEST(InitGlobalModel, DeterministicSmallAndSeedSensitive) {
    const auto arch = Architecture::mlp(6, 4, 3);
    const auto a = init_global_model(arch, 11);
    const auto b = init_global_model(arch, 11);
    const auto c = init_global_model(arch, 12);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.values, c.values);
    ASSERT_TRUE(a.consistent());
    for (double v : a.values) {
        EXPECT_GE(v, -0.05);
        EXPECT_LE(v, 0.05);
    }
    EXPECT_THROW(init_global_model(Architecture{{3}}, 1), std::invalid_argument);
}

TEST(LocalTrain, UpdateCountIsCeilOfShardOverBatch) {
    const DataShard one(2, 2, {0.5, -0.5}, {1});
    RngStream rng(3);
    const auto g = init_global_model(Architecture::softmax(2, 2), 1);
    EXPECT_EQ(train_local(g, one, {1, 0.01, 1}, rng).updates, 1u);

    const DataShard pool = two_blob_task(25, 4);  // 50 examples
    EXPECT_EQ(train_local(init_global_model(Architecture::softmax(8, 2), 1), pool, {3, 0.01, 7}, rng).updates,
              3u * ((50 + 6) / 7));
}

TEST(LocalTrain, RejectsInvalidSpecs) {
    const DataShard pool = two_blob_task(5, 4);
    const auto g = init_global_model(Architecture::softmax(8, 2), 1);
    RngStream rng(1);
    EXPECT_THROW(local_train(g, pool, {0, 0.01, 1}, rng), std::invalid_argument);
    EXPECT_THROW(local_train(g, pool, {1, 0.0, 1}, rng), std::invalid_argument);
    EXPECT_THROW(local_train(g, pool, {1, 0.01, 0}, rng), std::invalid_argument);
    EXPECT_THROW(local_train(g, pool, {1, 0.01, 11}, rng), std::invalid_argument);
    const auto wrong = init_global_model(Architecture::softmax(3, 2), 1);
    EXPECT_THROW(local_train(wrong, pool, {1, 0.01, 1}, rng), std::invalid_argument);
}

TEST(LocalTrain, DivergenceIsReportedNotSwallowed) {
    // Labels disagree with any linear rule, so the huge steps never settle.
    const DataShard pool(1, 2, {1e10, -1e10, 2e10, -2e10}, {1, 0, 0, 1});
    const auto g = init_global_model(Architecture::softmax(1, 2), 1);
    RngStream rng(1);
    EXPECT_THROW(local_train(g, pool, {20, 1e300, 1}, rng), TrainingDiverged);
}

TEST(LocalTrain, ImprovesSeparableTaskAndLeavesInputUntouched) {
    const DataShard pool = two_blob_task(40, 9);
    const auto g = init_global_model(Architecture::softmax(8, 2), 5);
    const auto before = g;
    RngStream rng(2);
    const auto trained = local_train(g, pool, {5, 0.01, 10}, rng);
    EXPECT_EQ(g, before);
    EXPECT_GT(evaluate(trained, pool), evaluate(g, pool));
    EXPECT_GT(evaluate(trained, pool), 0.9);
}

TEST(LocalTrain, DeterministicGivenStreamState) {
    const DataShard pool = two_blob_task(20, 9);
    const auto g = init_global_model(Architecture::mlp(8, 5, 2), 5);
    RngStream r1(77), r2(77);
    EXPECT_EQ(local_train(g, pool, {2, 0.01, 4}, r1), local_train(g, pool, {2, 0.01, 4}, r2));
}

TEST(LocalTrain, SingleStepMatchesFiniteDifferenceGradient) {
    // One example, batch 1, one epoch: the step equals -lr * dLoss/dw.
    const std::size_t d = 3, k = 4;
    const DataShard one(d, k, {0.3, -1.2, 0.8}, {2});
    auto g = init_global_model(Architecture::softmax(d, k), 21);
    const double lr = 0.1;
    RngStream rng(1);
    const auto next = local_train(g, one, {1, lr, 1}, rng);
    const std::vector<double> x{0.3, -1.2, 0.8};
    for (std::size_t j = 0; j < g.values.size(); ++j) {
        auto plus = g.values, minus = g.values;
        const double h = 1e-6;
        plus[j] += h;
        minus[j] -= h;
        const double grad = (softmax_loss(plus, d, k, x, 2) - softmax_loss(minus, d, k, x, 2)) / (2 * h);
        EXPECT_NEAR(next.values[j], g.values[j] - lr * grad, 1e-8) << "param " << j;
    }
}

TEST(LocalTrain, MlpStepMatchesFiniteDifferenceGradient) {
    const std::size_t d = 3, h = 4, k = 3;
    const std::vector<double> x{0.9, -0.4, 0.2};
    const DataShard one(d, k, x, {1});
    const auto g = init_global_model(Architecture::mlp(d, h, k), 8);
    auto loss_at = [&](const std::vector<double>& w) {
        ModelParams p{g.arch, w};
        detail::Forward f;
        detail::forward(p, x, f);
        const auto& z = f.act.back();
        double denom = 0.0;
        for (double v : z) denom += std::exp(v);
        return -std::log(std::exp(z[1]) / denom);
    };
    const double lr = 0.5;
    RngStream rng(1);
    const auto next = local_train(g, one, {1, lr, 1}, rng);
    for (std::size_t j = 0; j < g.values.size(); ++j) {
        auto plus = g.values, minus = g.values;
        const double eps = 1e-6;
        plus[j] += eps;
        minus[j] -= eps;
        const double grad = (loss_at(plus) - loss_at(minus)) / (2 * eps);
        EXPECT_NEAR(next.values[j], g.values[j] - lr * grad, 1e-7) << "param " << j;
    }
}

TEST(LocalTrain, ReadsOnlyItsOwnShard) {
    const DataShard mine = two_blob_task(10, 1);
    const DataShard other = two_blob_task(10, 2);
    mine.reset_reads();
    other.reset_reads();
    RngStream rng(4);
    local_train(init_global_model(Architecture::softmax(8, 2), 1), mine, {2, 0.01, 5}, rng);
    EXPECT_EQ(mine.reads(), 2 * mine.size());
    EXPECT_EQ(other.reads(), 0u);
}

TEST(Evaluate, PerfectModelScoresOne) {
    // Identity weights on a one-hot dataset predict every label.
    const std::size_t k = 4;
    std::vector<double> x;
    std::vector<int> y;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < k; ++i) x.push_back(i == c ? 1.0 : 0.0);
        y.push_back(static_cast<int>(c));
    }
    const DataShard data(k, k, x, y);
    ModelParams p{Architecture::softmax(k, k), std::vector<double>(k * k + k, 0.0)};
    for (std::size_t c = 0; c < k; ++c) p.values[c * k + c] = 1.0;
    EXPECT_DOUBLE_EQ(evaluate(p, data), 1.0);
}

TEST(Evaluate, ZeroModelPicksLowestClassOnTies) {
    BlobSpec s;
    s.dim = 5;
    s.classes = 10;
    s.train_per_class = 3;
    s.test_per_class = 7;
    const auto task = make_blobs(s, 3);
    const auto& test = task.test;
    const double class0 = static_cast<double>(std::count(test.labels().begin(), test.labels().end(), 0)) /
                          static_cast<double>(test.size());
    ModelParams zero{Architecture::softmax(5, 10), std::vector<double>(60, 0.0)};
    EXPECT_DOUBLE_EQ(evaluate(zero, test), class0);
    EXPECT_DOUBLE_EQ(evaluate(zero, test), evaluate(zero, test));
}

TEST(FedAvg, ArithmeticCases) {
    const auto arch = Architecture::softmax(2, 2);
    const ModelParams zeros{arch, std::vector<double>(6, 0.0)};
    const ModelParams twos{arch, std::vector<double>(6, 2.0)};
    const ModelParams fours{arch, std::vector<double>(6, 4.0)};

    const std::vector<WeightedUpdate> single{{twos, 5.0}};
    EXPECT_EQ(fedavg(single), twos);

    const std::vector<WeightedUpdate> even{{zeros, 1.0}, {twos, 1.0}};
    for (double v : fedavg(even).values) EXPECT_DOUBLE_EQ(v, 1.0);

    const std::vector<WeightedUpdate> skewed{{zeros, 1.0}, {fours, 3.0}};
    for (double v : fedavg(skewed).values) EXPECT_DOUBLE_EQ(v, 3.0);

    EXPECT_THROW(fedavg(std::span<const WeightedUpdate>{}), std::invalid_argument);
    const ModelParams other{Architecture::softmax(3, 2), std::vector<double>(8, 0.0)};
    const std::vector<WeightedUpdate> mixed{{zeros, 1.0}, {other, 1.0}};
    EXPECT_THROW(fedavg(mixed), std::invalid_argument);
}

TEST(FedAvg, PermutationInvariantAndIdempotentOnCopies) {
    const auto arch = Architecture::mlp(4, 3, 2);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ModelParams> models;
        std::vector<double> weights;
        for (int i = 0; i < 6; ++i) {
            ModelParams m{arch, std::vector<double>(arch.param_count())};
            for (auto& v : m.values) v = u(gen);
            models.push_back(m);
            weights.push_back(1.0 + 10.0 * (u(gen) + 1.0));
        }
        std::vector<WeightedUpdate> in;
        for (std::size_t i = 0; i < models.size(); ++i) in.push_back({models[i], weights[i]});
        const auto ref = fedavg(in);
        std::shuffle(in.begin(), in.end(), gen);
        const auto shuffled = fedavg(in);
        for (std::size_t j = 0; j < ref.values.size(); ++j) EXPECT_NEAR(ref.values[j], shuffled.values[j], 1e-12);

        std::vector<WeightedUpdate> copies(7, WeightedUpdate{models[0], 2.5});
        const auto same = fedavg(copies);
        for (std::size_t j = 0; j < same.values.size(); ++j) {
            EXPECT_NEAR(same.values[j], models[0].values[j], 1e-9 * std::max(1.0, std::abs(models[0].values[j])));
        }
    }
}

TEST(InjectGaussianNoise, MomentsMatchRequestedVariance) {
    const auto arch = Architecture::softmax(999, 20);  // 20000 entries
    ModelParams base{arch, std::vector<double>(arch.param_count(), 0.25)};
    RngStream rng(42);
    const auto noisy = inject_gaussian_noise(base, 1.0, rng);
    const auto n = static_cast<double>(base.values.size());
    double mean = 0.0;
    for (std::size_t j = 0; j < base.values.size(); ++j) mean += noisy.values[j] - base.values[j];
    mean /= n;
    double var = 0.0;
    for (std::size_t j = 0; j < base.values.size(); ++j) {
        const double e = noisy.values[j] - base.values[j] - mean;
        var += e * e;
    }
    var /= n - 1.0;
    EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 0.1);
    for (double v : base.values) EXPECT_EQ(v, 0.25);
}

TEST(InjectGaussianNoise, DeterministicAndRejectsZeroVariance) {
    const ModelParams base{Architecture::softmax(3, 2), std::vector<double>(8, 0.0)};
    RngStream a(9), b(9);
    EXPECT_EQ(inject_gaussian_noise(base, 0.5, a), inject_gaussian_noise(base, 0.5, b));
    EXPECT_THROW(inject_gaussian_noise(base, 0.0, a), std::invalid_argument);
    // Tiny variance keeps the output close to the input.
    const auto near = inject_gaussian_noise(base, 1e-12, a);
    for (double v : near.values) EXPECT_LT(std::abs(v), 1e-4);
}

TEST(Blobs, DeterministicBalancedAndShaped) {
    BlobSpec s;
    s.dim = 4;
    s.classes = 3;
    s.train_per_class = 5;
    s.test_per_class = 2;
    const auto a = make_blobs(s, 7);
    const auto b = make_blobs(s, 7);
    ASSERT_EQ(a.train.size(), 15u);
    ASSERT_EQ(a.test.size(), 6u);
    EXPECT_EQ(a.train.labels(), b.train.labels());
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        const auto x = a.train.features(i), y = b.train.features(i);
        EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
    }
    for (int c = 0; c < 3; ++c) EXPECT_EQ(std::count(a.train.labels().begin(), a.train.labels().end(), c), 5);
    s.spread = 0.0;
    EXPECT_THROW(make_blobs(s, 1), std::invalid_argument);
}

namespace {

void write_idx(const std::string& path, std::vector<std::uint32_t> dims, const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary);
    auto be32 = [&](std::uint32_t v) {
        const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
        out.write(b, 4);
    };
    be32(0x00000800u | static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) be32(d);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

}  // namespace

TEST(Idx, LoadsImagesScaledAndLabels) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string img = (dir / "vbfl_test_images.idx").string();
    const std::string lab = (dir / "vbfl_test_labels.idx").string();
    write_idx(img, {3, 2, 2}, {0, 255, 51, 102, 1, 2, 3, 4, 255, 255, 0, 0});
    write_idx(lab, {3}, {7, 0, 9});
    const auto shard = load_idx_shard(img, lab);
    ASSERT_EQ(shard.size(), 3u);
    EXPECT_EQ(shard.dim(), 4u);
    EXPECT_EQ(shard.labels(), (std::vector<int>{7, 0, 9}));
    EXPECT_DOUBLE_EQ(shard.features(0)[1], 1.0);
    EXPECT_DOUBLE_EQ(shard.features(0)[2], 0.2);
    EXPECT_EQ(load_idx_shard(img, lab, 10, 2).size(), 2u);

    write_idx(lab, {2}, {1, 2});
    EXPECT_THROW(load_idx_shard(img, lab), std::runtime_error);
    {
        std::ofstream bad(lab, std::ios::binary);
        bad.write("\x00\x00\x0d\x01", 4);
    }
    EXPECT_THROW(read_idx(lab), std::runtime_error);
    std::filesystem::remove(img);
    std::filesystem::remove(lab);
}
