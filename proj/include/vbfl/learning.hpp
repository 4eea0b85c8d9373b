// Local model representation: a small fully-connected classifier trained with
// plain minibatch SGD, plus FedAvg aggregation and the noise-injection attack.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace vbfl {

// Layer widths from input to output. Two entries describe softmax regression,
// three describe a one-hidden-layer ReLU network.
struct Architecture {
    std::vector<std::size_t> layers;

    static Architecture softmax(std::size_t inputs, std::size_t classes) { return {{inputs, classes}}; }
    static Architecture mlp(std::size_t inputs, std::size_t hidden, std::size_t classes) {
        return {{inputs, hidden, classes}};
    }

    bool valid() const {
        if (layers.size() < 2 || layers.size() > 3) return false;
        if (layers.back() < 2) return false;
        return std::all_of(layers.begin(), layers.end(), [](std::size_t n) { return n > 0; });
    }

    std::size_t input_dim() const { return layers.front(); }
    std::size_t num_classes() const { return layers.back(); }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l + 1 < layers.size(); ++l) n += layers[l + 1] * (layers[l] + 1);
        return n;
    }

    std::string describe() const {
        std::string s;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            if (l) s += "-";
            s += std::to_string(layers[l]);
        }
        return s;
    }

    bool operator==(const Architecture&) const = default;
};

// Flat parameter vector. Per layer: weights (out x in, row-major) then biases.
struct ModelParams {
    Architecture arch;
    std::vector<double> values;

    bool operator==(const ModelParams&) const = default;

    bool consistent() const { return arch.valid() && values.size() == arch.param_count(); }
    bool finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
};

// A device's private examples. Reads through features() are counted so tests
// can confirm which shards an operation touched.
class DataShard {
public:
    DataShard() = default;
    DataShard(std::size_t dim, std::size_t num_classes, std::vector<double> features, std::vector<int> labels,
              int owner = -1)
        : dim_(dim), num_classes_(num_classes), features_(std::move(features)), labels_(std::move(labels)),
          owner_(owner) {
        if (dim_ == 0 || features_.size() != dim_ * labels_.size()) {
            throw std::invalid_argument("DataShard: feature matrix does not match label count");
        }
        for (int y : labels_) {
            if (y < 0 || static_cast<std::size_t>(y) >= num_classes_) {
                throw std::invalid_argument("DataShard: label out of range");
            }
        }
    }

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    std::size_t dim() const { return dim_; }
    std::size_t num_classes() const { return num_classes_; }
    int owner() const { return owner_; }
    void set_owner(int owner) { owner_ = owner; }

    std::span<const double> features(std::size_t i) const {
        ++reads_;
        return {features_.data() + i * dim_, dim_};
    }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }

    // Copies the selected examples into a new shard without counting reads.
    DataShard subset(std::span<const std::size_t> indices, int owner) const {
        std::vector<double> x;
        std::vector<int> y;
        x.reserve(indices.size() * dim_);
        y.reserve(indices.size());
        for (auto i : indices) {
            x.insert(x.end(), features_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                     features_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
            y.push_back(labels_[i]);
        }
        return DataShard(dim_, num_classes_, std::move(x), std::move(y), owner);
    }

    std::size_t reads() const { return reads_; }
    void reset_reads() const { reads_ = 0; }

private:
    std::size_t dim_ = 0;
    std::size_t num_classes_ = 0;
    std::vector<double> features_;
    std::vector<int> labels_;
    int owner_ = -1;
    mutable std::size_t reads_ = 0;
};

struct TrainSpec {
    std::uint32_t epochs = 5;
    double learning_rate = 0.01;
    std::uint32_t batch_size = 10;
};

struct TrainOutcome {
    ModelParams params;
    std::size_t updates = 0;
    double last_epoch_loss = 0.0;
};

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline ModelParams init_global_model(const Architecture& arch, std::uint64_t seed) {
    if (!arch.valid()) throw std::invalid_argument("init_global_model: invalid architecture " + arch.describe());
    RngStream rng = make_substream(seed, "init");
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    ModelParams p{arch, std::vector<double>(arch.param_count())};
    for (auto& v : p.values) v = dist(rng);
    return p;
}

namespace detail {

// Activations per layer for one example; the last entry holds logits.
struct Forward {
    std::vector<std::vector<double>> act;
};

// Four independent partial sums so the compiler can keep several lanes busy.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline void forward(const ModelParams& p, std::span<const double> x, Forward& f) {
    const auto& L = p.arch.layers;
    f.act.resize(L.size());
    f.act[0].assign(x.begin(), x.end());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < L.size(); ++l) {
        const std::size_t in = L[l], out = L[l + 1];
        const double* W = p.values.data() + off;
        const double* b = W + out * in;
        auto& a = f.act[l + 1];
        a.resize(out);
        const auto& prev = f.act[l];
        const bool hidden = l + 2 < L.size();
        for (std::size_t o = 0; o < out; ++o) {
            a[o] = b[o] + dot(W + o * in, prev.data(), in);
            if (hidden) a[o] = std::max(0.0, a[o]);
        }
        off += out * (in + 1);
    }
}

inline std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[best]) best = k;
    }
    return best;
}

// Adds d(loss)/d(params) for one example into grad; returns the example loss.
inline double backprop(const ModelParams& p, std::span<const double> x, int label, Forward& f,
                       std::vector<std::vector<double>>& delta, std::vector<double>& grad) {
    const auto& L = p.arch.layers;
    forward(p, x, f);
    const auto& logits = f.act.back();
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    const double log_norm = mx + std::log(sum);
    const double loss = log_norm - logits[static_cast<std::size_t>(label)];

    delta.resize(L.size());
    auto& top = delta.back();
    top.resize(L.back());
    for (std::size_t k = 0; k < L.back(); ++k) {
        top[k] = std::exp(logits[k] - log_norm) - (static_cast<int>(k) == label ? 1.0 : 0.0);
    }

    std::vector<std::size_t> offsets(L.size() - 1);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < L.size(); ++l) {
        offsets[l] = off;
        off += L[l + 1] * (L[l] + 1);
    }

    for (std::size_t l = L.size() - 1; l-- > 0;) {
        const std::size_t in = L[l], out = L[l + 1];
        const double* W = p.values.data() + offsets[l];
        double* gW = grad.data() + offsets[l];
        double* gb = gW + out * in;
        const auto& prev = f.act[l];
        const auto& d = delta[l + 1];
        for (std::size_t o = 0; o < out; ++o) {
            double* grow = gW + o * in;
            for (std::size_t i = 0; i < in; ++i) grow[i] += d[o] * prev[i];
            gb[o] += d[o];
        }
        if (l > 0) {
            auto& dl = delta[l];
            dl.assign(in, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                const double* row = W + o * in;
                for (std::size_t i = 0; i < in; ++i) dl[i] += row[i] * d[o];
            }
            for (std::size_t i = 0; i < in; ++i) {
                if (prev[i] <= 0.0) dl[i] = 0.0;
            }
        }
    }
    return loss;
}

inline void require_compatible(const ModelParams& p, const DataShard& shard, const char* who) {
    if (!p.consistent()) throw std::invalid_argument(std::string(who) + ": inconsistent parameters");
    if (shard.empty()) throw std::invalid_argument(std::string(who) + ": empty shard");
    if (p.arch.input_dim() != shard.dim() || p.arch.num_classes() != shard.num_classes()) {
        throw std::invalid_argument(std::string(who) + ": model and data shapes differ");
    }
}

}  // namespace detail

inline TrainOutcome train_local(const ModelParams& start, const DataShard& shard, const TrainSpec& spec,
                                RngStream& rng) {
    detail::require_compatible(start, shard, "local_train");
    if (spec.epochs < 1) throw std::invalid_argument("local_train: epochs must be >= 1");
    if (!(spec.learning_rate > 0.0)) throw std::invalid_argument("local_train: learning rate must be positive");
    if (spec.batch_size < 1 || spec.batch_size > shard.size()) {
        throw std::invalid_argument("local_train: batch size must lie in [1, shard size]");
    }

    TrainOutcome out{start, 0, 0.0};
    ModelParams& p = out.params;
    std::vector<std::size_t> order(shard.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(p.values.size());
    detail::Forward f;
    std::vector<std::vector<double>> delta;

    for (std::uint32_t e = 0; e < spec.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += spec.batch_size) {
            const std::size_t end = std::min(order.size(), begin + spec.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = order[k];
                batch_loss += detail::backprop(p, shard.features(i), shard.label(i), f, delta, grad);
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingDiverged("local_train: non-finite loss (learning rate too large?)");
            }
            const double step = spec.learning_rate / static_cast<double>(end - begin);
            for (std::size_t j = 0; j < grad.size(); ++j) p.values[j] -= step * grad[j];
            epoch_loss += batch_loss;
            ++out.updates;
        }
        out.last_epoch_loss = epoch_loss / static_cast<double>(order.size());
    }
    if (!p.finite()) throw TrainingDiverged("local_train: parameters became non-finite");
    return out;
}

inline ModelParams local_train(const ModelParams& start, const DataShard& shard, const TrainSpec& spec,
                               RngStream& rng) {
    return train_local(start, shard, spec, rng).params;
}

inline std::size_t predict(const ModelParams& params, std::span<const double> x) {
    detail::Forward f;
    detail::forward(params, x, f);
    return detail::argmax_lowest(f.act.back());
}

// Fraction of correctly classified examples; argmax ties go to the lowest class.
inline double evaluate(const ModelParams& params, const DataShard& test) {
    detail::require_compatible(params, test, "evaluate");
    detail::Forward f;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        detail::forward(params, test.features(i), f);
        if (detail::argmax_lowest(f.act.back()) == static_cast<std::size_t>(test.label(i))) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

struct WeightedUpdate {
    std::reference_wrapper<const ModelParams> params;
    double weight;
};

inline ModelParams fedavg(std::span<const WeightedUpdate> updates) {
    if (updates.empty()) throw std::invalid_argument("fedavg: no updates");
    const ModelParams& first = updates.front().params.get();
    double total = 0.0;
    for (const auto& u : updates) {
        if (!(u.weight > 0.0)) throw std::invalid_argument("fedavg: weights must be positive");
        if (!(u.params.get().arch == first.arch) || !u.params.get().consistent()) {
            throw std::invalid_argument("fedavg: architecture mismatch");
        }
        total += u.weight;
    }
    ModelParams out{first.arch, std::vector<double>(first.values.size(), 0.0)};
    for (const auto& u : updates) {
        const double w = u.weight / total;
        const auto& v = u.params.get().values;
        for (std::size_t j = 0; j < v.size(); ++j) out.values[j] += w * v[j];
    }
    return out;
}

inline ModelParams inject_gaussian_noise(const ModelParams& params, double variance, RngStream& rng) {
    if (!(variance > 0.0)) throw std::invalid_argument("inject_gaussian_noise: variance must be positive");
    std::normal_distribution<double> noise(0.0, std::sqrt(variance));
    ModelParams out = params;
    for (auto& v : out.values) v += noise(rng);
    return out;
}

}  // namespace vbfl
