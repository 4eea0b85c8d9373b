// Validator voting: each validator trains one epoch on its own data to get a
// reference accuracy, then votes Negative on any update whose accuracy falls
// more than its threshold below that reference.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "learning.hpp"
#include "protocol.hpp"

namespace vbfl {

enum class ValidationScheme {
    OneEpochProxy,  // vad = A(one-epoch self-trained model) - A(update)
    Legacy,         // vad = A(G_{j-1}) - A(update); kept only to reproduce its failure
};

struct ValidatorState {
    DeviceId validator;
    double pretrain_acc = 0.0;
    double threshold = 0.0;
    const DataShard* test = nullptr;
    const DataShard* train = nullptr;
    std::uint64_t pretrained_round = 0;  // 0 = not yet pretrained
};

struct VoteDecision {
    std::uint64_t vali_reward = 0;
    Vote vote = Vote::Positive;
    double vad = 0.0;
};

struct VadRecord {
    std::uint64_t round = 0;
    DeviceId validator;
    DeviceId worker;
    double vad = 0.0;
    Vote vote = Vote::Positive;
    bool worker_malicious = false;
};

// One epoch of legitimate training from the round's global model, evaluated
// on the validator's test set. Must run before any vote in `round`.
inline ValidatorState pretrain_one_epoch(const ModelParams& global, ValidatorState state, const TrainSpec& spec,
                                         RngStream& rng, std::uint64_t round) {
    if (state.train == nullptr || state.test == nullptr) {
        throw std::invalid_argument("pretrain_one_epoch: validator has no data");
    }
    TrainSpec one = spec;
    one.epochs = 1;
    const ModelParams local = local_train(global, *state.train, one, rng);
    state.pretrain_acc = evaluate(local, *state.test);
    state.pretrained_round = round;
    return state;
}

// Legacy reference: accuracy of the previous global model itself.
inline ValidatorState reference_from_global(const ModelParams& global, ValidatorState state, std::uint64_t round) {
    if (state.test == nullptr) throw std::invalid_argument("reference_from_global: validator has no test set");
    state.pretrain_acc = evaluate(global, *state.test);
    state.pretrained_round = round;
    return state;
}

inline Vote vote_for(double vad, double threshold) { return vad > threshold ? Vote::Negative : Vote::Positive; }

inline VoteDecision validate_by_voting(const ModelParams& update, const ValidatorState& state,
                                       std::uint64_t unit_reward) {
    if (state.pretrained_round == 0) throw std::logic_error("validate_by_voting: validator has not pretrained");
    VoteDecision d;
    d.vad = state.pretrain_acc - evaluate(update, *state.test);
    d.vote = vote_for(d.vad, state.threshold);
    d.vali_reward = unit_reward;
    return d;
}

inline Vote malicious_flip(Vote v) { return v == Vote::Positive ? Vote::Negative : Vote::Positive; }

inline void write_vad_csv(std::ostream& out, std::span<const VadRecord> records) {
    out << "round,validator,worker,vad,vote,worker_malicious\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.6f", r.vad);
        out << r.round << ',' << r.validator.hex() << ',' << r.worker.hex() << ',' << buf << ','
            << vote_char(r.vote) << ',' << (r.worker_malicious ? 1 : 0) << '\n';
    }
}

// Linear-interpolated percentile, q in [0, 100].
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct ThresholdSuggestion {
    double legit_p90 = 0.0;
    double malicious_p10 = 0.0;
    double threshold = 0.0;
    std::size_t legit_count = 0;
    std::size_t malicious_count = 0;
};

// Midpoint between the 90th percentile of legitimate-worker vad and the 10th
// percentile of malicious-worker vad. Empty when either class has no records.
inline std::optional<ThresholdSuggestion> suggest_threshold(std::span<const VadRecord> records) {
    std::vector<double> legit, bad;
    for (const auto& r : records) (r.worker_malicious ? bad : legit).push_back(r.vad);
    if (legit.empty() || bad.empty()) return std::nullopt;
    ThresholdSuggestion s;
    s.legit_count = legit.size();
    s.malicious_count = bad.size();
    s.legit_p90 = percentile(legit, 90.0);
    s.malicious_p10 = percentile(bad, 10.0);
    s.threshold = 0.5 * (s.legit_p90 + s.malicious_p10);
    return s;
}

// Fractions of malicious records strictly above t and legitimate records at or below t.
struct SeparationAt {
    double malicious_above = 0.0;
    double legit_below = 0.0;
};

inline SeparationAt separation_at(std::span<const VadRecord> records, double t) {
    std::size_t bad = 0, bad_above = 0, legit = 0, legit_below = 0;
    for (const auto& r : records) {
        if (r.worker_malicious) {
            ++bad;
            if (r.vad > t) ++bad_above;
        } else {
            ++legit;
            if (r.vad <= t) ++legit_below;
        }
    }
    SeparationAt s;
    if (bad) s.malicious_above = static_cast<double>(bad_above) / static_cast<double>(bad);
    if (legit) s.legit_below = static_cast<double>(legit_below) / static_cast<double>(legit);
    return s;
}

}  // namespace vbfl
