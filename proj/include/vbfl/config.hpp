// Experiment description and its key = value file format.
//
// One experiment per file. Blank lines and text after '#' are ignored; each
// remaining line is `key = value`. Unknown keys are errors. See README.md for
// the full key list.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "learning.hpp"
#include "protocol.hpp"
#include "validation.hpp"

namespace vbfl {

enum class Role : std::uint8_t { Worker, Validator, Miner };

inline char role_char(Role r) { return r == Role::Worker ? 'W' : r == Role::Validator ? 'V' : 'M'; }

enum class RunMode { Vbfl, Vanilla };
enum class ConsensusKind { Pos, Pow };
enum class PowMode { Race, Nonce };
enum class RolePolicy { RandomEachRound, FixedSequence };
enum class DatasetKind { Blobs, Idx };
enum class ModelKind { Softmax, Mlp };
enum class TestSetPolicy { SharedFull, Sharded };
enum class ShardPolicy { Iid, NonIid };

struct NetworkSpec {
    double link_delay = 0.0;           // simulated seconds per hop
    double jitter = 0.0;               // extra uniform [0, jitter] per message
    std::optional<double> block_wait;  // propagated-block-wait-time; nullopt = unlimited

    bool ideal() const { return link_delay == 0.0 && jitter == 0.0 && !block_wait; }
};

struct DatasetSpec {
    DatasetKind kind = DatasetKind::Blobs;
    BlobSpec blobs;
    std::string idx_train_images, idx_train_labels, idx_test_images, idx_test_labels;
    std::size_t idx_train_limit = 0;
    std::size_t idx_test_limit = 0;
};

struct SimConfig {
    std::string name = "custom";
    RunMode mode = RunMode::Vbfl;

    std::uint32_t n_devices = 20;
    std::uint32_t n_workers = 12;
    std::uint32_t n_validators = 5;
    std::uint32_t n_miners = 3;

    std::set<std::uint32_t> malicious;  // device indices
    bool worker_noise = true;
    bool validator_flip = false;
    double noise_variance = 1.0;

    std::optional<double> vh;                          // uniform validator threshold
    std::map<std::uint32_t, double> vh_per_validator;  // optional overrides by device index
    ValidationScheme validation = ValidationScheme::OneEpochProxy;

    std::uint32_t kick_r = 6;
    std::uint64_t unit_reward = 1;
    TrainSpec train{5, 0.01, 10};

    ConsensusKind consensus = ConsensusKind::Pos;
    std::uint32_t pow_difficulty = 1;
    PowMode pow_mode = PowMode::Race;
    std::vector<double> hash_rates;  // by device index; empty = all 1.0

    std::uint32_t rounds = 100;
    std::uint64_t seed = 1;
    std::string noise_salt;  // perturbs only the noise substreams

    NetworkSpec network;
    DatasetSpec dataset;
    ModelKind model = ModelKind::Softmax;
    std::size_t hidden = 32;

    RolePolicy role_policy = RolePolicy::RandomEachRound;
    std::vector<std::string> role_sequence;  // per round, one of W/V/M per device; cycles

    TestSetPolicy test_set = TestSetPolicy::SharedFull;
    ShardPolicy sharding = ShardPolicy::Iid;
    SignatureMode signatures = SignatureMode::Emulated;

    double threshold_for(std::uint32_t device) const {
        auto it = vh_per_validator.find(device);
        if (it != vh_per_validator.end()) return it->second;
        return vh.value_or(1.0);
    }
    bool is_malicious(std::uint32_t device) const { return malicious.count(device) != 0; }
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error("config key '" + key + "': " + msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Checks every cross-field invariant; throws ConfigError naming the key.
inline void validate_config(const SimConfig& c) {
    if (c.n_devices == 0) throw ConfigError("devices", "must be positive");
    if (c.mode == RunMode::Vbfl) {
        if (c.n_workers < 1) throw ConfigError("workers", "at least one worker is required");
        if (c.n_validators < 1) throw ConfigError("validators", "at least one validator is required");
        if (c.n_miners < 1) throw ConfigError("miners", "at least one miner is required");
        if (c.n_workers + c.n_validators + c.n_miners != c.n_devices) {
            throw ConfigError("workers", "workers + validators + miners must equal devices");
        }
    }
    for (auto m : c.malicious) {
        if (m >= c.n_devices) throw ConfigError("malicious_ids", "index " + std::to_string(m) + " out of range");
    }
    if (!(c.noise_variance > 0.0)) throw ConfigError("noise_variance", "must be positive");
    if (c.vh && !(*c.vh >= -1.0 && *c.vh <= 1.0 + 1e-12)) {
        // vad lies in [-1, 1]; thresholds outside that range are almost surely typos.
        throw ConfigError("vh", "must lie in [-1, 1]");
    }
    for (const auto& [d, t] : c.vh_per_validator) {
        if (d >= c.n_devices) throw ConfigError("vh_per_validator", "device index out of range");
        (void)t;
    }
    if (c.kick_r == 0) throw ConfigError("kick_r", "must be positive");
    if (c.unit_reward == 0) throw ConfigError("unit_reward", "must be positive");
    if (c.train.epochs == 0) throw ConfigError("epochs", "must be positive");
    if (!(c.train.learning_rate > 0.0)) throw ConfigError("learning_rate", "must be positive");
    if (c.train.batch_size == 0) throw ConfigError("batch_size", "must be positive");
    if (c.pow_difficulty > 64) throw ConfigError("pow_difficulty", "exceeds 64 hex digits");
    if (!c.hash_rates.empty()) {
        if (c.hash_rates.size() != c.n_devices) throw ConfigError("hash_rates", "need one rate per device");
        for (double r : c.hash_rates) {
            if (!(r > 0.0)) throw ConfigError("hash_rates", "rates must be positive");
        }
    }
    if (c.network.link_delay < 0.0) throw ConfigError("link_delay", "must be non-negative");
    if (c.network.jitter < 0.0) throw ConfigError("jitter", "must be non-negative");
    if (c.network.block_wait && *c.network.block_wait < 0.0) throw ConfigError("block_wait", "must be non-negative");
    if (c.model == ModelKind::Mlp && c.hidden == 0) throw ConfigError("hidden", "must be positive");
    if (c.dataset.kind == DatasetKind::Blobs) {
        const auto& b = c.dataset.blobs;
        if (b.dim == 0) throw ConfigError("blob_dim", "must be positive");
        if (b.classes < 2) throw ConfigError("blob_classes", "need at least two classes");
        if (b.train_per_class == 0) throw ConfigError("blob_train_per_class", "must be positive");
        if (b.test_per_class == 0) throw ConfigError("blob_test_per_class", "must be positive");
        if (!(b.spread > 0.0)) throw ConfigError("blob_spread", "must be positive");
        if (!(b.center_scale > 0.0)) throw ConfigError("blob_center_scale", "must be positive");
        if (b.train_per_class * b.classes < c.n_devices) {
            throw ConfigError("blob_train_per_class", "dataset smaller than the number of devices");
        }
    } else {
        if (c.dataset.idx_train_images.empty() || c.dataset.idx_train_labels.empty() ||
            c.dataset.idx_test_images.empty() || c.dataset.idx_test_labels.empty()) {
            throw ConfigError("idx_train_images", "idx datasets need all four file paths");
        }
    }
    if (c.role_policy == RolePolicy::FixedSequence) {
        if (c.role_sequence.empty()) throw ConfigError("role_sequence", "fixed role policy needs a sequence");
        for (const auto& s : c.role_sequence) {
            if (s.size() != c.n_devices) throw ConfigError("role_sequence", "each entry needs one role per device");
            std::uint32_t w = 0, v = 0, m = 0;
            for (char ch : s) {
                if (ch == 'W') ++w;
                else if (ch == 'V') ++v;
                else if (ch == 'M') ++m;
                else throw ConfigError("role_sequence", "roles must be W, V or M");
            }
            if (w != c.n_workers || v != c.n_validators || m != c.n_miners) {
                throw ConfigError("role_sequence", "entry does not match the role counts");
            }
        }
    }
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
        std::size_t pos = 0;
        const auto n = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
}

inline std::uint32_t to_u32(const std::string& key, const std::string& v) {
    const auto n = to_u64(key, v);
    if (n > 0xffffffffULL) throw ConfigError(key, "value too large");
    return static_cast<std::uint32_t>(n);
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

}  // namespace detail

// Picks the `k` highest device indices as malicious. Presets use this so the
// set is fixed and visible in the manifest.
inline std::set<std::uint32_t> last_k_devices(std::uint32_t n_devices, std::uint32_t k) {
    if (k > n_devices) throw ConfigError("malicious", "more malicious devices than devices");
    std::set<std::uint32_t> s;
    for (std::uint32_t i = n_devices - k; i < n_devices; ++i) s.insert(i);
    return s;
}

inline void apply_setting(SimConfig& c, const std::string& key, const std::string& value) {
    using namespace detail;
    const std::string& v = value;
    if (key == "name") c.name = v;
    else if (key == "mode") {
        if (v == "vbfl") c.mode = RunMode::Vbfl;
        else if (v == "vanilla") c.mode = RunMode::Vanilla;
        else throw ConfigError(key, "expected vbfl or vanilla");
    } else if (key == "devices") c.n_devices = to_u32(key, v);
    else if (key == "workers") c.n_workers = to_u32(key, v);
    else if (key == "validators") c.n_validators = to_u32(key, v);
    else if (key == "miners") c.n_miners = to_u32(key, v);
    else if (key == "malicious") c.malicious = last_k_devices(c.n_devices, to_u32(key, v));
    else if (key == "malicious_ids") {
        c.malicious.clear();
        for (const auto& s : split(v, ',')) c.malicious.insert(to_u32(key, s));
    } else if (key == "worker_noise") c.worker_noise = to_bool(key, v);
    else if (key == "validator_flip") c.validator_flip = to_bool(key, v);
    else if (key == "noise_variance") c.noise_variance = to_double(key, v);
    else if (key == "vh") c.vh = to_double(key, v);
    else if (key == "vh_per_validator") {
        c.vh_per_validator.clear();
        for (const auto& item : split(v, ',')) {
            const auto parts = split(item, ':');
            if (parts.size() != 2) throw ConfigError(key, "expected index:threshold pairs");
            c.vh_per_validator[to_u32(key, parts[0])] = to_double(key, parts[1]);
        }
    } else if (key == "validation_scheme") {
        if (v == "proxy") c.validation = ValidationScheme::OneEpochProxy;
        else if (v == "legacy") c.validation = ValidationScheme::Legacy;
        else throw ConfigError(key, "expected proxy or legacy");
    } else if (key == "kick_r") c.kick_r = to_u32(key, v);
    else if (key == "unit_reward") c.unit_reward = to_u64(key, v);
    else if (key == "epochs") c.train.epochs = to_u32(key, v);
    else if (key == "learning_rate") c.train.learning_rate = to_double(key, v);
    else if (key == "batch_size") c.train.batch_size = to_u32(key, v);
    else if (key == "consensus") {
        if (v == "pos") c.consensus = ConsensusKind::Pos;
        else if (v == "pow") c.consensus = ConsensusKind::Pow;
        else throw ConfigError(key, "expected pos or pow");
    } else if (key == "pow_difficulty") c.pow_difficulty = to_u32(key, v);
    else if (key == "pow_mode") {
        if (v == "race") c.pow_mode = PowMode::Race;
        else if (v == "nonce") c.pow_mode = PowMode::Nonce;
        else throw ConfigError(key, "expected race or nonce");
    } else if (key == "hash_rates") {
        c.hash_rates.clear();
        for (const auto& s : split(v, ',')) c.hash_rates.push_back(to_double(key, s));
    } else if (key == "rounds") c.rounds = to_u32(key, v);
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "noise_salt") c.noise_salt = v;
    else if (key == "link_delay") c.network.link_delay = to_double(key, v);
    else if (key == "jitter") c.network.jitter = to_double(key, v);
    else if (key == "block_wait") {
        if (v == "unlimited" || v == "inf") c.network.block_wait.reset();
        else c.network.block_wait = to_double(key, v);
    } else if (key == "dataset") {
        if (v == "blobs") c.dataset.kind = DatasetKind::Blobs;
        else if (v == "idx") c.dataset.kind = DatasetKind::Idx;
        else throw ConfigError(key, "expected blobs or idx");
    } else if (key == "blob_dim") c.dataset.blobs.dim = to_u32(key, v);
    else if (key == "blob_classes") c.dataset.blobs.classes = to_u32(key, v);
    else if (key == "blob_train_per_class") c.dataset.blobs.train_per_class = to_u32(key, v);
    else if (key == "blob_test_per_class") c.dataset.blobs.test_per_class = to_u32(key, v);
    else if (key == "blob_spread") c.dataset.blobs.spread = to_double(key, v);
    else if (key == "blob_center_scale") c.dataset.blobs.center_scale = to_double(key, v);
    else if (key == "blob_offset") c.dataset.blobs.offset = to_double(key, v);
    else if (key == "idx_train_images") c.dataset.idx_train_images = v;
    else if (key == "idx_train_labels") c.dataset.idx_train_labels = v;
    else if (key == "idx_test_images") c.dataset.idx_test_images = v;
    else if (key == "idx_test_labels") c.dataset.idx_test_labels = v;
    else if (key == "idx_train_limit") c.dataset.idx_train_limit = to_u32(key, v);
    else if (key == "idx_test_limit") c.dataset.idx_test_limit = to_u32(key, v);
    else if (key == "model") {
        if (v == "softmax") c.model = ModelKind::Softmax;
        else if (v == "mlp") c.model = ModelKind::Mlp;
        else throw ConfigError(key, "expected softmax or mlp");
    } else if (key == "hidden") c.hidden = to_u32(key, v);
    else if (key == "role_policy") {
        if (v == "random") c.role_policy = RolePolicy::RandomEachRound;
        else if (v == "fixed") c.role_policy = RolePolicy::FixedSequence;
        else throw ConfigError(key, "expected random or fixed");
    } else if (key == "role_sequence") c.role_sequence = split(v, ';');
    else if (key == "test_set") {
        if (v == "shared") c.test_set = TestSetPolicy::SharedFull;
        else if (v == "sharded") c.test_set = TestSetPolicy::Sharded;
        else throw ConfigError(key, "expected shared or sharded");
    } else if (key == "sharding") {
        if (v == "iid") c.sharding = ShardPolicy::Iid;
        else if (v == "noniid") c.sharding = ShardPolicy::NonIid;
        else throw ConfigError(key, "expected iid or noniid");
    } else if (key == "signatures") {
        if (v == "emulated") c.signatures = SignatureMode::Emulated;
        else if (v == "keyed") c.signatures = SignatureMode::Keyed;
        else throw ConfigError(key, "expected emulated or keyed");
    } else {
        throw ConfigError(key, "unknown key");
    }
}

// `malicious = k` is resolved after the whole file is read, so it may appear
// before or after `devices`.
inline void apply_config_text(SimConfig& c, std::istream& in) {
    std::string line;
    std::optional<std::string> malicious_count;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "malicious") {
            malicious_count = value;
        } else {
            apply_setting(c, key, value);
        }
    }
    if (malicious_count) apply_setting(c, "malicious", *malicious_count);
}

inline SimConfig load_config_file(const std::string& path, SimConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    apply_config_text(base, in);
    return base;
}

inline Architecture architecture_for(const SimConfig& c, std::size_t input_dim, std::size_t classes) {
    return c.model == ModelKind::Softmax ? Architecture::softmax(input_dim, classes)
                                         : Architecture::mlp(input_dim, c.hidden, classes);
}

}  // namespace vbfl
