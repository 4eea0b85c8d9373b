// Transactions, blocks, the hash-linked chain and the pluggable signer.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crypto.hpp"
#include "learning.hpp"

namespace vbfl {

// A device is identified by its public key. Ordering is lexicographic on the
// key bytes and is the tie-break order everywhere in the protocol.
struct DeviceId {
    Bytes key;

    static DeviceId from_index(std::uint32_t index) {
        DeviceId id;
        id.key.resize(8, 0);
        for (int i = 0; i < 4; ++i) id.key[7 - i] = static_cast<std::uint8_t>(index >> (8 * i));
        return id;
    }

    std::string hex() const { return to_hex(key); }

    auto operator<=>(const DeviceId&) const = default;
    bool operator==(const DeviceId&) const = default;
};

enum class Vote : std::uint8_t { Negative = 0, Positive = 1 };

inline char vote_char(Vote v) { return v == Vote::Positive ? 'P' : 'N'; }

struct WorkerTransaction {
    std::uint64_t round = 0;
    DeviceId worker;
    ModelParams update;
    std::uint64_t expected_reward = 0;
    std::uint32_t epochs = 0;
    std::uint64_t train_size = 0;
    Bytes signature;

    bool operator==(const WorkerTransaction&) const = default;
};

// `vote` is empty when the validator could not verify the inner transaction;
// it still earns the verification reward but casts no vote.
struct ValidatorTransaction {
    std::uint64_t round = 0;
    DeviceId validator;
    WorkerTransaction inner;
    std::optional<Vote> vote;
    std::uint64_t verify_reward = 0;
    std::uint64_t vali_reward = 0;
    Bytes signature;

    bool operator==(const ValidatorTransaction&) const = default;
};

struct VoteTally {
    WorkerTransaction worker_tx;
    std::uint32_t positives = 0;
    std::uint32_t negatives = 0;
    std::vector<DeviceId> voters;  // sorted

    const DeviceId& worker() const { return worker_tx.worker; }
    bool qualified() const { return positives >= negatives; }

    bool operator==(const VoteTally&) const = default;
};

struct Block {
    std::uint64_t round = 0;
    DeviceId miner;
    Digest prev_hash{};
    Digest init_model_hash{};  // set only on the genesis block
    std::vector<VoteTally> tallies;
    std::uint64_t miner_reward = 0;
    std::map<DeviceId, std::uint64_t> validator_rewards;
    std::uint64_t nonce = 0;
    Digest content_hash{};
    Bytes signature;

    bool operator==(const Block&) const = default;
};

using BlockPtr = std::shared_ptr<const Block>;

enum class SignatureMode {
    Emulated,  // every signature verifies
    Keyed,     // HMAC-SHA256 under the device secret, recomputed on verify
};

class UnknownSigner : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Signing is always HMAC-SHA256(secret, payload). In Emulated mode verification
// short-circuits to true, mirroring an emulation where signatures are assumed valid.
class SignatureScheme {
public:
    explicit SignatureScheme(SignatureMode mode = SignatureMode::Emulated) : mode_(mode) {}

    SignatureMode mode() const { return mode_; }

    void register_device(const DeviceId& id, Bytes secret) { secrets_[id] = std::move(secret); }
    bool registered(const DeviceId& id) const { return secrets_.count(id) != 0; }

    Bytes sign(std::span<const std::uint8_t> payload, const DeviceId& device) const {
        auto it = secrets_.find(device);
        if (it == secrets_.end()) throw UnknownSigner("sign: device " + device.hex() + " is not registered");
        const Digest mac = hmac_sha256(it->second, payload);
        return Bytes(mac.begin(), mac.end());
    }

    bool verify(std::span<const std::uint8_t> payload, const DeviceId& device,
                std::span<const std::uint8_t> signature) const {
        if (mode_ == SignatureMode::Emulated) return true;
        auto it = secrets_.find(device);
        if (it == secrets_.end()) return false;
        const Digest mac = hmac_sha256(it->second, payload);
        return signature.size() == mac.size() && std::equal(mac.begin(), mac.end(), signature.begin());
    }

private:
    SignatureMode mode_;
    std::map<DeviceId, Bytes> secrets_;
};

enum class ChainErrorKind { HashMismatch, BadSignature, BlacklistedMiner, RoundNotIncreasing, BadContentHash };

inline const char* to_string(ChainErrorKind k) {
    switch (k) {
        case ChainErrorKind::HashMismatch: return "prev_hash does not match chain tip";
        case ChainErrorKind::BadSignature: return "block signature does not verify";
        case ChainErrorKind::BlacklistedMiner: return "block mined by a blacklisted miner";
        case ChainErrorKind::RoundNotIncreasing: return "block round does not advance the chain";
        case ChainErrorKind::BadContentHash: return "block content hash is wrong";
    }
    return "unknown chain error";
}

class ChainError : public std::runtime_error {
public:
    explicit ChainError(ChainErrorKind kind) : std::runtime_error(to_string(kind)), kind_(kind) {}
    ChainErrorKind kind() const { return kind_; }

private:
    ChainErrorKind kind_;
};

// Blocks are immutable once appended and shared between device replicas.
class Blockchain {
public:
    const std::vector<BlockPtr>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    const Block& tip() const { return *blocks_.back(); }

    // All-zero sentinel before genesis.
    Digest tip_hash() const { return blocks_.empty() ? Digest{} : blocks_.back()->content_hash; }

    void push(BlockPtr b) { blocks_.push_back(std::move(b)); }

    bool same_as(const Blockchain& other) const {
        if (blocks_.size() != other.blocks_.size()) return false;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            if (blocks_[i]->content_hash != other.blocks_[i]->content_hash) return false;
        }
        return true;
    }

private:
    std::vector<BlockPtr> blocks_;
};

}  // namespace vbfl
