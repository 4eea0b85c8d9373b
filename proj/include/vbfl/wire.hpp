// Canonical byte encoding of transactions and blocks (layout in docs/wire-format.md).
//
// All integers are little-endian, reals are IEEE-754 binary64 bit patterns,
// variable-length fields carry a u32 length prefix. The encoding of a value is
// its signing payload followed by its signature, so a signer and verifier never
// disagree about what was signed.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>

#include "protocol.hpp"

namespace vbfl {

namespace wire {

inline constexpr std::uint8_t kWorkerTxTag = 0x57;     // 'W'
inline constexpr std::uint8_t kValidatorTxTag = 0x56;  // 'V'
inline constexpr std::uint8_t kTallyTag = 0x54;        // 'T'
inline constexpr std::uint8_t kBlockTag = 0x42;        // 'B'
inline constexpr std::uint8_t kNoVote = 0xff;

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::span<const std::uint8_t> b) {
        u32(static_cast<std::uint32_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
    }
    void digest(const Digest& d) { out_.insert(out_.end(), d.begin(), d.end()); }

    Bytes take() { return std::move(out_); }
    const Bytes& view() const { return out_; }

private:
    Bytes out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    Bytes bytes() {
        const std::uint32_t n = u32();
        need(n);
        Bytes b(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return b;
    }
    Digest digest() {
        need(32);
        Digest d{};
        std::memcpy(d.data(), in_.data() + pos_, 32);
        pos_ += 32;
        return d;
    }
    void expect_tag(std::uint8_t tag, const char* what) {
        if (u8() != tag) throw DecodeError(std::string("wire: bad tag for ") + what);
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw DecodeError("wire: truncated input");
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline void put(Writer& w, const DeviceId& id) { w.bytes(id.key); }

inline void put(Writer& w, const ModelParams& p) {
    w.u32(static_cast<std::uint32_t>(p.arch.layers.size()));
    for (auto n : p.arch.layers) w.u64(n);
    w.u64(p.values.size());
    for (double v : p.values) w.f64(v);
}

inline void put_payload(Writer& w, const WorkerTransaction& tx) {
    w.u8(kWorkerTxTag);
    w.u64(tx.round);
    put(w, tx.worker);
    put(w, tx.update);
    w.u64(tx.expected_reward);
    w.u32(tx.epochs);
    w.u64(tx.train_size);
}

inline void put(Writer& w, const WorkerTransaction& tx) {
    put_payload(w, tx);
    w.bytes(tx.signature);
}

inline void put_payload(Writer& w, const ValidatorTransaction& tx) {
    w.u8(kValidatorTxTag);
    w.u64(tx.round);
    put(w, tx.validator);
    put(w, tx.inner);
    w.u8(tx.vote ? static_cast<std::uint8_t>(*tx.vote) : kNoVote);
    w.u64(tx.verify_reward);
    w.u64(tx.vali_reward);
}

inline void put(Writer& w, const ValidatorTransaction& tx) {
    put_payload(w, tx);
    w.bytes(tx.signature);
}

inline void put(Writer& w, const VoteTally& t) {
    w.u8(kTallyTag);
    put(w, t.worker_tx);
    w.u32(t.positives);
    w.u32(t.negatives);
    w.u32(static_cast<std::uint32_t>(t.voters.size()));
    for (const auto& v : t.voters) put(w, v);
}

// Everything covered by content_hash.
inline void put_content(Writer& w, const Block& b) {
    w.u8(kBlockTag);
    w.u64(b.round);
    put(w, b.miner);
    w.digest(b.prev_hash);
    w.digest(b.init_model_hash);
    w.u32(static_cast<std::uint32_t>(b.tallies.size()));
    for (const auto& t : b.tallies) put(w, t);
    w.u64(b.miner_reward);
    w.u32(static_cast<std::uint32_t>(b.validator_rewards.size()));
    for (const auto& [id, r] : b.validator_rewards) {
        put(w, id);
        w.u64(r);
    }
    w.u64(b.nonce);
}

inline void put(Writer& w, const Block& b) {
    put_content(w, b);
    w.digest(b.content_hash);
    w.bytes(b.signature);
}

inline DeviceId get_device(Reader& r) { return DeviceId{r.bytes()}; }

inline ModelParams get_params(Reader& r) {
    ModelParams p;
    const std::uint32_t nl = r.u32();
    if (nl > 16) throw DecodeError("wire: implausible layer count");
    for (std::uint32_t i = 0; i < nl; ++i) p.arch.layers.push_back(static_cast<std::size_t>(r.u64()));
    const std::uint64_t n = r.u64();
    if (n > (std::uint64_t{1} << 32)) throw DecodeError("wire: implausible parameter count");
    p.values.resize(static_cast<std::size_t>(n));
    for (auto& v : p.values) v = r.f64();
    return p;
}

inline WorkerTransaction get_worker_tx(Reader& r) {
    r.expect_tag(kWorkerTxTag, "worker transaction");
    WorkerTransaction tx;
    tx.round = r.u64();
    tx.worker = get_device(r);
    tx.update = get_params(r);
    tx.expected_reward = r.u64();
    tx.epochs = r.u32();
    tx.train_size = r.u64();
    tx.signature = r.bytes();
    return tx;
}

inline ValidatorTransaction get_validator_tx(Reader& r) {
    r.expect_tag(kValidatorTxTag, "validator transaction");
    ValidatorTransaction tx;
    tx.round = r.u64();
    tx.validator = get_device(r);
    tx.inner = get_worker_tx(r);
    const std::uint8_t v = r.u8();
    if (v == kNoVote) {
        tx.vote.reset();
    } else if (v <= 1) {
        tx.vote = static_cast<Vote>(v);
    } else {
        throw DecodeError("wire: bad vote byte");
    }
    tx.verify_reward = r.u64();
    tx.vali_reward = r.u64();
    tx.signature = r.bytes();
    return tx;
}

inline VoteTally get_tally(Reader& r) {
    r.expect_tag(kTallyTag, "vote tally");
    VoteTally t;
    t.worker_tx = get_worker_tx(r);
    t.positives = r.u32();
    t.negatives = r.u32();
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) t.voters.push_back(get_device(r));
    return t;
}

inline Block get_block(Reader& r) {
    r.expect_tag(kBlockTag, "block");
    Block b;
    b.round = r.u64();
    b.miner = get_device(r);
    b.prev_hash = r.digest();
    b.init_model_hash = r.digest();
    const std::uint32_t nt = r.u32();
    for (std::uint32_t i = 0; i < nt; ++i) b.tallies.push_back(get_tally(r));
    b.miner_reward = r.u64();
    const std::uint32_t nr = r.u32();
    for (std::uint32_t i = 0; i < nr; ++i) {
        DeviceId id = get_device(r);
        b.validator_rewards[id] = r.u64();
    }
    b.nonce = r.u64();
    b.content_hash = r.digest();
    b.signature = r.bytes();
    return b;
}

template <typename F>
auto decode_all(std::span<const std::uint8_t> bytes, F&& get) {
    Reader r(bytes);
    auto value = get(r);
    if (!r.done()) throw DecodeError("wire: trailing bytes");
    return value;
}

}  // namespace wire

template <typename T>
Bytes encode(const T& value) {
    wire::Writer w;
    wire::put(w, value);
    return w.take();
}

inline Bytes encode_params(const ModelParams& p) {
    wire::Writer w;
    wire::put(w, p);
    return w.take();
}

inline WorkerTransaction decode_worker_tx(std::span<const std::uint8_t> b) {
    return wire::decode_all(b, wire::get_worker_tx);
}
inline ValidatorTransaction decode_validator_tx(std::span<const std::uint8_t> b) {
    return wire::decode_all(b, wire::get_validator_tx);
}
inline VoteTally decode_tally(std::span<const std::uint8_t> b) { return wire::decode_all(b, wire::get_tally); }
inline Block decode_block(std::span<const std::uint8_t> b) { return wire::decode_all(b, wire::get_block); }

template <typename Tx>
Bytes signing_payload(const Tx& tx) {
    wire::Writer w;
    wire::put_payload(w, tx);
    return w.take();
}

inline Bytes block_content(const Block& b) {
    wire::Writer w;
    wire::put_content(w, b);
    return w.take();
}

inline Digest compute_content_hash(const Block& b) { return sha256(block_content(b)); }

inline Digest params_digest(const ModelParams& p) { return sha256(encode_params(p)); }

template <typename Tx>
void sign_transaction(Tx& tx, const DeviceId& signer, const SignatureScheme& scheme) {
    tx.signature = scheme.sign(signing_payload(tx), signer);
}

inline bool verify_transaction(const WorkerTransaction& tx, const SignatureScheme& scheme) {
    return scheme.verify(signing_payload(tx), tx.worker, tx.signature);
}

inline bool verify_transaction(const ValidatorTransaction& tx, const SignatureScheme& scheme) {
    return scheme.verify(signing_payload(tx), tx.validator, tx.signature);
}

// Hashes the block content, then signs the hash under the miner's key.
inline void seal_block(Block& b, const SignatureScheme& scheme) {
    b.content_hash = compute_content_hash(b);
    b.signature = scheme.sign(b.content_hash, b.miner);
}

inline bool verify_block_signature(const Block& b, const SignatureScheme& scheme) {
    return scheme.verify(b.content_hash, b.miner, b.signature);
}

}  // namespace vbfl
