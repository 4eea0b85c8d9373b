// Chain maintenance: genesis construction, checked append, full-link audit.

#pragma once

#include <memory>
#include <set>

#include "protocol.hpp"
#include "wire.hpp"

namespace vbfl {

// Round-0 block with the all-zero prev_hash sentinel that pins the initial
// global model. It is unsigned; every replica builds the same one.
inline BlockPtr make_genesis(const ModelParams& initial_model) {
    Block g;
    g.round = 0;
    g.init_model_hash = params_digest(initial_model);
    g.content_hash = compute_content_hash(g);
    return std::make_shared<const Block>(std::move(g));
}

// Appends `block` after checking the hash link, the miner's signature and the
// appending device's blacklist. Throws ChainError on rejection; the chain is
// left untouched in that case.
inline void append_block(Blockchain& chain, BlockPtr block, const SignatureScheme& scheme,
                         const std::set<DeviceId>& blacklist) {
    const Block& b = *block;
    if (chain.empty()) {
        if (b.prev_hash != Digest{}) throw ChainError(ChainErrorKind::HashMismatch);
    } else {
        if (b.prev_hash != chain.tip_hash()) throw ChainError(ChainErrorKind::HashMismatch);
        if (b.round <= chain.tip().round) throw ChainError(ChainErrorKind::RoundNotIncreasing);
    }
    if (compute_content_hash(b) != b.content_hash) throw ChainError(ChainErrorKind::BadContentHash);
    if (b.round > 0) {
        if (blacklist.count(b.miner)) throw ChainError(ChainErrorKind::BlacklistedMiner);
        if (!verify_block_signature(b, scheme)) throw ChainError(ChainErrorKind::BadSignature);
    }
    chain.push(std::move(block));
}

// True when every block's prev_hash links to its predecessor's content hash
// and rounds strictly increase. With `rehash`, stored hashes are also checked
// against recomputed ones.
inline bool verify_chain(const Blockchain& chain, bool rehash = true) {
    const auto& blocks = chain.blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const Block& b = *blocks[k];
        if (rehash && compute_content_hash(b) != b.content_hash) return false;
        if (k == 0) {
            if (b.prev_hash != Digest{}) return false;
            continue;
        }
        if (b.prev_hash != blocks[k - 1]->content_hash) return false;
        if (b.round <= blocks[k - 1]->round) return false;
    }
    return true;
}

}  // namespace vbfl
