// Named random substreams derived from a single master seed.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "crypto.hpp"

namespace vbfl {

using RngStream = std::mt19937_64;

// Each substream is seeded from SHA-256(master_seed || name), so streams with
// different names are independent and adding a stream never perturbs another.
inline RngStream make_substream(std::uint64_t master_seed, std::string_view name) {
    Bytes buf;
    buf.reserve(8 + name.size());
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(master_seed >> (8 * i)));
    buf.insert(buf.end(), name.begin(), name.end());
    const Digest d = sha256(buf);
    std::seed_seq seq(d.begin(), d.end());
    return RngStream(seq);
}

inline RngStream make_device_substream(std::uint64_t master_seed, std::string_view name, std::uint32_t device) {
    return make_substream(master_seed, std::string(name) + ":" + std::to_string(device));
}

}  // namespace vbfl
