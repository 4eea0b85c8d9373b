// Built-in synthetic classification task and an IDX (MNIST-format) reader.

#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "learning.hpp"
#include "rng.hpp"

namespace vbfl {

struct BlobSpec {
    std::size_t dim = 256;
    std::size_t classes = 30;
    std::size_t train_per_class = 100;
    std::size_t test_per_class = 34;
    double center_scale = 0.175; // std-dev of class-center coordinates
    double spread = 0.7;         // std-dev of examples around their center
    double offset = 0.0;         // constant added to every coordinate
};

struct Task {
    DataShard train;
    DataShard test;
};

// K Gaussian clusters in `dim` dimensions, shifted by a common offset. Examples are emitted in an
// interleaved class order so any prefix is roughly class-balanced.
inline Task make_blobs(const BlobSpec& spec, std::uint64_t seed) {
    if (spec.dim == 0 || spec.classes < 2 || spec.train_per_class == 0 || spec.test_per_class == 0) {
        throw std::invalid_argument("make_blobs: dimension, classes and per-class counts must be positive");
    }
    if (!(spec.spread > 0.0) || !(spec.center_scale > 0.0)) {
        throw std::invalid_argument("make_blobs: spread and center scale must be positive");
    }
    RngStream rng = make_substream(seed, "data");
    std::normal_distribution<double> center_dist(0.0, spec.center_scale);
    std::normal_distribution<double> noise(0.0, spec.spread);

    std::vector<double> centers(spec.classes * spec.dim);
    for (auto& c : centers) c = center_dist(rng);

    auto draw = [&](std::size_t per_class) {
        std::vector<double> x;
        std::vector<int> y;
        x.reserve(per_class * spec.classes * spec.dim);
        y.reserve(per_class * spec.classes);
        for (std::size_t n = 0; n < per_class; ++n) {
            for (std::size_t k = 0; k < spec.classes; ++k) {
                for (std::size_t j = 0; j < spec.dim; ++j) x.push_back(centers[k * spec.dim + j] + spec.offset + noise(rng));
                y.push_back(static_cast<int>(k));
            }
        }
        return DataShard(spec.dim, spec.classes, std::move(x), std::move(y));
    };
    Task task{draw(spec.train_per_class), draw(spec.test_per_class)};
    return task;
}

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("idx: truncated header in " + path);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

}  // namespace detail

struct IdxArray {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

// Reads an unsigned-byte IDX file: magic 0x0000 08 <ndims>, big-endian dims, raw bytes.
inline IdxArray read_idx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("idx: cannot open " + path);
    const std::uint32_t magic = detail::read_be32(in, path);
    if ((magic >> 16) != 0 || ((magic >> 8) & 0xff) != 0x08) {
        throw std::runtime_error("idx: unsupported magic in " + path + " (only unsigned-byte arrays)");
    }
    const std::uint32_t ndims = magic & 0xff;
    if (ndims == 0) throw std::runtime_error("idx: zero dimensions in " + path);
    IdxArray arr;
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < ndims; ++i) {
        arr.dims.push_back(detail::read_be32(in, path));
        total *= arr.dims.back();
    }
    arr.data.resize(total);
    if (!in.read(reinterpret_cast<char*>(arr.data.data()), static_cast<std::streamsize>(total))) {
        throw std::runtime_error("idx: truncated payload in " + path);
    }
    return arr;
}

// Images become feature vectors scaled to [0, 1]. `limit` = 0 keeps every example.
inline DataShard load_idx_shard(const std::string& images_path, const std::string& labels_path,
                                std::size_t num_classes = 10, std::size_t limit = 0) {
    const IdxArray images = read_idx(images_path);
    const IdxArray labels = read_idx(labels_path);
    if (labels.dims.size() != 1 || images.dims.empty() || images.dims[0] != labels.dims[0]) {
        throw std::runtime_error("idx: image and label counts differ");
    }
    std::size_t n = images.dims[0];
    if (limit != 0 && limit < n) n = limit;
    const std::size_t dim = images.data.size() / images.dims[0];
    std::vector<double> x(n * dim);
    for (std::size_t i = 0; i < n * dim; ++i) x[i] = images.data[i] / 255.0;
    std::vector<int> y(labels.data.begin(), labels.data.begin() + static_cast<std::ptrdiff_t>(n));
    return DataShard(dim, num_classes, std::move(x), std::move(y));
}

}  // namespace vbfl
