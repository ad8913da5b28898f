#pragma once

#include <cstdint>
#include <vector>

#include "attention.hpp"
#include "rng.hpp"

namespace bansa {

// Binary mask over attention entries. drop_prob is the probability that a
// bit is 0 (the entry is dropped); drop_prob = 0 keeps everything.
struct BernoulliMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;  // exactly 0 or 1, row-major
    double drop_prob = 0.0;

    bool keeps(std::size_t i, std::size_t j) const { return bits[i * cols + j] != 0; }
};

BernoulliMask sample_mask(std::size_t rows, std::size_t cols, double drop_prob,
                          RngStream stream);

inline BernoulliMask sample_mask(std::size_t n, double drop_prob, RngStream stream) {
    return sample_mask(n, n, drop_prob, stream);
}

// Entry-wise product followed by row renormalization. A row that loses no
// probability mass is copied bit for bit; a row whose surviving mass is below
// 1e-12 falls back to the unmasked row, so masking never divides by zero and
// the full-drop limit returns the input unchanged.
AttentionMap apply_mask(const AttentionMap& a, const BernoulliMask& m);

// K stochastic views of one attention map for a given (seed, layer, timestep).
struct AttentionEnsemble {
    std::vector<AttentionMap> samples;
    std::size_t source_layer = 0;
    std::uint64_t seed_id = 0;

    std::size_t k() const { return samples.size(); }
    std::size_t rows() const { return samples.front().rows(); }
    std::size_t cols() const { return samples.front().cols(); }
};

// Sample k gets sub-stream k of `stream`, so the result is a pure function of
// (a, k, drop_prob, stream key) and samples may be drawn in any order.
AttentionEnsemble make_ensemble(const AttentionMap& a, std::size_t k, double drop_prob,
                                RngStream stream);

}  // namespace bansa
