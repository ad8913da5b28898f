#include "masking.hpp"

#include "errors.hpp"

namespace bansa {

BernoulliMask sample_mask(std::size_t rows, std::size_t cols, double drop_prob,
                          RngStream stream) {
    if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) {
        fail(ErrorCode::invalid_input, "drop probability must lie in [0,1]");
    }
    if (rows == 0 || cols == 0) {
        fail(ErrorCode::invalid_input, "mask must have at least one row and column");
    }
    BernoulliMask mask;
    mask.rows = rows;
    mask.cols = cols;
    mask.drop_prob = drop_prob;
    mask.bits.resize(rows * cols);
    for (auto& bit : mask.bits) {
        bit = stream.next_unit() < drop_prob ? 0 : 1;
    }
    return mask;
}

AttentionMap apply_mask(const AttentionMap& a, const BernoulliMask& m) {
    if (a.rows() != m.rows || a.cols() != m.cols) {
        fail(ErrorCode::shape_mismatch, "apply_mask: map and mask shapes differ");
    }
    constexpr double kDeadRowThreshold = 1e-12;

    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double kept = 0.0;
        bool lost_mass = false;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (m.keeps(i, j)) {
                kept += a(i, j);
            } else if (a(i, j) != 0.0) {
                lost_mass = true;
            }
        }
        if (!lost_mass || kept < kDeadRowThreshold) {
            // Untouched row, or all surviving mass gone: keep the original bits.
            for (std::size_t j = 0; j < a.cols(); ++j) {
                out(i, j) = a(i, j);
            }
            continue;
        }
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = m.keeps(i, j) ? a(i, j) / kept : 0.0;
        }
    }
    return AttentionMap::unchecked(std::move(out));
}

AttentionEnsemble make_ensemble(const AttentionMap& a, std::size_t k, double drop_prob,
                                RngStream stream) {
    if (k == 0) {
        fail(ErrorCode::invalid_input, "ensemble size must be at least 1");
    }
    AttentionEnsemble ensemble;
    ensemble.samples.reserve(k);
    for (std::size_t sample = 0; sample < k; ++sample) {
        const BernoulliMask mask =
            sample_mask(a.rows(), a.cols(), drop_prob, stream.split(sample));
        ensemble.samples.push_back(apply_mask(a, mask));
    }
    return ensemble;
}

}  // namespace bansa
