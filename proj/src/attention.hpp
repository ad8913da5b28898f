#pragma once

#include "matrix.hpp"

namespace bansa {

// Row-stochastic matrix: every entry in [0,1], every row sums to 1 within
// 1e-9. Square (tokens x tokens) in the pipeline; single-row maps are used
// where a map stands in for one discrete distribution.
class AttentionMap {
public:
    // For externally supplied data. Entries must lie in [0, 1+1e-6] and each
    // row sum must be within 1e-6 of 1; rows are renormalized exactly to
    // absorb float drift, anything worse is rejected.
    static AttentionMap validated(Matrix m);

    // For internal producers (softmax, masking, ensemble means) whose output
    // is row-stochastic by construction. Bits are preserved as-is.
    static AttentionMap unchecked(Matrix m);

    std::size_t rows() const { return m_.rows(); }
    std::size_t cols() const { return m_.cols(); }

    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    std::span<const double> row(std::size_t i) const { return m_.row(i); }

    const Matrix& matrix() const { return m_; }

    bool operator==(const AttentionMap& other) const = default;

private:
    explicit AttentionMap(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

// Row-wise softmax with max-subtraction; shift-invariant per row.
AttentionMap softmax_rows(const Matrix& scores);

// Softmax(scale * q k^T). q and k must agree in both dimensions. The
// two-argument form uses the conventional 1/sqrt(d) temperature.
AttentionMap attention_from_qk(const Matrix& q, const Matrix& k, double scale);
AttentionMap attention_from_qk(const Matrix& q, const Matrix& k);

// Conventional default temperature for width-d embeddings.
double default_attention_scale(std::size_t dim);

// Mean over rows of the row Shannon entropy, in nats; 0 log 0 = 0.
// Bounded by [0, ln(cols)].
double entropy(const AttentionMap& a);

// Entropy of one probability vector (shared by the map and distribution paths).
double row_entropy(std::span<const double> probs);

}  // namespace bansa
