#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matrix.hpp"

namespace bansa {

// Per-layer scores for a pool: one row per scored seed (or prompt/seed pair),
// one column per attention layer.
class ScoreTable {
public:
    ScoreTable() = default;

    static ScoreTable from_rows(std::vector<std::vector<double>> rows,
                                std::vector<std::uint64_t> row_ids);

    std::size_t seeds() const { return values_.rows(); }
    std::size_t layers() const { return values_.cols(); }
    double at(std::size_t seed, std::size_t layer) const { return values_(seed, layer); }
    std::span<const double> row(std::size_t seed) const { return values_.row(seed); }
    const std::vector<std::uint64_t>& row_ids() const { return row_ids_; }
    const Matrix& values() const { return values_; }

private:
    Matrix values_;
    std::vector<std::uint64_t> row_ids_;
};

// Entry (i, d) is the mean of table row i over layers 0..d.
Matrix cumulative_scores(const ScoreTable& table);

// Sample Pearson correlation, clamped to [-1, 1] against rounding overshoot.
// A constant input has no defined correlation and raises
// ErrorCode::degenerate_correlation.
double pearson(std::span<const double> x, std::span<const double> y);

// Truncation-depth profile for one pool. Indices are 0-based here; reports
// print them 1-based.
struct LayerProfile {
    std::vector<double> per_layer;   // pool mean of each layer column
    std::vector<double> cumulative;  // running mean of per_layer
    std::vector<double> corr_curve;  // NaN where a cumulative column is constant
    std::size_t d_star = 0;
    double tau = 0.0;
};

// Correlates each cumulative column against the full-depth column across the
// pool and picks the smallest depth whose correlation reaches tau. Constant
// intermediate columns are uninformative and skipped; a constant full-depth
// column leaves nothing to correlate against and is an error.
LayerProfile select_depth(const ScoreTable& table, double tau);

// Cumulative column at d_star: one selection score per seed.
std::vector<double> truncated_pool_scores(const ScoreTable& table, std::size_t d_star);

}  // namespace bansa
