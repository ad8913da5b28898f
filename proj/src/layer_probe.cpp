#include "layer_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace bansa {

ScoreTable ScoreTable::from_rows(std::vector<std::vector<double>> rows,
                                 std::vector<std::uint64_t> row_ids) {
    if (rows.empty() || rows.front().empty()) {
        fail(ErrorCode::invalid_input, "score table must be nonempty");
    }
    const std::size_t layers = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != layers) {
            fail(ErrorCode::shape_mismatch, "score table rows have unequal length");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                fail(ErrorCode::invalid_input, "score table contains non-finite values");
            }
        }
    }
    if (row_ids.size() != rows.size()) {
        fail(ErrorCode::shape_mismatch, "score table id count does not match row count");
    }
    ScoreTable table;
    table.values_ = Matrix(rows.size(), layers);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t l = 0; l < layers; ++l) {
            table.values_(i, l) = rows[i][l];
        }
    }
    table.row_ids_ = std::move(row_ids);
    return table;
}

Matrix cumulative_scores(const ScoreTable& table) {
    Matrix out(table.seeds(), table.layers());
    for (std::size_t i = 0; i < table.seeds(); ++i) {
        double running = 0.0;
        for (std::size_t d = 0; d < table.layers(); ++d) {
            running += table.at(i, d);
            out(i, d) = running / static_cast<double>(d + 1);
        }
    }
    return out;
}

namespace {

bool is_constant(std::span<const double> xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    return *lo == *hi;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        fail(ErrorCode::shape_mismatch, "pearson: inputs have different lengths");
    }
    if (x.size() < 2) {
        fail(ErrorCode::invalid_input, "pearson: need at least two observations");
    }
    if (is_constant(x) || is_constant(y)) {
        fail(ErrorCode::degenerate_correlation, "pearson: constant input, r is undefined");
    }
    if (std::equal(x.begin(), x.end(), y.begin())) {
        return 1.0;  // self-correlation, exact by definition
    }
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

LayerProfile select_depth(const ScoreTable& table, double tau) {
    if (table.seeds() < 2) {
        fail(ErrorCode::insufficient_pool,
             "depth selection needs at least two pool entries to correlate across");
    }
    const std::size_t layers = table.layers();
    const Matrix cumulative = cumulative_scores(table);

    std::vector<double> full_column(table.seeds());
    for (std::size_t i = 0; i < table.seeds(); ++i) {
        full_column[i] = cumulative(i, layers - 1);
    }
    if (is_constant(full_column)) {
        fail(ErrorCode::degenerate_correlation,
             "full-depth scores are constant across the pool; no depth can be selected");
    }

    LayerProfile profile;
    profile.tau = tau;
    profile.per_layer.resize(layers);
    profile.cumulative.resize(layers);
    profile.corr_curve.assign(layers, std::numeric_limits<double>::quiet_NaN());

    const double inv_m = 1.0 / static_cast<double>(table.seeds());
    double running = 0.0;
    for (std::size_t l = 0; l < layers; ++l) {
        double column_mean = 0.0;
        for (std::size_t i = 0; i < table.seeds(); ++i) {
            column_mean += table.at(i, l);
        }
        profile.per_layer[l] = column_mean * inv_m;
        running += profile.per_layer[l];
        profile.cumulative[l] = running / static_cast<double>(l + 1);
    }

    std::vector<double> column(table.seeds());
    bool crossed = false;
    for (std::size_t d = 0; d < layers; ++d) {
        for (std::size_t i = 0; i < table.seeds(); ++i) {
            column[i] = cumulative(i, d);
        }
        if (is_constant(column)) {
            continue;  // uninformative depth, leave NaN in the curve
        }
        profile.corr_curve[d] = pearson(column, full_column);
        if (!crossed && profile.corr_curve[d] >= tau) {
            profile.d_star = d;
            crossed = true;
        }
    }
    if (!crossed) {
        profile.d_star = layers - 1;
    }
    return profile;
}

std::vector<double> truncated_pool_scores(const ScoreTable& table, std::size_t d_star) {
    if (d_star >= table.layers()) {
        fail(ErrorCode::invalid_input, "truncation depth out of range");
    }
    const Matrix cumulative = cumulative_scores(table);
    std::vector<double> scores(table.seeds());
    for (std::size_t i = 0; i < table.seeds(); ++i) {
        scores[i] = cumulative(i, d_star);
    }
    return scores;
}

}  // namespace bansa
