#include "attention.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace bansa {

namespace {

constexpr double kEntryUpperSlack = 1e-6;
constexpr double kRowSumRepairTolerance = 1e-6;

}  // namespace

AttentionMap AttentionMap::validated(Matrix m) {
    if (m.rows() == 0 || m.cols() == 0) {
        fail(ErrorCode::invalid_input, "attention map must have at least one row and column");
    }
    if (!m.all_finite()) {
        fail(ErrorCode::invalid_input, "attention map contains non-finite entries");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (v < 0.0 || v > 1.0 + kEntryUpperSlack) {
                fail(ErrorCode::invalid_input,
                     "attention map entry outside [0,1] at row " + std::to_string(i));
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumRepairTolerance) {
            fail(ErrorCode::invalid_input,
                 "attention map row " + std::to_string(i) + " sums to " +
                     std::to_string(sum) + ", not 1");
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m(i, j) /= sum;
        }
    }
    return AttentionMap(std::move(m));
}

AttentionMap AttentionMap::unchecked(Matrix m) {
    return AttentionMap(std::move(m));
}

AttentionMap softmax_rows(const Matrix& scores) {
    if (scores.rows() == 0 || scores.cols() == 0) {
        fail(ErrorCode::invalid_input, "softmax_rows: empty input");
    }
    if (!scores.all_finite()) {
        fail(ErrorCode::invalid_input, "softmax_rows: non-finite input");
    }
    Matrix out(scores.rows(), scores.cols());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const auto row = scores.row(i);
        const double peak = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (std::size_t j = 0; j < scores.cols(); ++j) {
            const double e = std::exp(row[j] - peak);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < scores.cols(); ++j) {
            out(i, j) /= sum;
        }
    }
    return AttentionMap::unchecked(std::move(out));
}

AttentionMap attention_from_qk(const Matrix& q, const Matrix& k, double scale) {
    if (q.cols() != k.cols() || q.rows() != k.rows()) {
        fail(ErrorCode::shape_mismatch, "attention_from_qk: q and k shapes differ");
    }
    Matrix logits = matmul_nt(q, k);
    for (double& v : logits.data()) v *= scale;
    return softmax_rows(logits);
}

AttentionMap attention_from_qk(const Matrix& q, const Matrix& k) {
    return attention_from_qk(q, k, default_attention_scale(q.cols()));
}

double default_attention_scale(std::size_t dim) {
    return 1.0 / std::sqrt(static_cast<double>(dim));
}

double row_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double entropy(const AttentionMap& a) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        total += row_entropy(a.row(i));
    }
    return total / static_cast<double>(a.rows());
}

}  // namespace bansa
