#include "matrix.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace bansa {

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols) {
        fail(ErrorCode::shape_mismatch, "matrix data length does not match rows*cols");
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        fail(ErrorCode::shape_mismatch, "matmul: inner dimensions differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        fail(ErrorCode::shape_mismatch, "matmul_nt: inner dimensions differ");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(j, k);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorCode::shape_mismatch, "add: shapes differ");
    }
    Matrix out = a;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out = a;
    for (double& v : out.data()) v *= factor;
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        fail(ErrorCode::shape_mismatch, "max_abs_diff: shapes differ");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a.data()[i] - b.data()[i]);
        if (d > worst) worst = d;
    }
    return worst;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, RngStream& stream, double stddev) {
    Matrix out(rows, cols);
    for (double& v : out.data()) {
        v = stream.next_gaussian() * stddev;
    }
    return out;
}

}  // namespace bansa
