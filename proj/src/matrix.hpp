#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bansa {

// Dense row-major matrix of doubles. Loops are written with a fixed
// accumulation order so results are reproducible run to run.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a (r x k) times b (k x c)
Matrix matmul(const Matrix& a, const Matrix& b);

// a (r x k) times b^T where b is (c x k)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

// Max |a_ij - b_ij|; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

Matrix random_gaussian(std::size_t rows, std::size_t cols, class RngStream& stream,
                       double stddev = 1.0);

}  // namespace bansa
