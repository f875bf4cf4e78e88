#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfe {

// Dense row-major matrix of doubles.
class Array2D {
public:
    Array2D() = default;
    Array2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Array2D&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// A path prefix: the discretized values x_{t_0}, ..., x_{t_k}. Coefficients
// receive the whole prefix; most models only read .back().
using PathView = std::span<const double>;

// Read-only view of an ensemble of discretized paths truncated after a grid
// index (prefix_len = k+1 values visible per path).
struct PathEnsembleView {
    const double* data = nullptr;
    std::size_t paths = 0;
    std::size_t stride = 0;
    std::size_t prefix_len = 0;

    std::size_t size() const { return paths; }
    PathView prefix(std::size_t i) const { return {data + i * stride, prefix_len}; }
    double current(std::size_t i) const { return data[i * stride + prefix_len - 1]; }
};

} // namespace mfe
