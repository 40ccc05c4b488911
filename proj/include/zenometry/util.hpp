// util.hpp — Small shared helpers: dense sample matrix, grids, worker pool

#pragma once

#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

namespace zenometry {

// Row-major dense matrix of doubles; rows index samples, columns index times.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::vector<double> linspace(double start, double stop, std::size_t points) {
    if (points == 0) throw std::invalid_argument("linspace: points must be positive");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = start + step * static_cast<double>(i);
    out.back() = stop;
    return out;
}

// Runs fn(begin, end) over contiguous chunks of [0, count). Results must be
// written to disjoint slots so the outcome is independent of scheduling.
template <class Fn>
void parallel_chunks(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    const std::size_t chunk = (count + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace zenometry
