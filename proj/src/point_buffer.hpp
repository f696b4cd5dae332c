#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fwlab::detail {

/// Scratch coordinates; stays on the stack for N <= 16.
class PointBuffer {
public:
    explicit PointBuffer(std::size_t n) : size_(n) {
        if (n > kStack) {
            heap_.resize(n);
            data_ = heap_.data();
        }
    }
    PointBuffer(const PointBuffer&) = delete;
    PointBuffer& operator=(const PointBuffer&) = delete;

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double* data() { return data_; }
    std::size_t size() const { return size_; }
    std::span<double> span() { return {data_, size_}; }
    std::span<const double> cspan() const { return {data_, size_}; }

private:
    static constexpr std::size_t kStack = 16;
    double stack_[kStack];
    std::vector<double> heap_;
    double* data_ = stack_;
    std::size_t size_;
};

}  // namespace fwlab::detail
