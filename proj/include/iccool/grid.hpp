#pragma once

#include <cstddef>
#include <vector>

namespace iccool {

// Dense row-major (n1, n2) grid. Index 1 is the first motional mode,
// index 2 the second; both run from 0 to n_max inclusive.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int n1_max, int n2_max, double fill = 0.0)
        : n1_(n1_max + 1), n2_(n2_max + 1),
          data_(static_cast<std::size_t>(n1_) * n2_, fill) {}

    int n1_max() const { return n1_ - 1; }
    int n2_max() const { return n2_ - 1; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int n1, int n2) {
        return data_[static_cast<std::size_t>(n1) * n2_ + n2];
    }
    double operator()(int n1, int n2) const {
        return data_[static_cast<std::size_t>(n1) * n2_ + n2];
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }
    double max() const {
        double m = 0.0;
        for (double v : data_) m = v > m ? v : m;
        return m;
    }

private:
    int n1_ = 0, n2_ = 0;
    std::vector<double> data_;
};

} // namespace iccool
