#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iccool {

// Seeded generator with hand-rolled variates so that synthetic data is
// reproducible byte for byte across standard-library implementations (the
// std:: distributions are not pinned by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    int binomial(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) k += uniform() < p;
        return k;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace iccool
