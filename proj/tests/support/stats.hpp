#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace testsupport {

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LinFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline int count_local_maxima(const std::vector<double>& v) {
    int count = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++count;
    return count;
}

/// Argmax magnitude bin of the naive DFT over bins 1..n/2-1.
inline std::size_t dft_peak_bin(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    std::size_t best = 1;
    double best_mag = -1.0;
    for (std::size_t k = 1; k < n / 2; ++k) {
        const std::complex<double> w =
            std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * k / n));
        std::complex<double> acc = 0.0, phase = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += samples[j] * phase;
            phase *= w;
        }
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    return best;
}

} // namespace testsupport
