#pragma once

// Independent numerical oracles used only by tests: these deliberately avoid
// the library's evolution paths (eigendecomposition, closed-form packets).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace padicqm::testing {

/// exp(A) by scaling-and-squaring with a plain Taylor series.
inline Eigen::MatrixXcd matrix_exponential_oracle(const Eigen::MatrixXcd& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXcd small = a / std::pow(2.0, squarings);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::MatrixXcd term = sum;
    for (int k = 1; k <= 24; ++k) {
        term = term * small / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

/// In-place radix-2 FFT (size must be a power of two); sign -1 forward.
inline void fft_radix2(std::vector<std::complex<double>>& a, double sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen = std::polar(1.0, angle);
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (sign > 0) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

/// Free Schrodinger propagation of samples on a uniform periodic grid of
/// physical length `length`: one exact kinetic phase step in k-space. The
/// only error sources are grid discretization and periodic wrap-around.
inline std::vector<std::complex<double>> free_propagate_fft(
    std::vector<std::complex<double>> samples, double length, double mass, double t) {
    const size_t n = samples.size();
    fft_radix2(samples, -1.0);
    for (size_t j = 0; j < n; ++j) {
        const double mode = j < n / 2 ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        const double k = 2.0 * std::numbers::pi * mode / length;
        samples[j] *= std::polar(1.0, -t * k * k / (2.0 * mass));
    }
    fft_radix2(samples, 1.0);
    return samples;
}

}  // namespace padicqm::testing
