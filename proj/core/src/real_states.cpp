#include "padicqm/real_states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace padicqm {

namespace {
constexpr double kPi = std::numbers::pi;

using Cx = std::complex<double>;
}  // namespace

PairGaussian combine_conjugate_pair(const GaussianTerm& ti, const GaussianTerm& tj) {
    const Cx qi = std::conj(Cx(1.0) / (2.0 * ti.width_sq));
    const Cx qj = Cx(1.0) / (2.0 * tj.width_sq);
    const Cx mi = std::conj(ti.center);
    const Cx mj = tj.center;
    const Cx q = qi + qj;
    const Cx w = (qi * mi + qj * mj) / q;
    const Cx gamma = std::conj(ti.amplitude) * tj.amplitude *
                     std::exp(-qi * qj * (mi - mj) * (mi - mj) / q);
    return {gamma, q, w};
}

Cx GaussianTerm::value(double x) const {
    const Cx d = Cx(x) - center;
    return amplitude * std::exp(-d * d / (2.0 * width_sq));
}

RealPacketState RealPacketState::gaussian(double center, double sigma) {
    return RealPacketState({{Cx(1.0), Cx(center), Cx(sigma * sigma)}});
}

RealPacketState RealPacketState::two_gaussian_superposition(double s, double sigma) {
    RealPacketState psi({{Cx(1.0), Cx(s), Cx(sigma * sigma)},
                         {Cx(1.0), Cx(-s), Cx(sigma * sigma)}});
    return psi.normalized();
}

Cx RealPacketState::value(double x) const {
    Cx sum(0.0);
    for (const auto& t : terms_) sum += t.value(x);
    return sum;
}

double RealPacketState::density(double x) const { return std::norm(value(x)); }

double RealPacketState::norm_squared() const {
    Cx sum(0.0);
    for (const auto& ti : terms_) {
        for (const auto& tj : terms_) {
            const auto pg = combine_conjugate_pair(ti, tj);
            sum += pg.gamma * std::sqrt(kPi / pg.q);
        }
    }
    return sum.real();
}

double RealPacketState::norm() const { return std::sqrt(norm_squared()); }

RealPacketState RealPacketState::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize a zero packet state");
    return scaled(Cx(1.0 / n));
}

RealPacketState RealPacketState::scaled(Cx factor) const {
    auto terms = terms_;
    for (auto& t : terms) t.amplitude *= factor;
    return RealPacketState(std::move(terms));
}

double RealPacketState::density_mean() const {
    Cx m0(0.0), m1(0.0);
    for (const auto& ti : terms_) {
        for (const auto& tj : terms_) {
            const auto pg = combine_conjugate_pair(ti, tj);
            const Cx base = pg.gamma * std::sqrt(kPi / pg.q);
            m0 += base;
            m1 += base * pg.w;
        }
    }
    return (m1 / m0).real();
}

double RealPacketState::density_variance() const {
    Cx m0(0.0), m1(0.0), m2(0.0);
    for (const auto& ti : terms_) {
        for (const auto& tj : terms_) {
            const auto pg = combine_conjugate_pair(ti, tj);
            const Cx base = pg.gamma * std::sqrt(kPi / pg.q);
            m0 += base;
            m1 += base * pg.w;
            m2 += base * (pg.w * pg.w + 0.5 / pg.q);
        }
    }
    const Cx mean = m1 / m0;
    return (m2 / m0 - mean * mean).real();
}

std::pair<double, double> RealPacketState::support_range(double pad) const {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& t : terms_) {
        // Effective center and width of |term|^2.
        const Cx q = Cx(1.0) / (2.0 * t.width_sq);
        const double qr = q.real();
        const double center = t.center.real() - t.center.imag() * q.imag() / qr;
        const double s = std::sqrt(0.5 / qr);
        if (first || center - pad * s < lo) lo = center - pad * s;
        if (first || center + pad * s > hi) hi = center + pad * s;
        first = false;
    }
    return {lo, hi};
}

Cx inner_product(const RealPacketState& f, const RealPacketState& g) {
    Cx sum(0.0);
    for (const auto& tf : f.terms()) {
        for (const auto& tg : g.terms()) {
            const Cx qf = Cx(1.0) / (2.0 * tf.width_sq);
            const Cx qg = std::conj(Cx(1.0) / (2.0 * tg.width_sq));
            sum += tf.amplitude * std::conj(tg.amplitude) *
                   gaussian_overlap(qf, tf.center, qg, std::conj(tg.center));
        }
    }
    return sum;
}

Cx gaussian_overlap(Cx q1, Cx m1, Cx q2, Cx m2) {
    const Cx q = q1 + q2;
    return std::sqrt(kPi / q) * std::exp(-q1 * q2 * (m1 - m2) * (m1 - m2) / q);
}

double hermite_function(int n, double xi) {
    // h_0 = pi^{-1/4} e^{-xi^2/2};  h_{m+1} = sqrt(2/(m+1)) xi h_m
    //                                        - sqrt(m/(m+1)) h_{m-1}.
    double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
    if (n == 0) return h0;
    double h1 = std::sqrt(2.0) * xi * h0;
    for (int m = 1; m < n; ++m) {
        const double h2 =
            std::sqrt(2.0 / (m + 1)) * xi * h1 - std::sqrt(static_cast<double>(m) / (m + 1)) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double HarmonicCoefficients::norm_squared() const {
    double sum = 0.0;
    for (const auto& c : coeffs) sum += std::norm(c);
    return sum;
}

double HarmonicCoefficients::norm() const { return std::sqrt(norm_squared()); }

double HarmonicCoefficients::eigenfunction(int m, double x) const {
    const double scale = std::sqrt(mass * omega);
    return std::sqrt(scale) * hermite_function(m, scale * x);
}

Cx HarmonicCoefficients::value(double x) const {
    Cx sum(0.0);
    for (size_t m = 0; m < coeffs.size(); ++m) {
        sum += coeffs[m] * eigenfunction(static_cast<int>(m), x);
    }
    return sum;
}

}  // namespace padicqm
