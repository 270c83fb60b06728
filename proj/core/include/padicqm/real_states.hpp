#pragma once

#include <complex>
#include <vector>

namespace padicqm {

/// One Gaussian packet term A exp(-(x - center)^2 / (2 width_sq)).
/// Free evolution keeps the form with a complex width; localization products
/// additionally make the center complex. Re(1/width_sq) > 0 keeps the term
/// in L2.
struct GaussianTerm {
    std::complex<double> amplitude;
    std::complex<double> center;
    std::complex<double> width_sq;

    std::complex<double> value(double x) const;
};

/// Superposition of Gaussian packets; all norms, overlaps and moments are
/// closed-form Gaussian integrals (no grid).
class RealPacketState {
public:
    RealPacketState() = default;
    explicit RealPacketState(std::vector<GaussianTerm> terms) : terms_(std::move(terms)) {}

    /// Real Gaussian exp(-(x - center)^2 / (2 sigma^2)) with unit amplitude.
    static RealPacketState gaussian(double center, double sigma);
    /// A_inf { exp(-(x-s)^2/(2 sigma^2)) + exp(-(x+s)^2/(2 sigma^2)) },
    /// normalized.
    static RealPacketState two_gaussian_superposition(double s, double sigma);

    const std::vector<GaussianTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    std::complex<double> value(double x) const;
    double density(double x) const;

    double norm_squared() const;
    double norm() const;
    RealPacketState normalized() const;
    RealPacketState scaled(std::complex<double> factor) const;

    /// Mean and variance of the (normalized) density |psi|^2.
    double density_mean() const;
    double density_variance() const;

    /// Range [lo, hi] that supports the density up to ~exp(-pad^2/2) tails.
    std::pair<double, double> support_range(double pad) const;

private:
    std::vector<GaussianTerm> terms_;
};

/// <f,g> = integral f(x) conj(g(x)) dx in closed form.
std::complex<double> inner_product(const RealPacketState& f, const RealPacketState& g);

/// conj(a)(x) b(x) collapsed to a single Gaussian gamma exp(-q (x-w)^2)
/// (amplitudes folded into gamma; Re q > 0).
struct PairGaussian {
    std::complex<double> gamma;
    std::complex<double> q;
    std::complex<double> w;
};
PairGaussian combine_conjugate_pair(const GaussianTerm& a, const GaussianTerm& b);

/// integral exp(-q1 (x-m1)^2) exp(-q2 (x-m2)^2) dx
///   = sqrt(pi/(q1+q2)) exp(-q1 q2 (m1-m2)^2 / (q1+q2)),
/// valid for Re(q1+q2) > 0 (complex centers included).
std::complex<double> gaussian_overlap(std::complex<double> q1, std::complex<double> m1,
                                      std::complex<double> q2, std::complex<double> m2);

/// Normalized Hermite function h_n(xi) (orthonormal w.r.t. dxi), evaluated
/// by the stable three-term recurrence.
double hermite_function(int n, double xi);

/// State in the harmonic-oscillator eigenbasis: coefficients over the
/// normalized eigenfunctions theta_m of mass/omega.
struct HarmonicCoefficients {
    double mass = 0.5;
    double omega = 1.0;
    std::vector<std::complex<double>> coeffs;

    double norm_squared() const;
    double norm() const;
    /// theta_m(x) = (mass*omega)^{1/4} h_m(sqrt(mass*omega) x).
    double eigenfunction(int m, double x) const;
    std::complex<double> value(double x) const;
};

}  // namespace padicqm
