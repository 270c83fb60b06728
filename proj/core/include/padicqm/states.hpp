#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "padicqm/real_states.hpp"
#include "padicqm/window.hpp"

namespace padicqm {

using Complex = std::complex<double>;

/// Locally constant complex function on the domain ball p^{-R} Z_p, one value
/// per coset of p^K Z_p in canonical coset order. Immutable in spirit:
/// transforms return new states.
class GridState {
public:
    explicit GridState(const Window& window)
        : win_(window), values_(static_cast<size_t>(window.coset_count()), Complex(0.0)) {}
    GridState(const Window& window, std::vector<Complex> values);

    const Window& window() const { return win_; }
    const std::vector<Complex>& values() const { return values_; }
    Complex value(std::int64_t n) const { return values_[static_cast<size_t>(n)]; }
    void set_value(std::int64_t n, Complex v) { values_[static_cast<size_t>(n)] = v; }

    /// Exact quadrature of a locally constant function: sum |v|^2 p^{-K}.
    double norm_squared() const;
    double norm() const;

    /// Same function at a finer resolution (values replicated per child
    /// coset); exact.
    GridState refined(int resolution) const;

    GridState& operator+=(const GridState& other);
    GridState& operator-=(const GridState& other);
    GridState& operator*=(Complex scale);

private:
    Window win_;
    std::vector<Complex> values_;
};

GridState operator+(GridState a, const GridState& b);
GridState operator-(GridState a, const GridState& b);
GridState operator*(Complex scale, GridState a);

/// <f,g> = integral f(x) conj(g(x)) dx, an exact finite sum over the finest
/// cosets. A coarser state is refined first; domain mismatch throws.
Complex inner_product(const GridState& f, const GridState& g);

/// psi_rbk(x) = p^{-r/2} chi_p(p^{-1} k (p^r x - b)) on its support ball,
/// 0 outside. Direct evaluation from the digit expansion of x.
Complex eval_wavelet(const WaveletIndex& idx, const PAdicApprox& x);

/// Grid samples of a window wavelet (exact: window wavelets are locally
/// constant at scale K).
GridState sample_wavelet(const Window& window, const WaveletIndex& idx);
/// Grid samples of the normalized domain indicator p^{-R/2} Omega.
GridState constant_mode_state(const Window& window);

/// Sparse wavelet coefficients over the window plus the constant mode
/// (coefficient of the normalized domain indicator, kept separate because it
/// is the one window basis element that is not a wavelet).
class SpectralState {
public:
    explicit SpectralState(const Window& window) : win_(window) {}

    const Window& window() const { return win_; }
    const std::map<WaveletIndex, Complex, WaveletIndexLess>& coefficients() const {
        return coeffs_;
    }
    Complex coefficient(const WaveletIndex& idx) const;
    void set_coefficient(const WaveletIndex& idx, Complex c);
    void add_coefficient(const WaveletIndex& idx, Complex c);

    Complex constant_mode() const { return constant_mode_; }
    void set_constant_mode(Complex c) { constant_mode_ = c; }

    /// Parseval: sum |coeff|^2 + |constant_mode|^2.
    double norm_squared() const;
    double norm() const;

    SpectralState& operator+=(const SpectralState& other);
    SpectralState& operator-=(const SpectralState& other);
    SpectralState& operator*=(Complex scale);

private:
    Window win_;
    std::map<WaveletIndex, Complex, WaveletIndexLess> coeffs_;
    Complex constant_mode_{0.0};
};

SpectralState operator-(SpectralState a, const SpectralState& b);

Complex inner_product(const SpectralState& f, const SpectralState& g);

/// Hierarchical transform on the p-ary coset tree realizing the wavelet
/// basis; round trip is the identity to rounding and Parseval holds.
SpectralState grid_to_spectral(const GridState& f);
GridState spectral_to_grid(const SpectralState& s);

struct IndicatorExpansion {
    SpectralState state;
    /// Mass captured by window wavelets, sum |coeff|^2.
    double wavelet_mass;
    /// ||Omega_B||^2 minus the wavelet-captured mass: the part carried by
    /// scales beyond the window top (held by the constant mode).
    double tail_mass;
};

/// Expansion of the ball indicator Omega_B in the window basis (exact).
IndicatorExpansion expand_indicator(const Ball& b, const Window& window);

/// Type 2 Born density |psi_p|^2 as a grid of nonnegative reals; when
/// normalize is set the density integrates to 1 (zero-norm input throws).
GridState density_padic(const GridState& psi, bool normalize);
GridState density_padic(const SpectralState& psi, bool normalize);
/// Integral of a density grid over the domain, sum v p^{-K} (exact
/// quadrature).
double integrate_grid(const GridState& density);

/// phi^(l): discretization of a sampled function on Z_p, one value per coset
/// of p^l Z_p taken at the canonical coset representative.
GridState discretize(const std::function<Complex(const PAdicApprox&)>& f, int prime,
                     int resolution);

/// Joint state on R x Q_p. In the factorized form the state is the product
/// of its two factors; the optional joint coefficient matrix A_{rbk,m}
/// (rows: canonical wavelet ordinals then the constant mode; columns: the
/// harmonic level m) represents general, possibly entangled, states over the
/// harmonic x wavelet product basis.
struct ProductState {
    std::variant<RealPacketState, HarmonicCoefficients> real_part;
    std::variant<SpectralState, GridState> padic_part;
    std::optional<Eigen::MatrixXcd> joint;

    double padic_norm_squared() const;
    double real_norm_squared() const;
    /// ||product|| = ||real|| * ||padic||; with joint coefficients,
    /// sqrt(sum |A|^2).
    double norm() const;
};

/// Type 1 Born density |psi_inf|^2 on a sample grid; normalized by the
/// closed-form L2 norm when requested.
std::vector<double> density_real(const RealPacketState& psi, const std::vector<double>& grid,
                                 bool normalize);
std::vector<double> density_real(const HarmonicCoefficients& psi, const std::vector<double>& grid,
                                 bool normalize);

struct JointDensityTable {
    std::vector<double> real_points;
    std::vector<std::int64_t> coset_indices;
    /// values(i, j): density at (real_points[i], coset j).
    Eigen::MatrixXd values;
};

/// Type 3 Born density over the product space; integrates to 1 against
/// dx_inf x Haar within the real-grid quadrature tolerance.
JointDensityTable density_joint(const ProductState& psi, const std::vector<double>& real_grid);

/// CSV serialization: sidecar comment records p, R, K and the domain; rows
/// are `index,re,im` in canonical order. Spectral states carry the constant
/// mode as the final row (index = wavelet count).
void save_csv(const GridState& state, const std::string& path);
void save_csv(const SpectralState& state, const std::string& path);
GridState load_grid_csv(const std::string& path);
SpectralState load_spectral_csv(const std::string& path);

}  // namespace padicqm
