#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "padicqm/states.hpp"

namespace padicqm {

/// The Taibleson-Vladimirov operator D^alpha on the truncation window:
///   D^alpha f(x) = C_alpha integral (f(z)-f(x)) / |z-x|^(alpha+1) dz,
///   C_alpha = (1-p^alpha)/(1-p^(-alpha-1)).
/// Window wavelets are eigenfunctions with eigenvalue p^((1-r) alpha); the
/// constant mode carries the Galerkin diagonal lambda0(R, alpha). The mass
/// enters only through energies E = eigenvalue / (2 m_p).
class VladimirovOperator {
public:
    VladimirovOperator(const Window& window, double alpha, double mass = 0.5);

    const Window& window() const { return win_; }
    double alpha() const { return alpha_; }
    double mass() const { return mass_; }

    /// p^((1-r) alpha).
    double eigenvalue(int r) const;
    /// lambda0(R, alpha) = <e0, D^alpha e0>, the interior value of D^alpha
    /// applied to the domain indicator; positive, so D^alpha stays positive
    /// on the window.
    double constant_mode_eigenvalue() const;

    double energy(int r) const { return eigenvalue(r) / (2.0 * mass_); }
    double constant_mode_energy() const { return constant_mode_eigenvalue() / (2.0 * mass_); }

    /// C_alpha.
    double front_constant() const;

    /// L2 mass of D^alpha e0 outside the domain ball: what the Galerkin
    /// projection of the constant mode discards (closed form).
    double truncation_leakage() const;

private:
    Window win_;
    double alpha_;
    double mass_;
};

/// Diagonal action in the wavelet basis.
SpectralState apply_vladimirov_spectral(const VladimirovOperator& op, const SpectralState& s);

/// Exact singular-integral evaluation for locally constant f supported in
/// the domain: a finite sum over cosets plus the closed-form geometric tail
/// over |z| > p^R where f vanishes. Agrees with the spectral action on the
/// domain.
GridState apply_vladimirov_direct(const VladimirovOperator& op, const GridState& f);

/// Energy expectation <f, D^alpha f> / (2 m_p).
double energy_expectation(const VladimirovOperator& op, const SpectralState& s);

/// Integral operator on L2(Z_p) attached to a Hermitian matrix through the
/// kernel h(x,y) = p^l sum_{J,K} H_{J,K} Omega_J(x) Omega_K(y): it acts as
/// the matrix on the span chi_N of the scaled ball indicators at level l and
/// annihilates the orthocomplement.
class KernelOperator {
public:
    int prime() const { return prime_; }
    int level() const { return level_; }
    /// Site set G_l^0 as canonical coset indices at level l (integers < p^l).
    const std::vector<std::int64_t>& sites() const { return sites_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    /// Eigendecomposition of the Hermitian matrix (cached for evolution).
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }

    /// Kernel value h(x,y) for x,y in Z_p.
    Complex kernel_value(const PAdicApprox& x, const PAdicApprox& y) const;
    /// ||h||_{L2(Z_p x Z_p)}, the operator-norm bound of the paper's
    /// construction.
    double kernel_l2_norm() const;

    friend KernelOperator build_kernel(const Eigen::MatrixXcd& matrix, int prime, int level,
                                       std::vector<std::int64_t> sites);

private:
    KernelOperator() = default;
    int prime_ = 2;
    int level_ = 0;
    std::vector<std::int64_t> sites_;
    Eigen::MatrixXcd matrix_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

/// Validates N <= p^l and Hermiticity (within 1e-12 of the largest entry).
/// An empty site list selects the first N cosets 0..N-1.
KernelOperator build_kernel(const Eigen::MatrixXcd& matrix, int prime, int level,
                            std::vector<std::int64_t> sites = {});

/// Exact finite-sum application; f must live on Z_p at resolution >= l.
/// The image lies in chi_N.
GridState apply_kernel(const KernelOperator& op, const GridState& f);

/// Coefficients of f against the chi_N basis p^{l/2} Omega_J, J in G_l^0.
Eigen::VectorXcd chi_coefficients(const KernelOperator& op, const GridState& f);
/// The chi_N component Sum c_J p^{l/2} Omega_J as a grid state.
GridState chi_component(const KernelOperator& op, const Eigen::VectorXcd& coeffs,
                        const Window& window);

/// CTQW convention: H = -gamma A from a symmetric adjacency matrix.
Eigen::MatrixXcd ctqw_hamiltonian(const Eigen::MatrixXd& adjacency, double gamma);

/// Dense CSV ingestion: one matrix row per line, entries as re,im pairs
/// (2N numbers per line). Validation errors name the offending line.
Eigen::MatrixXcd load_hermitian_csv(const std::string& path);
/// Edge list "u v weight" -> symmetric adjacency matrix. Vertices are
/// 0-based; the matrix size is 1 + the largest vertex.
Eigen::MatrixXd load_adjacency_edge_list(const std::string& path);

struct FreeHamiltonian {
    double mass = 0.5;
};

struct HarmonicHamiltonian {
    double mass = 0.5;
    double omega = 1.0;
};

/// Real-line Hamiltonian: Free evolves by the closed-form propagator
/// (continuous spectrum); Harmonic has eigenvalues omega (m + 1/2) with
/// Hermite-function eigenstates.
using RealHamiltonian = std::variant<FreeHamiltonian, HarmonicHamiltonian>;

struct RealEigensystem {
    double mass;
    double omega;
    std::vector<double> energies;

    /// theta_m evaluated by the Hermite recurrence.
    double eigenfunction(int m, double x) const;
};

/// Eigexpansion of the Harmonic variant up to the cutoff; the Free variant
/// has no L2 eigenbasis and throws (use the propagator instead).
RealEigensystem real_eigensystem(const RealHamiltonian& h, int cutoff);

/// H_inf + H_p acting on product states.
struct CompositeHamiltonian {
    std::variant<VladimirovOperator, KernelOperator> padic;
    RealHamiltonian real;
};

}  // namespace padicqm
