#pragma once

#include <string>
#include <vector>

#include "padicqm/operators.hpp"
#include "padicqm/states.hpp"

namespace padicqm {

/// Unitary time evolution: every sector diagonalizes in closed form, so all
/// evolution is spectral (exact phases, never time-stepped).

/// Coefficient (r,b,k) picks up exp(-i t p^((1-r) alpha) / (2 m_p)); the
/// constant mode evolves with the Galerkin diagonal lambda0.
SpectralState evolve_padic(const SpectralState& s, const VladimirovOperator& op, double t);

/// Closed-form free propagator: each Gaussian term keeps its center, the
/// squared width moves to width_sq + i t / mass, and the amplitude picks up
/// sqrt(width_sq / new_width_sq). Norm is preserved exactly.
RealPacketState evolve_real_free(const RealPacketState& psi, double mass, double t);

/// Coefficient m picks up exp(-i t omega (m + 1/2)).
HarmonicCoefficients evolve_real_harmonic(const HarmonicCoefficients& psi, double t);

/// The chi_N component evolves by the N x N matrix exponential of -itH
/// (through the cached eigendecomposition); the orthocomplement is left
/// untouched (the kernel annihilates it).
GridState evolve_ctqw(const KernelOperator& op, const GridState& initial, double t);

/// Separable evolution under H_inf + H_p: each factor evolves independently
/// and joint coefficients A_{rbk,m} acquire the phase exp(-i t (E_rbk+E_m)).
ProductState evolve_product(const ProductState& psi, const CompositeHamiltonian& h, double t);

/// A composite Hamiltonian with the time grid to sweep.
struct EvolutionPlan {
    CompositeHamiltonian hamiltonian;
    std::vector<double> times;
};

/// <psi, H psi> per sector; conserved along the corresponding evolution.
double kinetic_energy(const RealPacketState& psi, double mass);
double energy_expectation(const HarmonicCoefficients& psi);
double energy_expectation(const KernelOperator& op, const GridState& psi);
double total_energy(const ProductState& psi, const CompositeHamiltonian& h);

/// Trajectory CSV: rows `t,index,re,im` in canonical index order.
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<SpectralState>& states);
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<GridState>& states);
/// Diagnostics CSV: rows `t,norm,energy`.
void write_diagnostics_csv(const std::string& path, const std::vector<double>& times,
                           const std::vector<double>& norms, const std::vector<double>& energies);

}  // namespace padicqm
