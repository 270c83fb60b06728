#include "padicqm/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "padicqm/csv.hpp"

namespace padicqm {

namespace {
constexpr double kPi = std::numbers::pi;

void check_finite_time(double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("evolution time must be finite");
}
}  // namespace

SpectralState evolve_padic(const SpectralState& s, const VladimirovOperator& op, double t) {
    if (!(op.window() == s.window()))
        throw std::invalid_argument("evolve_padic: window mismatch");
    check_finite_time(t);
    SpectralState out(s.window());
    for (const auto& [idx, c] : s.coefficients()) {
        out.set_coefficient(idx, c * std::polar(1.0, -t * op.energy(idx.r)));
    }
    out.set_constant_mode(s.constant_mode() * std::polar(1.0, -t * op.constant_mode_energy()));
    return out;
}

RealPacketState evolve_real_free(const RealPacketState& psi, double mass, double t) {
    if (!(mass > 0.0)) throw std::invalid_argument("evolve_real_free: mass must be positive");
    check_finite_time(t);
    std::vector<GaussianTerm> terms = psi.terms();
    const Complex shift(0.0, t / mass);
    for (auto& term : terms) {
        const Complex moved = term.width_sq + shift;
        term.amplitude *= std::sqrt(term.width_sq) / std::sqrt(moved);
        term.width_sq = moved;
    }
    return RealPacketState(std::move(terms));
}

HarmonicCoefficients evolve_real_harmonic(const HarmonicCoefficients& psi, double t) {
    check_finite_time(t);
    HarmonicCoefficients out = psi;
    for (size_t m = 0; m < out.coeffs.size(); ++m) {
        out.coeffs[m] *= std::polar(1.0, -t * psi.omega * (static_cast<double>(m) + 0.5));
    }
    return out;
}

GridState evolve_ctqw(const KernelOperator& op, const GridState& initial, double t) {
    check_finite_time(t);
    const Eigen::VectorXcd coeffs = chi_coefficients(op, initial);
    Eigen::VectorXcd phases(op.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::polar(1.0, -t * op.eigenvalues()(i));
    }
    const Eigen::VectorXcd evolved =
        op.eigenvectors() * phases.asDiagonal() * (op.eigenvectors().adjoint() * coeffs);
    // initial = chi component + orthocomplement; only the former evolves.
    GridState out = initial;
    out -= chi_component(op, coeffs, initial.window());
    out += chi_component(op, evolved, initial.window());
    return out;
}

namespace {

double joint_wavelet_energy(const VladimirovOperator& op, std::int64_t row) {
    const auto& indices = op.window().wavelet_indices();
    if (row < static_cast<std::int64_t>(indices.size()))
        return op.energy(indices[static_cast<size_t>(row)].r);
    return op.constant_mode_energy();
}

}  // namespace

ProductState evolve_product(const ProductState& psi, const CompositeHamiltonian& h, double t) {
    check_finite_time(t);
    ProductState out = psi;

    // Real sector.
    if (std::holds_alternative<RealPacketState>(psi.real_part)) {
        if (!std::holds_alternative<FreeHamiltonian>(h.real))
            throw std::invalid_argument(
                "evolve_product: packet states evolve under the free Hamiltonian only");
        out.real_part = evolve_real_free(std::get<RealPacketState>(psi.real_part),
                                         std::get<FreeHamiltonian>(h.real).mass, t);
    } else {
        if (!std::holds_alternative<HarmonicHamiltonian>(h.real))
            throw std::invalid_argument(
                "evolve_product: harmonic coefficients need the harmonic Hamiltonian");
        const auto& coeffs = std::get<HarmonicCoefficients>(psi.real_part);
        const auto& ham = std::get<HarmonicHamiltonian>(h.real);
        if (coeffs.omega != ham.omega || coeffs.mass != ham.mass)
            throw std::invalid_argument("evolve_product: harmonic sector parameters mismatch");
        out.real_part = evolve_real_harmonic(coeffs, t);
    }

    // p-adic sector.
    if (std::holds_alternative<SpectralState>(psi.padic_part)) {
        if (!std::holds_alternative<VladimirovOperator>(h.padic))
            throw std::invalid_argument(
                "evolve_product: spectral states evolve under the Vladimirov operator");
        out.padic_part = evolve_padic(std::get<SpectralState>(psi.padic_part),
                                      std::get<VladimirovOperator>(h.padic), t);
    } else {
        if (!std::holds_alternative<KernelOperator>(h.padic))
            throw std::invalid_argument(
                "evolve_product: grid states on Z_p evolve under a kernel operator");
        out.padic_part = evolve_ctqw(std::get<KernelOperator>(h.padic),
                                     std::get<GridState>(psi.padic_part), t);
    }

    if (psi.joint) {
        if (!std::holds_alternative<VladimirovOperator>(h.padic) ||
            !std::holds_alternative<HarmonicHamiltonian>(h.real))
            throw std::invalid_argument(
                "evolve_product: joint coefficients require harmonic x Vladimirov sectors");
        const auto& op = std::get<VladimirovOperator>(h.padic);
        const double omega = std::get<HarmonicHamiltonian>(h.real).omega;
        Eigen::MatrixXcd amps = *psi.joint;
        for (Eigen::Index w = 0; w < amps.rows(); ++w) {
            const double ew = joint_wavelet_energy(op, w);
            for (Eigen::Index m = 0; m < amps.cols(); ++m) {
                const double em = omega * (static_cast<double>(m) + 0.5);
                amps(w, m) *= std::polar(1.0, -t * (ew + em));
            }
        }
        out.joint = std::move(amps);
    }
    return out;
}

double kinetic_energy(const RealPacketState& psi, double mass) {
    // <psi, -psi''/(2m)> = (1/2m) integral |psi'|^2; each derivative brings
    // a factor -(x - mu)/Sigma, leaving Gaussian first/second moments.
    Complex sum(0.0);
    for (const auto& ti : psi.terms()) {
        for (const auto& tj : psi.terms()) {
            const PairGaussian pg = combine_conjugate_pair(ti, tj);
            const Complex u = std::conj(ti.center);
            const Complex v = tj.center;
            const Complex moment =
                (pg.w - u) * (pg.w - v) + Complex(0.5) / pg.q;
            sum += pg.gamma / (std::conj(ti.width_sq) * tj.width_sq) *
                   std::sqrt(kPi / pg.q) * moment;
        }
    }
    return sum.real() / (2.0 * mass);
}

double energy_expectation(const HarmonicCoefficients& psi) {
    double sum = 0.0;
    for (size_t m = 0; m < psi.coeffs.size(); ++m) {
        sum += std::norm(psi.coeffs[m]) * psi.omega * (static_cast<double>(m) + 0.5);
    }
    return sum;
}

double energy_expectation(const KernelOperator& op, const GridState& psi) {
    const Eigen::VectorXcd coeffs = chi_coefficients(op, psi);
    return (coeffs.adjoint() * op.matrix() * coeffs)(0).real();
}

double total_energy(const ProductState& psi, const CompositeHamiltonian& h) {
    if (psi.joint) {
        const auto& op = std::get<VladimirovOperator>(h.padic);
        const double omega = std::get<HarmonicHamiltonian>(h.real).omega;
        double sum = 0.0;
        for (Eigen::Index w = 0; w < psi.joint->rows(); ++w) {
            const double ew = joint_wavelet_energy(op, w);
            for (Eigen::Index m = 0; m < psi.joint->cols(); ++m) {
                sum += std::norm((*psi.joint)(w, m)) *
                       (ew + omega * (static_cast<double>(m) + 0.5));
            }
        }
        return sum;
    }
    // <psi x phi, (H_inf + H_p) psi x phi> = ||phi||^2 E_inf + ||psi||^2 E_p.
    double real_energy = 0.0;
    if (std::holds_alternative<RealPacketState>(psi.real_part)) {
        real_energy = kinetic_energy(std::get<RealPacketState>(psi.real_part),
                                     std::get<FreeHamiltonian>(h.real).mass);
    } else {
        real_energy = energy_expectation(std::get<HarmonicCoefficients>(psi.real_part));
    }
    double padic_energy = 0.0;
    if (std::holds_alternative<SpectralState>(psi.padic_part)) {
        padic_energy = energy_expectation(std::get<VladimirovOperator>(h.padic),
                                          std::get<SpectralState>(psi.padic_part));
    } else {
        padic_energy = energy_expectation(std::get<KernelOperator>(h.padic),
                                          std::get<GridState>(psi.padic_part));
    }
    return psi.padic_norm_squared() * real_energy + psi.real_norm_squared() * padic_energy;
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<SpectralState>& states) {
    if (times.size() != states.size())
        throw std::invalid_argument("write_trajectory_csv: times/states size mismatch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,index,re,im\n";
    for (size_t i = 0; i < times.size(); ++i) {
        const auto& indices = states[i].window().wavelet_indices();
        for (size_t w = 0; w < indices.size(); ++w) {
            os << format_double(times[i]) << "," << w << ","
               << format_complex_pair(states[i].coefficient(indices[w])) << "\n";
        }
        os << format_double(times[i]) << "," << indices.size() << ","
           << format_complex_pair(states[i].constant_mode()) << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<GridState>& states) {
    if (times.size() != states.size())
        throw std::invalid_argument("write_trajectory_csv: times/states size mismatch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,index,re,im\n";
    for (size_t i = 0; i < times.size(); ++i) {
        for (std::int64_t n = 0; n < states[i].window().coset_count(); ++n) {
            os << format_double(times[i]) << "," << n << ","
               << format_complex_pair(states[i].value(n)) << "\n";
        }
    }
}

void write_diagnostics_csv(const std::string& path, const std::vector<double>& times,
                           const std::vector<double>& norms,
                           const std::vector<double>& energies) {
    if (times.size() != norms.size() || times.size() != energies.size())
        throw std::invalid_argument("write_diagnostics_csv: column size mismatch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,norm,energy\n";
    for (size_t i = 0; i < times.size(); ++i) {
        os << format_double(times[i]) << "," << format_double(norms[i]) << ","
           << format_double(energies[i]) << "\n";
    }
}

}  // namespace padicqm
