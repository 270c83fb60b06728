#include "padicqm/operators.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "padicqm/csv.hpp"

namespace padicqm {

namespace {

// p-adic valuation of a nonzero integer.
int int_valuation(std::int64_t n, int p) {
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

}  // namespace

VladimirovOperator::VladimirovOperator(const Window& window, double alpha, double mass)
    : win_(window), alpha_(alpha), mass_(mass) {
    if (!(alpha > 0.0)) throw std::invalid_argument("Vladimirov operator requires alpha > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("Vladimirov operator requires m_p > 0");
}

double VladimirovOperator::eigenvalue(int r) const {
    return std::pow(static_cast<double>(win_.prime()), (1.0 - r) * alpha_);
}

double VladimirovOperator::front_constant() const {
    const double p = win_.prime();
    return (1.0 - std::pow(p, alpha_)) / (1.0 - std::pow(p, -alpha_ - 1.0));
}

double VladimirovOperator::constant_mode_eigenvalue() const {
    // Interior value of D^alpha applied to the domain indicator:
    // -C_alpha * integral_{|z|>p^R} |z|^{-alpha-1} dz, a geometric series.
    const double p = win_.prime();
    const int R = win_.domain_exponent();
    const double tail = (1.0 - 1.0 / p) * std::pow(p, -(R + 1) * alpha_) /
                        (1.0 - std::pow(p, -alpha_));
    return -front_constant() * tail;
}

double VladimirovOperator::truncation_leakage() const {
    // D^alpha e0 equals C_alpha p^{R/2} |x|^{-alpha-1} for |x| > p^R; sum the
    // squared L2 mass over the spheres |x| = p^j, j > R.
    const double p = win_.prime();
    const int R = win_.domain_exponent();
    const double c = front_constant();
    const double mass2 = c * c * std::pow(p, R) * (1.0 - 1.0 / p) *
                         std::pow(p, -(R + 1) * (2.0 * alpha_ + 1.0)) /
                         (1.0 - std::pow(p, -(2.0 * alpha_ + 1.0)));
    return std::sqrt(mass2);
}

SpectralState apply_vladimirov_spectral(const VladimirovOperator& op, const SpectralState& s) {
    if (!(op.window() == s.window()))
        throw std::invalid_argument("apply_vladimirov_spectral: window mismatch");
    SpectralState out(s.window());
    for (const auto& [idx, c] : s.coefficients()) {
        out.set_coefficient(idx, c * op.eigenvalue(idx.r));
    }
    out.set_constant_mode(s.constant_mode() * op.constant_mode_eigenvalue());
    return out;
}

GridState apply_vladimirov_direct(const VladimirovOperator& op, const GridState& f) {
    if (!(op.window() == f.window()))
        throw std::invalid_argument("apply_vladimirov_direct: window mismatch");
    const Window& win = f.window();
    const double p = win.prime();
    const int R = win.domain_exponent();
    const int K = win.resolution();
    const std::int64_t n_cells = win.coset_count();
    const double c_alpha = op.front_constant();
    const double alpha = op.alpha();

    // |c_n - c_m| = p^{R - v_p(n-m)} for canonical representatives c = n p^{-R};
    // precompute p^{-K} |d|^{-alpha-1} per valuation of the index difference.
    const int max_v = R + K;
    std::vector<double> coset_weight(static_cast<size_t>(max_v), 0.0);
    for (int v = 0; v < max_v; ++v) {
        coset_weight[static_cast<size_t>(v)] =
            std::pow(p, -K) * std::pow(p, -(R - v) * (alpha + 1.0));
    }
    // Tail over |z| > p^R where f vanishes: integral |z|^{-alpha-1} dz.
    const double tail = (1.0 - 1.0 / p) * std::pow(p, -(R + 1) * alpha) /
                        (1.0 - std::pow(p, -alpha));

    GridState out(win);
    for (std::int64_t n = 0; n < n_cells; ++n) {
        Complex acc(0.0);
        for (std::int64_t m = 0; m < n_cells; ++m) {
            if (m == n) continue;
            const int v = int_valuation(m - n, win.prime());
            acc += (f.value(m) - f.value(n)) * coset_weight[static_cast<size_t>(v)];
        }
        acc -= f.value(n) * tail;
        out.set_value(n, c_alpha * acc);
    }
    return out;
}

double energy_expectation(const VladimirovOperator& op, const SpectralState& s) {
    double sum = std::norm(s.constant_mode()) * op.constant_mode_energy();
    for (const auto& [idx, c] : s.coefficients()) sum += std::norm(c) * op.energy(idx.r);
    return sum;
}

KernelOperator build_kernel(const Eigen::MatrixXcd& matrix, int prime, int level,
                            std::vector<std::int64_t> sites) {
    if (prime < 2) throw std::invalid_argument("build_kernel: prime must be >= 2");
    if (level < 0) throw std::invalid_argument("build_kernel: level must be >= 0");
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("build_kernel: matrix not square");
    const std::int64_t n = matrix.rows();
    const std::int64_t capacity = ipow(prime, level);
    if (n > capacity)
        throw std::invalid_argument("build_kernel: N = " + std::to_string(n) +
                                    " exceeds p^l = " + std::to_string(capacity));
    double max_entry = 0.0, max_dev = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            max_entry = std::max(max_entry, std::abs(matrix(i, j)));
            max_dev = std::max(max_dev, std::abs(matrix(i, j) - std::conj(matrix(j, i))));
        }
    }
    if (max_dev > 1e-12 * std::max(1.0, max_entry))
        throw std::invalid_argument("build_kernel: matrix is not Hermitian (max deviation " +
                                    format_double(max_dev) + ")");
    if (sites.empty()) {
        sites.resize(static_cast<size_t>(n));
        std::iota(sites.begin(), sites.end(), 0);
    }
    if (static_cast<std::int64_t>(sites.size()) != n)
        throw std::invalid_argument("build_kernel: site count does not match matrix size");
    for (auto s : sites) {
        if (s < 0 || s >= capacity)
            throw std::invalid_argument("build_kernel: site " + std::to_string(s) +
                                        " outside G_l");
    }

    KernelOperator op;
    op.prime_ = prime;
    op.level_ = level;
    op.sites_ = std::move(sites);
    op.matrix_ = matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix);
    op.evals_ = solver.eigenvalues();
    op.evecs_ = solver.eigenvectors();
    return op;
}

Complex KernelOperator::kernel_value(const PAdicApprox& x, const PAdicApprox& y) const {
    const Window win(prime_, 0, level_);
    const std::int64_t ix = win.coset_index_of(x);
    const std::int64_t iy = win.coset_index_of(y);
    Complex sum(0.0);
    for (size_t a = 0; a < sites_.size(); ++a) {
        if (sites_[a] != ix) continue;
        for (size_t b = 0; b < sites_.size(); ++b) {
            if (sites_[b] == iy)
                sum += matrix_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    }
    return sum * std::pow(static_cast<double>(prime_), level_);
}

double KernelOperator::kernel_l2_norm() const {
    // ||h||^2 = p^{2l} sum |H_JK|^2 mu(ball)^2 = sum |H_JK|^2.
    return matrix_.norm();
}

Eigen::VectorXcd chi_coefficients(const KernelOperator& op, const GridState& f) {
    if (f.window().prime() != op.prime() || f.window().domain_exponent() != 0)
        throw std::invalid_argument("chi_coefficients: state must live on Z_p");
    if (f.window().resolution() < op.level())
        throw std::invalid_argument("chi_coefficients: resolution coarser than the kernel level");
    const int K = f.window().resolution();
    const std::int64_t children = ipow(op.prime(), K - op.level());
    const std::int64_t stride = ipow(op.prime(), op.level());
    const double cell = std::pow(static_cast<double>(op.prime()), -K);
    const double scale = std::pow(static_cast<double>(op.prime()), 0.5 * op.level());
    Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(op.sites().size()));
    for (size_t a = 0; a < op.sites().size(); ++a) {
        // <p^{l/2} Omega_J, f>: integrate f over the level-l coset.
        Complex acc(0.0);
        for (std::int64_t m = 0; m < children; ++m) {
            acc += f.value(op.sites()[a] + m * stride);
        }
        coeffs(static_cast<Eigen::Index>(a)) = scale * acc * cell;
    }
    return coeffs;
}

GridState chi_component(const KernelOperator& op, const Eigen::VectorXcd& coeffs,
                        const Window& window) {
    if (window.prime() != op.prime() || window.domain_exponent() != 0 ||
        window.resolution() < op.level())
        throw std::invalid_argument("chi_component: window must cover Z_p at resolution >= l");
    GridState out(window);
    const std::int64_t children = ipow(op.prime(), window.resolution() - op.level());
    const std::int64_t stride = ipow(op.prime(), op.level());
    const double scale = std::pow(static_cast<double>(op.prime()), 0.5 * op.level());
    for (size_t a = 0; a < op.sites().size(); ++a) {
        const Complex v = scale * coeffs(static_cast<Eigen::Index>(a));
        for (std::int64_t m = 0; m < children; ++m) {
            out.set_value(op.sites()[a] + m * stride, v);
        }
    }
    return out;
}

GridState apply_kernel(const KernelOperator& op, const GridState& f) {
    const Eigen::VectorXcd coeffs = chi_coefficients(op, f);
    return chi_component(op, op.matrix() * coeffs, f.window());
}

Eigen::MatrixXcd ctqw_hamiltonian(const Eigen::MatrixXd& adjacency, double gamma) {
    return (-gamma * adjacency).cast<Complex>();
}

Eigen::MatrixXcd load_hermitian_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open matrix file " + path);
    std::vector<std::vector<Complex>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto cols = split(t, ',');
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (cols.size() % 2 != 0)
            throw std::runtime_error(ctx + ": expected re,im pairs (even column count)");
        std::vector<Complex> row;
        for (size_t i = 0; i < cols.size(); i += 2) {
            row.emplace_back(parse_double(cols[i], ctx), parse_double(cols[i + 1], ctx));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(ctx + ": ragged row (expected " +
                                     std::to_string(rows.front().size()) + " entries)");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
    if (rows.size() != rows.front().size())
        throw std::runtime_error(path + ": matrix is not square (" + std::to_string(rows.size()) +
                                 " rows, " + std::to_string(rows.front().size()) + " columns)");
    Eigen::MatrixXcd m(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows.size(); ++j) m(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

Eigen::MatrixXd load_adjacency_edge_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open edge list " + path);
    struct Edge {
        long long u, v;
        double w;
    };
    std::vector<Edge> edges;
    long long max_vertex = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split(t, ' ');
        std::erase_if(fields, [](const std::string& s) { return trim(s).empty(); });
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw std::runtime_error(ctx + ": expected 'u v weight'");
        Edge e{parse_int(fields[0], ctx), parse_int(fields[1], ctx),
               parse_double(fields[2], ctx)};
        if (e.u < 0 || e.v < 0) throw std::runtime_error(ctx + ": negative vertex id");
        max_vertex = std::max({max_vertex, e.u, e.v});
        edges.push_back(e);
    }
    if (max_vertex < 0) throw std::runtime_error(path + ": empty edge list");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(max_vertex + 1, max_vertex + 1);
    for (const auto& e : edges) {
        a(e.u, e.v) += e.w;
        if (e.u != e.v) a(e.v, e.u) += e.w;
    }
    return a;
}

double RealEigensystem::eigenfunction(int m, double x) const {
    const double scale = std::sqrt(mass * omega);
    return std::sqrt(scale) * hermite_function(m, scale * x);
}

RealEigensystem real_eigensystem(const RealHamiltonian& h, int cutoff) {
    if (std::holds_alternative<FreeHamiltonian>(h))
        throw std::invalid_argument(
            "real_eigensystem: the free Hamiltonian has continuous spectrum; "
            "evolve packets with the closed-form propagator instead");
    const auto& harmonic = std::get<HarmonicHamiltonian>(h);
    if (cutoff < 1) throw std::invalid_argument("real_eigensystem: cutoff must be >= 1");
    RealEigensystem sys{harmonic.mass, harmonic.omega, {}};
    sys.energies.resize(static_cast<size_t>(cutoff));
    for (int m = 0; m < cutoff; ++m) sys.energies[static_cast<size_t>(m)] =
        harmonic.omega * (m + 0.5);
    return sys;
}

}  // namespace padicqm
