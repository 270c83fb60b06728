#include "padicqm/states.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "padicqm/csv.hpp"

namespace padicqm {

namespace {

void check_same_window(const Window& a, const Window& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": window mismatch");
}

// Unitary p-point DFT rows, kernel exp(-2 pi i j k / p) / sqrt(p).
std::vector<Complex> dft_roots(int p, double sign) {
    std::vector<Complex> roots(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        roots[static_cast<size_t>(j)] =
            std::polar(1.0, sign * 2.0 * std::numbers::pi * j / p);
    }
    return roots;
}

// Wavelet index of the node with canonical sub-index m at combine level l
// (nodes fix digits -R..l-2, the produced wavelets have r = 1-l).
WaveletIndex node_wavelet(const Window& win, int level, std::int64_t m, int k) {
    const int p = win.prime();
    const int depth = win.domain_exponent() + level - 1;
    std::vector<int> bdigits(static_cast<size_t>(depth), 0);
    // digit of the node at position i = digit of b at position i+1-l;
    // FractionIndex slot j holds the digit at position -(j+1).
    std::int64_t rem = m;
    for (int i = -win.domain_exponent(); i <= level - 2; ++i) {
        const int d = static_cast<int>(rem % p);
        rem /= p;
        bdigits[static_cast<size_t>(level - 2 - i)] = d;
    }
    return {1 - level, FractionIndex(p, std::move(bdigits)), k};
}

}  // namespace

GridState::GridState(const Window& window, std::vector<Complex> values)
    : win_(window), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != win_.coset_count())
        throw std::invalid_argument("grid state needs exactly p^(R+K) values");
}

double GridState::norm_squared() const {
    double sum = 0.0;
    for (const auto& v : values_) sum += std::norm(v);
    return sum * to_double(win_.cell_measure());
}

double GridState::norm() const { return std::sqrt(norm_squared()); }

GridState GridState::refined(int resolution) const {
    if (resolution < win_.resolution())
        throw std::invalid_argument("refined: target resolution is coarser");
    if (resolution == win_.resolution()) return *this;
    Window fine(win_.prime(), win_.domain_exponent(), resolution);
    std::vector<Complex> values(static_cast<size_t>(fine.coset_count()));
    const std::int64_t base = win_.coset_count();
    for (std::int64_t n = 0; n < fine.coset_count(); ++n) {
        values[static_cast<size_t>(n)] = values_[static_cast<size_t>(n % base)];
    }
    return GridState(fine, std::move(values));
}

GridState& GridState::operator+=(const GridState& other) {
    check_same_window(win_, other.win_, "grid add");
    for (size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridState& GridState::operator-=(const GridState& other) {
    check_same_window(win_, other.win_, "grid sub");
    for (size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridState& GridState::operator*=(Complex scale) {
    for (auto& v : values_) v *= scale;
    return *this;
}

GridState operator+(GridState a, const GridState& b) { return a += b; }
GridState operator-(GridState a, const GridState& b) { return a -= b; }
GridState operator*(Complex scale, GridState a) { return a *= scale; }

Complex inner_product(const GridState& f, const GridState& g) {
    if (f.window().prime() != g.window().prime() ||
        f.window().domain_exponent() != g.window().domain_exponent())
        throw std::invalid_argument("inner_product: domain mismatch");
    const int k = std::max(f.window().resolution(), g.window().resolution());
    const GridState& fr = f.window().resolution() == k ? f : f.refined(k);
    const GridState& gr = g.window().resolution() == k ? g : g.refined(k);
    Complex sum(0.0);
    for (std::int64_t n = 0; n < fr.window().coset_count(); ++n) {
        sum += fr.value(n) * std::conj(gr.value(n));
    }
    return sum * to_double(fr.window().cell_measure());
}

Complex eval_wavelet(const WaveletIndex& idx, const PAdicApprox& x) {
    const int p = x.prime();
    if (idx.b.prime() != p) throw std::invalid_argument("eval_wavelet: prime mismatch");
    // y = p^r x - b; support test is |y|_p <= 1.
    const PAdicApprox y = sub(shift(x, idx.r), idx.b.to_padic());
    if (auto v = y.valuation(); v && *v < 0) return Complex(0.0);
    const Rational frac = fractional_part(shift(mul_integer(y, idx.k), -1));
    const double phase = 2.0 * std::numbers::pi * to_double(frac);
    return std::pow(static_cast<double>(p), -0.5 * idx.r) * std::polar(1.0, phase);
}

GridState sample_wavelet(const Window& window, const WaveletIndex& idx) {
    if (!window.admissible(idx))
        throw std::invalid_argument("sample_wavelet: index not admissible in window");
    GridState out(window);
    for (std::int64_t n = 0; n < window.coset_count(); ++n) {
        out.set_value(n, eval_wavelet(idx, window.representative(n)));
    }
    return out;
}

GridState constant_mode_state(const Window& window) {
    GridState out(window);
    const Complex v(std::pow(static_cast<double>(window.prime()),
                             -0.5 * window.domain_exponent()));
    for (std::int64_t n = 0; n < window.coset_count(); ++n) out.set_value(n, v);
    return out;
}

Complex SpectralState::coefficient(const WaveletIndex& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? Complex(0.0) : it->second;
}

void SpectralState::set_coefficient(const WaveletIndex& idx, Complex c) {
    if (!win_.admissible(idx))
        throw std::invalid_argument("set_coefficient: index not admissible in window");
    if (c == Complex(0.0)) {
        coeffs_.erase(idx);
    } else {
        coeffs_[idx] = c;
    }
}

void SpectralState::add_coefficient(const WaveletIndex& idx, Complex c) {
    set_coefficient(idx, coefficient(idx) + c);
}

double SpectralState::norm_squared() const {
    double sum = std::norm(constant_mode_);
    for (const auto& [idx, c] : coeffs_) sum += std::norm(c);
    return sum;
}

double SpectralState::norm() const { return std::sqrt(norm_squared()); }

SpectralState& SpectralState::operator+=(const SpectralState& other) {
    check_same_window(win_, other.win_, "spectral add");
    for (const auto& [idx, c] : other.coeffs_) add_coefficient(idx, c);
    constant_mode_ += other.constant_mode_;
    return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& other) {
    check_same_window(win_, other.win_, "spectral sub");
    for (const auto& [idx, c] : other.coeffs_) add_coefficient(idx, -c);
    constant_mode_ -= other.constant_mode_;
    return *this;
}

SpectralState& SpectralState::operator*=(Complex scale) {
    for (auto& [idx, c] : coeffs_) c *= scale;
    constant_mode_ *= scale;
    return *this;
}

SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }

Complex inner_product(const SpectralState& f, const SpectralState& g) {
    check_same_window(f.window(), g.window(), "spectral inner_product");
    Complex sum = f.constant_mode() * std::conj(g.constant_mode());
    for (const auto& [idx, c] : f.coefficients()) sum += c * std::conj(g.coefficient(idx));
    return sum;
}

SpectralState grid_to_spectral(const GridState& f) {
    const Window& win = f.window();
    const int p = win.prime();
    const int R = win.domain_exponent();
    const int K = win.resolution();
    const auto roots = dft_roots(p, -1.0);
    const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));

    SpectralState out(win);
    // Leaf scaling coefficients <normalized coset indicator, f>.
    std::vector<Complex> scaling(f.values());
    const double leaf_scale = std::pow(static_cast<double>(p), -0.5 * K);
    for (auto& s : scaling) s *= leaf_scale;

    for (int level = K; level >= 1 - R; --level) {
        const std::int64_t nodes = ipow(p, R + level - 1);
        std::vector<Complex> next(static_cast<size_t>(nodes));
        for (std::int64_t m = 0; m < nodes; ++m) {
            for (int k = 0; k < p; ++k) {
                Complex acc(0.0);
                for (int j = 0; j < p; ++j) {
                    acc += roots[static_cast<size_t>(j * k % p)] *
                           scaling[static_cast<size_t>(m + j * nodes)];
                }
                acc *= inv_sqrt_p;
                if (k == 0) {
                    next[static_cast<size_t>(m)] = acc;
                } else {
                    out.set_coefficient(node_wavelet(win, level, m, k), acc);
                }
            }
        }
        scaling = std::move(next);
    }
    out.set_constant_mode(scaling[0]);
    return out;
}

GridState spectral_to_grid(const SpectralState& s) {
    const Window& win = s.window();
    const int p = win.prime();
    const int R = win.domain_exponent();
    const int K = win.resolution();
    const auto roots = dft_roots(p, 1.0);
    const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));

    std::vector<Complex> scaling{s.constant_mode()};
    std::vector<Complex> kcoef(static_cast<size_t>(p));
    for (int level = 1 - R; level <= K; ++level) {
        const std::int64_t nodes = ipow(p, R + level - 1);
        std::vector<Complex> next(static_cast<size_t>(nodes * p));
        for (std::int64_t m = 0; m < nodes; ++m) {
            kcoef[0] = scaling[static_cast<size_t>(m)];
            for (int k = 1; k < p; ++k) {
                kcoef[static_cast<size_t>(k)] = s.coefficient(node_wavelet(win, level, m, k));
            }
            for (int j = 0; j < p; ++j) {
                Complex acc(0.0);
                for (int k = 0; k < p; ++k) {
                    acc += roots[static_cast<size_t>(j * k % p)] * kcoef[static_cast<size_t>(k)];
                }
                next[static_cast<size_t>(m + j * nodes)] = acc * inv_sqrt_p;
            }
        }
        scaling = std::move(next);
    }
    const double leaf_scale = std::pow(static_cast<double>(p), 0.5 * K);
    for (auto& v : scaling) v *= leaf_scale;
    return GridState(win, std::move(scaling));
}

IndicatorExpansion expand_indicator(const Ball& b, const Window& window) {
    if (b.prime() != window.prime()) throw std::invalid_argument("expand_indicator: prime mismatch");
    if (const auto rel = ball_relation(b, window.domain());
        rel != BallRelation::Equal && rel != BallRelation::FirstInsideSecond)
        throw std::invalid_argument("expand_indicator: ball outside domain");
    if (b.scale() > window.resolution())
        throw std::invalid_argument("expand_indicator: ball finer than the window resolution");
    GridState grid(window);
    for (std::int64_t n = 0; n < window.coset_count(); ++n) {
        if (b.contains(window.representative(n))) grid.set_value(n, Complex(1.0));
    }
    SpectralState state = grid_to_spectral(grid);
    double wavelet_mass = 0.0;
    for (const auto& [idx, c] : state.coefficients()) wavelet_mass += std::norm(c);
    const double total = to_double(b.haar_measure());
    return {std::move(state), wavelet_mass, total - wavelet_mass};
}

GridState density_padic(const GridState& psi, bool normalize) {
    double scale = 1.0;
    if (normalize) {
        const double n2 = psi.norm_squared();
        if (n2 == 0.0) throw std::domain_error("density_padic: zero-norm state");
        scale = 1.0 / n2;
    }
    GridState out(psi.window());
    for (std::int64_t n = 0; n < psi.window().coset_count(); ++n) {
        out.set_value(n, Complex(std::norm(psi.value(n)) * scale));
    }
    return out;
}

GridState density_padic(const SpectralState& psi, bool normalize) {
    return density_padic(spectral_to_grid(psi), normalize);
}

double integrate_grid(const GridState& density) {
    Complex sum(0.0);
    for (const auto& v : density.values()) sum += v;
    return sum.real() * to_double(density.window().cell_measure());
}

GridState discretize(const std::function<Complex(const PAdicApprox&)>& f, int prime,
                     int resolution) {
    Window win(prime, 0, resolution);
    GridState out(win);
    for (std::int64_t n = 0; n < win.coset_count(); ++n) {
        out.set_value(n, f(win.representative(n)));
    }
    return out;
}

double ProductState::padic_norm_squared() const {
    return std::visit([](const auto& s) { return s.norm_squared(); }, padic_part);
}

double ProductState::real_norm_squared() const {
    return std::visit([](const auto& s) { return s.norm_squared(); }, real_part);
}

double ProductState::norm() const {
    if (joint) return joint->norm();
    return std::sqrt(real_norm_squared() * padic_norm_squared());
}

std::vector<double> density_real(const RealPacketState& psi, const std::vector<double>& grid,
                                 bool normalize) {
    double scale = 1.0;
    if (normalize) {
        const double n2 = psi.norm_squared();
        if (n2 == 0.0) throw std::domain_error("density_real: zero-norm state");
        scale = 1.0 / n2;
    }
    std::vector<double> out(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) out[i] = psi.density(grid[i]) * scale;
    return out;
}

std::vector<double> density_real(const HarmonicCoefficients& psi, const std::vector<double>& grid,
                                 bool normalize) {
    double scale = 1.0;
    if (normalize) {
        const double n2 = psi.norm_squared();
        if (n2 == 0.0) throw std::domain_error("density_real: zero-norm state");
        scale = 1.0 / n2;
    }
    std::vector<double> out(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) out[i] = std::norm(psi.value(grid[i])) * scale;
    return out;
}

JointDensityTable density_joint(const ProductState& psi, const std::vector<double>& real_grid) {
    const GridState padic_grid = std::holds_alternative<SpectralState>(psi.padic_part)
                                     ? spectral_to_grid(std::get<SpectralState>(psi.padic_part))
                                     : std::get<GridState>(psi.padic_part);
    const Window& win = padic_grid.window();
    JointDensityTable table;
    table.real_points = real_grid;
    table.coset_indices.resize(static_cast<size_t>(win.coset_count()));
    for (std::int64_t n = 0; n < win.coset_count(); ++n)
        table.coset_indices[static_cast<size_t>(n)] = n;
    table.values.resize(static_cast<Eigen::Index>(real_grid.size()),
                        static_cast<Eigen::Index>(win.coset_count()));

    if (psi.joint) {
        // Reconstruct Sum A_{w,m} theta_m(x) psi_w(x_p) over the product basis.
        const auto& harmonic = std::get<HarmonicCoefficients>(psi.real_part);
        const Eigen::MatrixXcd& amps = *psi.joint;
        const auto& indices = win.wavelet_indices();
        if (amps.rows() != static_cast<Eigen::Index>(win.coset_count()))
            throw std::invalid_argument(
                "density_joint: joint matrix needs one row per wavelet plus the constant mode");
        const double n2 = amps.squaredNorm();
        if (n2 == 0.0) throw std::domain_error("density_joint: zero-norm state");
        // Basis values per coset: wavelet rows then the constant mode.
        Eigen::MatrixXcd basis(amps.rows(), win.coset_count());
        for (std::int64_t w = 0; w < static_cast<std::int64_t>(indices.size()); ++w) {
            const GridState g = sample_wavelet(win, indices[static_cast<size_t>(w)]);
            for (std::int64_t n = 0; n < win.coset_count(); ++n)
                basis(w, n) = g.value(n);
        }
        for (std::int64_t n = 0; n < win.coset_count(); ++n)
            basis(amps.rows() - 1, n) =
                Complex(std::pow(static_cast<double>(win.prime()), -0.5 * win.domain_exponent()));
        for (size_t i = 0; i < real_grid.size(); ++i) {
            Eigen::VectorXcd theta(amps.cols());
            for (Eigen::Index m = 0; m < amps.cols(); ++m)
                theta(m) = Complex(harmonic.eigenfunction(static_cast<int>(m), real_grid[i]));
            const Eigen::RowVectorXcd row = (theta.transpose() * amps.transpose()) * basis;
            for (std::int64_t n = 0; n < win.coset_count(); ++n)
                table.values(static_cast<Eigen::Index>(i), n) = std::norm(row(n)) / n2;
        }
        return table;
    }

    const double n2 = psi.real_norm_squared() * padic_grid.norm_squared();
    if (n2 == 0.0) throw std::domain_error("density_joint: zero-norm state");
    for (size_t i = 0; i < real_grid.size(); ++i) {
        const double real_density = std::visit(
            [&](const auto& s) { return std::norm(s.value(real_grid[i])); }, psi.real_part);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            table.values(static_cast<Eigen::Index>(i), n) =
                real_density * std::norm(padic_grid.value(n)) / n2;
        }
    }
    return table;
}

namespace {

void write_window_header(std::ofstream& os, const Window& win, const char* kind) {
    os << "# p=" << win.prime() << " R=" << win.domain_exponent() << " K=" << win.resolution()
       << " domain=p^-" << win.domain_exponent() << "*Zp kind=" << kind << "\n";
    os << "index,re,im\n";
}

Window parse_window_header(std::ifstream& is, const std::string& path, std::string* kind) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# p=", 0) != 0)
        throw std::runtime_error(path + ": missing state header");
    int p = 0, r = -1, k = -1;
    std::string kind_str;
    for (const auto& tok : split(line.substr(2), ' ')) {
        const auto kv = split(tok, '=');
        if (kv.size() != 2) continue;
        if (kv[0] == "p") p = static_cast<int>(parse_int(kv[1], path));
        if (kv[0] == "R") r = static_cast<int>(parse_int(kv[1], path));
        if (kv[0] == "K") k = static_cast<int>(parse_int(kv[1], path));
        if (kv[0] == "kind") kind_str = kv[1];
    }
    if (p < 2 || r < 0 || k < 0) throw std::runtime_error(path + ": malformed state header");
    if (kind) *kind = kind_str;
    if (!std::getline(is, line) || trim(line) != "index,re,im")
        throw std::runtime_error(path + ": missing column header");
    return Window(p, r, k);
}

}  // namespace

void save_csv(const GridState& state, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_window_header(os, state.window(), "grid");
    for (std::int64_t n = 0; n < state.window().coset_count(); ++n) {
        os << n << "," << format_complex_pair(state.value(n)) << "\n";
    }
}

void save_csv(const SpectralState& state, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_window_header(os, state.window(), "spectral");
    const auto& indices = state.window().wavelet_indices();
    for (size_t w = 0; w < indices.size(); ++w) {
        os << w << "," << format_complex_pair(state.coefficient(indices[w])) << "\n";
    }
    os << indices.size() << "," << format_complex_pair(state.constant_mode()) << "\n";
}

GridState load_grid_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string kind;
    Window win = parse_window_header(is, path, &kind);
    if (kind != "grid") throw std::runtime_error(path + ": not a grid state file");
    GridState out(win);
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 3) throw std::runtime_error(path + ": malformed row '" + line + "'");
        const std::int64_t n = parse_int(cols[0], path);
        if (n < 0 || n >= win.coset_count()) throw std::runtime_error(path + ": index out of range");
        out.set_value(n, Complex(parse_double(cols[1], path), parse_double(cols[2], path)));
    }
    return out;
}

SpectralState load_spectral_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string kind;
    Window win = parse_window_header(is, path, &kind);
    if (kind != "spectral") throw std::runtime_error(path + ": not a spectral state file");
    SpectralState out(win);
    const auto& indices = win.wavelet_indices();
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 3) throw std::runtime_error(path + ": malformed row '" + line + "'");
        const std::int64_t n = parse_int(cols[0], path);
        const Complex c(parse_double(cols[1], path), parse_double(cols[2], path));
        if (n == win.wavelet_count()) {
            out.set_constant_mode(c);
        } else if (n >= 0 && n < win.wavelet_count()) {
            if (c != Complex(0.0)) out.set_coefficient(indices[static_cast<size_t>(n)], c);
        } else {
            throw std::runtime_error(path + ": index out of range");
        }
    }
    return out;
}

}  // namespace padicqm
