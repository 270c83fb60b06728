#include "padicqm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "padicqm/csv.hpp"

namespace padicqm {

namespace {

bool is_small_prime(int p) {
    if (p < 2 || p > 97) return false;
    for (int d = 2; d * d <= p; ++d) {
        if (p % d == 0) return false;
    }
    return true;
}

Rational parse_rational(const std::string& text, const std::string& field) {
    const auto parts = split(trim(text), '/');
    try {
        if (parts.size() == 1) return Rational(parse_int(parts[0], field));
        if (parts.size() == 2)
            return Rational(parse_int(parts[0], field), parse_int(parts[1], field));
    } catch (const std::exception&) {
    }
    throw ConfigError(field + ": expected a rational like '2' or '-2/3', got '" + text + "'");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (const auto& tok : split(text, ',')) {
        if (trim(tok).empty()) continue;
        try {
            out.push_back(parse_double(tok, field));
        } catch (const std::exception&) {
            throw ConfigError(field + ": cannot parse number '" + tok + "'");
        }
    }
    return out;
}

int padic_valuation(const Rational& q, int p) {
    if (q.numerator() == 0) throw std::invalid_argument("valuation of zero");
    int v = 0;
    for (long long n = q.numerator() < 0 ? -q.numerator() : q.numerator(); n % p == 0; n /= p) ++v;
    for (long long d = q.denominator(); d % p == 0; d /= p) --v;
    return v;
}

std::string kind_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::TwoSlit: return "two_slit";
        case ScenarioKind::Ctqw: return "ctqw";
        case ScenarioKind::Collapse: return "collapse";
        case ScenarioKind::Spectrum: return "spectrum";
    }
    return "?";
}

void write_header(std::ofstream& os, const ScenarioConfig& cfg) {
    for (const auto& line : cfg.resolved()) os << "# " << line << "\n";
}

std::ofstream open_output(const std::filesystem::path& path, const ScenarioConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_header(os, cfg);
    return os;
}

std::vector<double> make_real_grid(const ScenarioConfig& cfg) {
    std::vector<double> grid;
    const auto count = static_cast<std::int64_t>(std::floor(2.0 * cfg.real_extent /
                                                            cfg.real_spacing)) + 1;
    grid.reserve(static_cast<size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) grid.push_back(-cfg.real_extent + i * cfg.real_spacing);
    return grid;
}

double fringe_visibility(const std::vector<double>& grid, const std::vector<double>& density,
                         double half_width) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i]) > half_width) continue;
        if (first || density[i] < lo) lo = density[i];
        if (first || density[i] > hi) hi = density[i];
        first = false;
    }
    if (first || hi + lo == 0.0) return 0.0;
    return (hi - lo) / (hi + lo);
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(ScenarioKind kind, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    ScenarioConfig cfg;
    cfg.kind = kind;
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto pos = t.find('=');
        if (pos == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, pos));
        const std::string value = trim(t.substr(pos + 1));
        if (kv.contains(key))
            throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
        kv[key] = value;
    }

    const auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const auto take_int = [&](const char* key, auto& target) {
        if (auto v = take(key)) {
            try {
                target = static_cast<std::remove_reference_t<decltype(target)>>(
                    parse_int(*v, key));
            } catch (const std::exception&) {
                throw ConfigError(std::string(key) + ": cannot parse integer '" + *v + "'");
            }
        }
    };
    const auto take_double = [&](const char* key, double& target) {
        if (auto v = take(key)) {
            try {
                target = parse_double(*v, key);
            } catch (const std::exception&) {
                throw ConfigError(std::string(key) + ": cannot parse number '" + *v + "'");
            }
        }
    };

    if (auto v = take("scenario")) {
        if (*v != kind_name(kind))
            throw ConfigError("scenario: config says '" + *v + "' but the subcommand is '" +
                              kind_name(kind) + "'");
    }
    take_int("p", cfg.p);
    take_int("R", cfg.R);
    take_int("K", cfg.K);
    take_double("alpha", cfg.alpha);
    take_double("m_p", cfg.m_p);
    take_double("m_inf", cfg.m_inf);
    take_double("omega", cfg.omega);
    take_int("seed", cfg.seed);
    if (auto v = take("s")) cfg.s = parse_rational(*v, "s");
    take_int("L", cfg.L);
    take_double("sigma", cfg.sigma);
    if (auto v = take("times")) cfg.times = parse_double_list(*v, "times");
    take_double("real_extent", cfg.real_extent);
    take_double("real_spacing", cfg.real_spacing);
    take_int("quad_refine", cfg.quad_refine);
    if (auto v = take("matrix")) cfg.matrix_path = *v;
    if (auto v = take("matrix_format")) cfg.matrix_format = *v;
    take_double("gamma", cfg.gamma);
    take_int("level", cfg.level);
    if (auto v = take("sites")) {
        for (const auto& tok : split(*v, ',')) {
            if (trim(tok).empty()) continue;
            cfg.sites.push_back(parse_int(tok, "sites"));
        }
    }
    take_int("start_site", cfg.start_site);
    if (auto v = take("scans")) {
        for (const auto& entry : split(*v, ';')) {
            if (trim(entry).empty()) continue;
            const auto fields = split(entry, ':');
            if (fields.size() != 3)
                throw ConfigError("scans: expected 't:l:center' entries, got '" + entry + "'");
            ScanSpec spec;
            try {
                spec.time = parse_double(fields[0], "scans");
                spec.scale = static_cast<int>(parse_int(fields[1], "scans"));
            } catch (const std::exception&) {
                throw ConfigError("scans: malformed entry '" + entry + "'");
            }
            spec.center = parse_rational(fields[2], "scans");
            cfg.scans.push_back(spec);
        }
    }

    if (!kv.empty()) throw ConfigError("unknown config key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

void ScenarioConfig::validate() const {
    if (!is_small_prime(p))
        throw ConfigError("p: " + std::to_string(p) + " is not a small prime (2..97)");
    if (R < 0) throw ConfigError("R: must be >= 0");
    if (K < 0) throw ConfigError("K: must be >= 0");
    if (R + K > 18) throw ConfigError("R+K: window dimension p^(R+K) too large");
    if (!(alpha > 0.0)) throw ConfigError("alpha: must be > 0");
    if (!(m_p > 0.0)) throw ConfigError("m_p: must be > 0");
    if (!(m_inf > 0.0)) throw ConfigError("m_inf: must be > 0");
    if (!(omega > 0.0)) throw ConfigError("omega: must be > 0");
    if (times.empty()) throw ConfigError("times: need at least one time value");
    for (double t : times) {
        if (!std::isfinite(t)) throw ConfigError("times: values must be finite");
    }

    if (kind == ScenarioKind::TwoSlit || kind == ScenarioKind::Collapse) {
        if (s.numerator() == 0) throw ConfigError("s: the slit location must be nonzero");
        if (L < 1) throw ConfigError("L: the slit scale must be a positive integer");
        if (K < L) throw ConfigError("K: resolution must be >= L to resolve the slit balls");
        // Slit balls are disjoint iff |2s|_p > p^-L.
        if (padic_valuation(Rational(2) * s, p) >= L)
            throw ConfigError("s: slit balls overlap (|2s|_p <= p^-L); "
                              "pick s or L with |2s|_p > p^-L");
        if (-padic_valuation(s, p) > R)
            throw ConfigError("s: slit lies outside the domain ball (|s|_p > p^R)");
        if (!(sigma > 0.0)) throw ConfigError("sigma: must be > 0");
        if (!(real_extent > 0.0)) throw ConfigError("real_extent: must be > 0");
        if (!(real_spacing > 0.0) || real_spacing > real_extent)
            throw ConfigError("real_spacing: must be in (0, real_extent]");
        if (2.0 * real_extent / real_spacing > 4e6)
            throw ConfigError("real_spacing: grid would exceed 4e6 points");
        if (quad_refine >= 0 && quad_refine < K)
            throw ConfigError("quad_refine: must be >= K (or omitted)");
        if (quad_refine > 24 || refinement() > 24)
            throw ConfigError("quad_refine: refinement beyond 24 digits is not supported");
    }

    if (kind == ScenarioKind::Ctqw) {
        if (level < 0) throw ConfigError("level: must be >= 0");
        if (level > 18) throw ConfigError("level: p^level too large");
        if (matrix_path.empty()) throw ConfigError("matrix: path to the Hermitian input required");
        if (matrix_format != "dense" && matrix_format != "edges")
            throw ConfigError("matrix_format: expected 'dense' or 'edges'");
        for (auto site : sites) {
            if (site < 0 || site >= ipow(p, level))
                throw ConfigError("sites: site " + std::to_string(site) + " outside G_l");
        }
    }

    if (kind == ScenarioKind::Collapse) {
        if (scans.empty()) throw ConfigError("scans: the collapse scenario needs a scan schedule");
        for (const auto& scan : scans) {
            if (!std::isfinite(scan.time) || scan.time < 0.0)
                throw ConfigError("scans: scan times must be finite and >= 0");
            if (scan.scale < 1)
                throw ConfigError("scans: scan balls need positive scale l (a small ball)");
            if (scan.scale > K)
                throw ConfigError("scans: scan scale exceeds the resolution K");
            if (scan.center.numerator() != 0 && -padic_valuation(scan.center, p) > R)
                throw ConfigError("scans: scan ball center outside the domain ball");
        }
    }
}

std::vector<std::string> ScenarioConfig::resolved() const {
    std::vector<std::string> out;
    out.push_back("scenario = " + kind_name(kind));
    out.push_back("p = " + std::to_string(p));
    out.push_back("R = " + std::to_string(R));
    out.push_back("K = " + std::to_string(K));
    out.push_back("alpha = " + format_double(alpha));
    out.push_back("m_p = " + format_double(m_p));
    out.push_back("m_inf = " + format_double(m_inf));
    out.push_back("omega = " + format_double(omega));
    out.push_back("seed = " + std::to_string(seed));
    if (kind == ScenarioKind::TwoSlit || kind == ScenarioKind::Collapse) {
        out.push_back("s = " + to_string(s));
        out.push_back("L = " + std::to_string(L));
        out.push_back("sigma = " + format_double(sigma));
        out.push_back("real_extent = " + format_double(real_extent));
        out.push_back("real_spacing = " + format_double(real_spacing));
        out.push_back("quad_refine = " + std::to_string(refinement()));
    }
    if (kind != ScenarioKind::Spectrum) {
        std::string ts;
        for (size_t i = 0; i < times.size(); ++i) ts += (i ? "," : "") + format_double(times[i]);
        out.push_back("times = " + ts);
    }
    if (kind == ScenarioKind::Ctqw) {
        out.push_back("matrix = " + matrix_path);
        out.push_back("matrix_format = " + matrix_format);
        out.push_back("gamma = " + format_double(gamma));
        out.push_back("level = " + std::to_string(level));
        std::string ss;
        for (size_t i = 0; i < sites.size(); ++i) ss += (i ? "," : "") + std::to_string(sites[i]);
        out.push_back("sites = " + (ss.empty() ? std::string("0..N-1") : ss));
        out.push_back("start_site = " + std::to_string(start_site));
    }
    if (kind == ScenarioKind::Collapse) {
        std::string sc;
        for (size_t i = 0; i < scans.size(); ++i) {
            sc += (i ? ";" : "") + format_double(scans[i].time) + ":" +
                  std::to_string(scans[i].scale) + ":" + to_string(scans[i].center);
        }
        out.push_back("scans = " + sc);
    }
    return out;
}

TwoSlitInitial make_two_slit_initial(const ScenarioConfig& cfg) {
    const Window win(cfg.p, cfg.R, cfg.K);
    const Ball slit_plus(cfg.p, cfg.L, PAdicApprox::from_rational(cfg.p, cfg.s));
    const Ball slit_minus(cfg.p, cfg.L, PAdicApprox::from_rational(cfg.p, -cfg.s));
    GridState grid(win);
    for (std::int64_t n = 0; n < win.coset_count(); ++n) {
        const PAdicApprox rep = win.representative(n);
        if (slit_plus.contains(rep) || slit_minus.contains(rep)) grid.set_value(n, Complex(1.0));
    }
    const double norm = grid.norm();
    if (norm == 0.0) throw ConfigError("s: slit balls do not meet the truncation window");
    grid *= Complex(1.0 / norm);
    SpectralState spectral = grid_to_spectral(grid);
    const double tail = std::norm(spectral.constant_mode());
    return {std::move(spectral), RealPacketState::two_gaussian_superposition(to_double(cfg.s),
                                                                             cfg.sigma),
            tail};
}

void run_two_slit(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Window win(cfg.p, cfg.R, cfg.K);
    const VladimirovOperator op(win, cfg.alpha, cfg.m_p);
    const TwoSlitInitial initial = make_two_slit_initial(cfg);
    const std::vector<double> real_grid = make_real_grid(cfg);
    const double cell = to_double(win.cell_measure());

    auto padic_pattern = open_output(std::filesystem::path(out_dir) / "padic_pattern.csv", cfg);
    padic_pattern << "# label=dark\n# tail_mass=" << format_double(initial.tail_mass) << "\n";
    padic_pattern << "t,index,monna_x,density\n";
    auto real_pattern = open_output(std::filesystem::path(out_dir) / "real_pattern.csv", cfg);
    real_pattern << "# label=bright\n";
    real_pattern << "t,x,density\n";
    auto summary = open_output(std::filesystem::path(out_dir) / "summary.csv", cfg);
    summary << "t,padic_norm,real_norm,fringe_visibility\n";

    std::vector<double> times = cfg.times;
    std::vector<SpectralState> padic_states;
    std::vector<double> norms, energies;
    const CompositeHamiltonian hamiltonian{op, FreeHamiltonian{cfg.m_inf}};

    for (double t : times) {
        const SpectralState psi_p = evolve_padic(initial.padic, op, t);
        const RealPacketState psi_inf = evolve_real_free(initial.real, cfg.m_inf, t);

        const double padic_norm = psi_p.norm();
        const double real_norm = psi_inf.norm();
        if (std::abs(padic_norm - 1.0) > 1e-9 || std::abs(real_norm - 1.0) > 1e-9)
            throw ContractError("two-slit: norm drift beyond 1e-9 at t = " + format_double(t));

        const GridState density = density_padic(psi_p, false);
        const double integral = integrate_grid(density);
        if (std::abs(integral - 1.0) > 1e-10)
            throw ContractError("two-slit: p-adic density integral drifted from 1 at t = " +
                                format_double(t));
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            const double monna_mid = to_double(win.coset_monna(n)) + 0.5 * cell;
            padic_pattern << format_double(t) << "," << n << "," << format_double(monna_mid)
                          << "," << format_double(density.value(n).real()) << "\n";
        }

        const std::vector<double> real_density = density_real(psi_inf, real_grid, false);
        double real_integral = 0.0;
        for (double v : real_density) real_integral += v * cfg.real_spacing;
        if (std::abs(real_integral - 1.0) > 1e-6)
            throw ContractError(
                "two-slit: real density integral drifted from 1 (increase real_extent) at t = " +
                format_double(t));
        for (size_t i = 0; i < real_grid.size(); ++i) {
            real_pattern << format_double(t) << "," << format_double(real_grid[i]) << ","
                         << format_double(real_density[i]) << "\n";
        }

        const double vis = fringe_visibility(real_grid, real_density,
                                             std::abs(to_double(cfg.s)));
        summary << format_double(t) << "," << format_double(padic_norm) << ","
                << format_double(real_norm) << "," << format_double(vis) << "\n";

        const ProductState product{psi_inf, psi_p, std::nullopt};
        padic_states.push_back(psi_p);
        norms.push_back(product.norm());
        energies.push_back(total_energy(product, hamiltonian));
    }

    write_trajectory_csv((std::filesystem::path(out_dir) / "padic_trajectory.csv").string(),
                         times, padic_states);
    write_diagnostics_csv((std::filesystem::path(out_dir) / "diagnostics.csv").string(), times,
                          norms, energies);
}

void run_ctqw(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Eigen::MatrixXcd matrix;
    if (cfg.matrix_format == "dense") {
        matrix = load_hermitian_csv(cfg.matrix_path);
    } else {
        matrix = ctqw_hamiltonian(load_adjacency_edge_list(cfg.matrix_path), cfg.gamma);
    }
    const KernelOperator op = [&] {
        try {
            return build_kernel(matrix, cfg.p, cfg.level, cfg.sites);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();

    const Window win(cfg.p, 0, cfg.level);
    std::int64_t start_index = -1;
    for (size_t a = 0; a < op.sites().size(); ++a) {
        if (op.sites()[a] == cfg.start_site) start_index = static_cast<std::int64_t>(a);
    }
    if (start_index < 0) throw ConfigError("start_site: not a member of the site set");
    const double scale = std::pow(static_cast<double>(cfg.p), 0.5 * cfg.level);
    GridState initial(win);
    const std::int64_t children = ipow(cfg.p, win.resolution() - cfg.level);
    for (std::int64_t m = 0; m < children; ++m)
        initial.set_value(cfg.start_site + m * ipow(cfg.p, cfg.level), Complex(scale));

    auto occupations = open_output(std::filesystem::path(out_dir) / "occupations.csv", cfg);
    occupations << "t,site,occupation\n";

    std::vector<GridState> states;
    std::vector<double> norms, energies;
    for (double t : cfg.times) {
        const GridState psi = evolve_ctqw(op, initial, t);
        const Eigen::VectorXcd coeffs = chi_coefficients(op, psi);
        double total = 0.0;
        for (size_t a = 0; a < op.sites().size(); ++a) {
            const double occ = std::norm(coeffs(static_cast<Eigen::Index>(a)));
            total += occ;
            occupations << format_double(t) << "," << op.sites()[a] << "," << format_double(occ)
                        << "\n";
        }
        if (std::abs(total - 1.0) > 1e-10)
            throw ContractError("ctqw: total occupation drifted from 1 at t = " +
                                format_double(t));
        states.push_back(psi);
        norms.push_back(psi.norm());
        energies.push_back(energy_expectation(op, psi));
    }
    write_trajectory_csv((std::filesystem::path(out_dir) / "trajectory.csv").string(), cfg.times,
                         states);
    write_diagnostics_csv((std::filesystem::path(out_dir) / "diagnostics.csv").string(), cfg.times,
                          norms, energies);
}

void run_collapse(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Window win(cfg.p, cfg.R, cfg.K);
    const VladimirovOperator op(win, cfg.alpha, cfg.m_p);
    const TwoSlitInitial initial = make_two_slit_initial(cfg);
    const double cell = to_double(win.cell_measure());

    auto densities = open_output(std::filesystem::path(out_dir) / "densities.csv", cfg);
    densities << "scan,stage,index,monna_x,density\n";

    std::vector<ScanRecord> records;
    std::vector<double> times, norms, energies;
    const CompositeHamiltonian hamiltonian{op, FreeHamiltonian{cfg.m_inf}};

    for (size_t i = 0; i < cfg.scans.size(); ++i) {
        const auto& scan = cfg.scans[i];
        Ball ball(cfg.p, scan.scale, PAdicApprox::from_rational(cfg.p, scan.center));
        ScanRegion region(ball);

        // The evolving state is never modified by a scan: the Schrodinger
        // equation drives the dynamics at all times, and each scan reports
        // the projection of the evolving state at its time.
        const SpectralState psi_p = evolve_padic(initial.padic, op, scan.time);
        const RealPacketState psi_inf = evolve_real_free(initial.real, cfg.m_inf, scan.time);
        if (std::abs(psi_p.norm() - 1.0) > 1e-9)
            throw ContractError("collapse: norm drift beyond 1e-9 at t = " +
                                format_double(scan.time));

        const RealFunction psi_inf_fn = [&psi_inf](double x) { return psi_inf.value(x); };
        const CollapseOutcome outcome =
            collapse_joint(psi_p, psi_inf_fn, region.ball, cfg.refinement());

        const GridState pre_density = density_padic(psi_p, false);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            const double monna_mid = to_double(win.coset_monna(n)) + 0.5 * cell;
            densities << i << ",pre," << n << "," << format_double(monna_mid) << ","
                      << format_double(pre_density.value(n).real()) << "\n";
        }
        if (!outcome.zero_weight) {
            const GridState post_density = density_padic(*outcome.post_padic, false);
            for (std::int64_t n = 0; n < win.coset_count(); ++n) {
                const double monna_mid = to_double(win.coset_monna(n)) + 0.5 * cell;
                densities << i << ",post," << n << "," << format_double(monna_mid) << ","
                          << format_double(post_density.value(n).real()) << "\n";
            }
        }

        records.push_back({scan.time, region.ball, outcome.interaction_probability,
                           outcome.weight,
                           outcome.post_padic ? outcome.post_padic->norm() : 0.0,
                           outcome.zero_weight});
        const ProductState product{psi_inf, psi_p, std::nullopt};
        times.push_back(scan.time);
        norms.push_back(product.norm());
        energies.push_back(total_energy(product, hamiltonian));
    }
    write_collapse_report((std::filesystem::path(out_dir) / "scan_report.txt").string(), records);
    write_diagnostics_csv((std::filesystem::path(out_dir) / "diagnostics.csv").string(), times,
                          norms, energies);
}

void run_spectrum(const ScenarioConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Window win(cfg.p, cfg.R, cfg.K);
    const VladimirovOperator op(win, cfg.alpha, cfg.m_p);
    auto table = open_output(std::filesystem::path(out_dir) / "spectrum.csv", cfg);
    table << "kind,r,multiplicity,energy\n";
    std::int64_t count = 0;
    for (int r = cfg.R; r >= 1 - cfg.K; --r) {
        const std::int64_t multiplicity = (cfg.p - 1) * ipow(cfg.p, cfg.R - r);
        count += multiplicity;
        table << "wavelet," << r << "," << multiplicity << "," << format_double(op.energy(r))
              << "\n";
    }
    table << "constant,," << 1 << "," << format_double(op.constant_mode_energy()) << "\n";
    if (count + 1 != win.coset_count())
        throw ContractError("spectrum: multiplicities failed to sum to the window dimension");
}

void run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    switch (cfg.kind) {
        case ScenarioKind::TwoSlit: run_two_slit(cfg, out_dir); return;
        case ScenarioKind::Ctqw: run_ctqw(cfg, out_dir); return;
        case ScenarioKind::Collapse: run_collapse(cfg, out_dir); return;
        case ScenarioKind::Spectrum: run_spectrum(cfg, out_dir); return;
    }
}

}  // namespace padicqm
