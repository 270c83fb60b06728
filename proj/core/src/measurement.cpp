#include "padicqm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "padicqm/csv.hpp"

namespace padicqm {

namespace {

void check_ball_in_window(const Ball& b, const Window& win, const char* what) {
    if (b.prime() != win.prime())
        throw std::invalid_argument(std::string(what) + ": prime mismatch");
    const auto rel = ball_relation(b, win.domain());
    if (rel != BallRelation::Equal && rel != BallRelation::FirstInsideSecond)
        throw std::invalid_argument(std::string(what) + ": ball outside domain");
    if (b.scale() > win.resolution())
        throw std::invalid_argument(std::string(what) + ": ball finer than the window resolution");
}

double uniform01(std::mt19937_64& engine) {
    // 53-bit mantissa; implementation-independent, unlike the distributions.
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

ScanRegion::ScanRegion(const Ball& b) : ball(b), monna_image(monna_image_of_ball(b)) {
    if (b.scale() < 1)
        throw std::invalid_argument("scan region: the scanned ball needs positive scale l");
}

WaveletRestriction restrict_wavelet(const WaveletIndex& idx, const Ball& b) {
    const Ball supp(idx.b.prime(), -idx.r, shift(idx.b.to_padic(), -idx.r));
    switch (ball_relation(supp, b)) {
        case BallRelation::Equal:
        case BallRelation::FirstInsideSecond:
            return {RestrictionCase::Unchanged, Complex(0.0)};
        case BallRelation::SecondInsideFirst:
            // The character is constant on B; evaluate at the ball center.
            return {RestrictionCase::ConstantOnBall, eval_wavelet(idx, b.center())};
        case BallRelation::Disjoint:
            return {RestrictionCase::Zero, Complex(0.0)};
    }
    throw std::logic_error("unreachable");
}

BallProjection project_ball(const SpectralState& psi, const Ball& b) {
    const Window& win = psi.window();
    check_ball_in_window(b, win, "project_ball");
    SpectralState inside(win);
    Complex indicator_amplitude(0.0);
    for (const auto& [idx, c] : psi.coefficients()) {
        const auto restriction = restrict_wavelet(idx, b);
        switch (restriction.kind) {
            case RestrictionCase::Unchanged:
                inside.set_coefficient(idx, c);
                break;
            case RestrictionCase::ConstantOnBall:
                indicator_amplitude += c * restriction.constant_value;
                break;
            case RestrictionCase::Zero:
                break;
        }
    }
    // Constant mode: the normalized domain indicator restricted to B.
    if (b == win.domain()) {
        inside.set_constant_mode(inside.constant_mode() + psi.constant_mode());
    } else {
        indicator_amplitude +=
            psi.constant_mode() *
            std::pow(static_cast<double>(win.prime()), -0.5 * win.domain_exponent());
    }
    if (indicator_amplitude != Complex(0.0)) {
        SpectralState chopped = expand_indicator(b, win).state;
        chopped *= indicator_amplitude;
        inside += chopped;
    }
    SpectralState outside = psi;
    outside -= inside;
    return {std::move(inside), std::move(outside)};
}

PullbackResult pullback_real(const RealFunction& psi_inf, const GridState& psi_p,
                             int refinement) {
    if (refinement < psi_p.window().resolution())
        throw std::invalid_argument("pullback_real: refinement below the state resolution");
    const GridState fine = psi_p.refined(refinement);
    const Window& win = fine.window();
    const double cell = to_double(win.cell_measure());

    GridState out(win);
    std::vector<std::pair<double, double>> samples;  // (monna midpoint, |psi_inf|^2)
    samples.reserve(static_cast<size_t>(win.coset_count()));
    for (std::int64_t n = 0; n < win.coset_count(); ++n) {
        const double mid = to_double(win.coset_monna(n)) + 0.5 * cell;
        const Complex v = psi_inf(mid);
        out.set_value(n, fine.value(n) * v);
        samples.emplace_back(mid, std::norm(v));
    }
    std::sort(samples.begin(), samples.end());
    double lipschitz = 0.0;
    for (size_t i = 1; i < samples.size(); ++i) {
        const double dx = samples[i].first - samples[i - 1].first;
        if (dx > 0.0)
            lipschitz = std::max(lipschitz,
                                 std::abs(samples[i].second - samples[i - 1].second) / dx);
    }
    return {std::move(out), lipschitz * cell};
}

double interaction_probability(const GridState& psi_p, const RealFunction& psi_inf, const Ball& b,
                               int refinement) {
    check_ball_in_window(b, psi_p.window(), "interaction_probability");
    const PullbackResult joint = pullback_real(psi_inf, psi_p, refinement);
    const Window& win = joint.state.window();
    const double cell = to_double(win.cell_measure());
    double total = 0.0, inside = 0.0;
    for (std::int64_t n = 0; n < win.coset_count(); ++n) {
        const double mass = std::norm(joint.state.value(n)) * cell;
        total += mass;
        if (b.contains(win.representative(n))) inside += mass;
    }
    if (total == 0.0)
        throw std::domain_error("interaction_probability: zero joint weight A(M)");
    return inside / total;
}

double interaction_probability(const SpectralState& psi_p, const RealFunction& psi_inf,
                               const Ball& b, int refinement) {
    return interaction_probability(spectral_to_grid(psi_p), psi_inf, b, refinement);
}

CollapseOutcome collapse_joint(const SpectralState& psi_p, const RealFunction& psi_inf,
                               const Ball& b, int refinement) {
    const BallProjection projection = project_ball(psi_p, b);
    const PullbackResult joint = pullback_real(psi_inf, spectral_to_grid(psi_p), refinement);
    const Window& fine = joint.state.window();
    const double cell = to_double(fine.cell_measure());

    GridState localized(fine);
    double weight = 0.0, total = 0.0;
    for (std::int64_t n = 0; n < fine.coset_count(); ++n) {
        const double mass = std::norm(joint.state.value(n)) * cell;
        total += mass;
        if (b.contains(fine.representative(n))) {
            localized.set_value(n, joint.state.value(n));
            weight += mass;
        }
    }
    // A scan that finds nothing: the weight vanishes up to representation
    // roundoff (spectral/grid transforms leave ~1e-16 amplitude noise).
    const bool zero_weight = weight <= 1e-24 * std::max(total, 1e-300);
    CollapseOutcome outcome{zero_weight, weight, total > 0.0 ? weight / total : 0.0,
                            std::move(localized), std::nullopt};
    if (!outcome.zero_weight) {
        const double inside_norm = projection.inside.norm();
        if (inside_norm > 0.0) {
            SpectralState post = projection.inside;
            post *= Complex(1.0 / inside_norm);
            outcome.post_padic = std::move(post);
        }
    }
    return outcome;
}

CollapseOutcome collapse_joint(const ProductState& psi, const Ball& b, int refinement) {
    const SpectralState* spectral = std::get_if<SpectralState>(&psi.padic_part);
    if (spectral == nullptr)
        throw std::invalid_argument("collapse_joint: the p-adic factor must be spectral");
    RealFunction psi_inf = std::visit(
        [](const auto& s) -> RealFunction {
            return [state = s](double x) { return state.value(x); };
        },
        psi.real_part);
    return collapse_joint(*spectral, psi_inf, b, refinement);
}

RealPacketState grw_multiply(const RealPacketState& psi, double r, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("grw: sigma must be positive");
    const double norm_factor = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    const Complex c(1.0 / (4.0 * sigma * sigma));
    std::vector<GaussianTerm> terms = psi.terms();
    for (auto& term : terms) {
        const Complex q = Complex(1.0) / (2.0 * term.width_sq);
        const Complex combined = q + c;
        const Complex center = (c * r + q * term.center) / combined;
        const Complex delta = Complex(r) - term.center;
        term.amplitude *= norm_factor * std::exp(-c * q * delta * delta / combined);
        term.center = center;
        term.width_sq = Complex(1.0) / (2.0 * combined);
    }
    return RealPacketState(std::move(terms));
}

double grw_probability(const RealPacketState& psi, double r, double sigma) {
    return grw_multiply(psi, r, sigma).norm();
}

double grw_density(const RealPacketState& psi, double r, double sigma) {
    return grw_multiply(psi, r, sigma).norm_squared();
}

RealPacketState grw_localize(const RealPacketState& psi, double r, double sigma) {
    RealPacketState product = grw_multiply(psi, r, sigma);
    const double p = product.norm();
    if (p == 0.0) throw std::domain_error("grw_localize: P(r) = 0");
    return product.scaled(Complex(1.0 / p));
}

namespace {

// Inverse-CDF draw from P^2(r) on a deterministic midpoint grid.
double sample_localization_center(const RealPacketState& psi, double sigma, double u) {
    constexpr int kGridSize = 4096;
    const auto [lo0, hi0] = psi.support_range(10.0);
    const double lo = lo0 - 8.0 * sigma;
    const double hi = hi0 + 8.0 * sigma;
    const double h = (hi - lo) / kGridSize;
    std::vector<double> density(kGridSize);
    double total = 0.0;
    for (int i = 0; i < kGridSize; ++i) {
        density[static_cast<size_t>(i)] = grw_density(psi, lo + (i + 0.5) * h, sigma);
        total += density[static_cast<size_t>(i)];
    }
    const double target = u * total;
    double acc = 0.0;
    for (int i = 0; i < kGridSize; ++i) {
        const double next = acc + density[static_cast<size_t>(i)];
        if (next >= target || i == kGridSize - 1) {
            const double frac = density[static_cast<size_t>(i)] > 0.0
                                    ? (target - acc) / density[static_cast<size_t>(i)]
                                    : 0.5;
            return lo + (i + std::clamp(frac, 0.0, 1.0)) * h;
        }
        acc = next;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

GrwTrajectory grw_trajectory(const RealPacketState& psi0, const GrwParams& params, double horizon,
                             double mass, std::uint64_t seed) {
    if (!(params.sigma > 0.0) || !(params.lambda > 0.0))
        throw std::invalid_argument("grw_trajectory: sigma and lambda must be positive");
    if (!(horizon >= 0.0)) throw std::invalid_argument("grw_trajectory: horizon must be >= 0");
    std::mt19937_64 engine(seed);
    GrwTrajectory out{{}, psi0};
    double t = 0.0;
    while (true) {
        const double u = uniform01(engine);
        const double gap = -std::log1p(-u) / params.lambda;
        if (t + gap >= horizon) {
            out.final_state = evolve_real_free(out.final_state, mass, horizon - t);
            break;
        }
        t += gap;
        out.final_state = evolve_real_free(out.final_state, mass, gap);
        const double pre_norm = out.final_state.norm();
        const double r = sample_localization_center(out.final_state, params.sigma,
                                                    uniform01(engine));
        out.final_state = grw_localize(out.final_state, r, params.sigma);
        out.events.push_back({t, r, pre_norm, out.final_state.norm()});
    }
    return out;
}

void write_grw_event_log(const std::string& path, const std::vector<GrwEvent>& events) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t_event,r,pre_norm,post_norm\n";
    for (const auto& e : events) {
        os << format_double(e.time) << "," << format_double(e.r) << ","
           << format_double(e.pre_norm) << "," << format_double(e.post_norm) << "\n";
    }
}

std::string to_string(const Ball& b) {
    return "{" + render(b.center()) + "} + p^" + std::to_string(b.scale()) + "*Zp";
}

void write_collapse_report(const std::string& path, const std::vector<ScanRecord>& records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        os << "scan " << i << "\n";
        os << "  t         = " << format_double(rec.time) << "\n";
        os << "  ball      = " << to_string(rec.ball) << "\n";
        os << "  P_int     = " << format_double(rec.p_int) << "\n";
        os << "  weight    = " << format_double(rec.weight) << "\n";
        os << "  post_norm = " << format_double(rec.post_norm) << "\n";
        os << "  outcome   = " << (rec.zero_weight ? "zero-weight" : "localized") << "\n";
    }
}

}  // namespace padicqm
