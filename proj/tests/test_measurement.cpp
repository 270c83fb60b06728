#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "padicqm/measurement.hpp"
#include "test_rng.hpp"

using namespace padicqm;

namespace {

PAdicApprox from_q(int p, long long num, long long den = 1) {
    return PAdicApprox::from_rational(p, Rational(num, den));
}

// Grid-side oracle: pointwise multiplication by 1_B.
GridState grid_multiply_oracle(const SpectralState& psi, const Ball& b) {
    GridState g = spectral_to_grid(psi);
    for (std::int64_t n = 0; n < g.window().coset_count(); ++n) {
        if (!b.contains(g.window().representative(n))) g.set_value(n, Complex(0.0));
    }
    return g;
}

// Every ball of the window tree: scales -R..K, one per coset.
std::vector<Ball> window_balls(const Window& win) {
    std::vector<Ball> out;
    for (int l = -win.domain_exponent(); l <= win.resolution(); ++l) {
        const std::int64_t count = ipow(win.prime(), win.domain_exponent() + l);
        for (std::int64_t n = 0; n < count; ++n) {
            std::vector<int> digits;
            std::int64_t rem = n;
            for (int i = -win.domain_exponent(); i < l; ++i) {
                digits.push_back(static_cast<int>(rem % win.prime()));
                rem /= win.prime();
            }
            out.emplace_back(win.prime(), l,
                             PAdicApprox::from_digits(win.prime(), -win.domain_exponent(),
                                                      std::move(digits)));
        }
    }
    return out;
}

double max_grid_diff(const GridState& a, const GridState& b) {
    double out = 0.0;
    for (std::int64_t n = 0; n < a.window().coset_count(); ++n) {
        out = std::max(out, std::abs(a.value(n) - b.value(n)));
    }
    return out;
}

}  // namespace

TEST_CASE("scan region") {
    const Ball b(3, 2, from_q(3, 4));
    const ScanRegion region(b);
    CHECK(region.monna_image.length() == Rational(1, 9));
    CHECK_THROWS_AS(ScanRegion(Ball::unit_ball(3)), std::invalid_argument);
}

TEST_CASE("wavelet restriction (the three-row table)") {
    SUBCASE("support strictly inside B: unchanged") {
        const WaveletIndex idx{-2, FractionIndex(3), 1};  // support 4/9-ball at 0
        const Ball b(3, 1, PAdicApprox(3));               // 3 Z_3
        const auto restriction = restrict_wavelet(idx, b);
        CHECK(restriction.kind == RestrictionCase::Unchanged);
    }
    SUBCASE("B strictly inside the support: constant of modulus p^{-r/2}") {
        const WaveletIndex idx{1, FractionIndex(2), 1};  // support 2^{-1} Z_2
        const Ball b(2, 1, from_q(2, 1));                // 1 + 2 Z_2
        const auto restriction = restrict_wavelet(idx, b);
        CHECK(restriction.kind == RestrictionCase::ConstantOnBall);
        CHECK(std::abs(restriction.constant_value) ==
              doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-13));
        // The constant is the wavelet value anywhere on B.
        CHECK(std::abs(restriction.constant_value - eval_wavelet(idx, from_q(2, 3))) < 1e-13);
    }
    SUBCASE("disjoint supports: zero") {
        const WaveletIndex idx{0, FractionIndex(3, {1}), 2};  // support 1/3 + Z_3
        const Ball b(3, 0, from_q(3, 0));                     // Z_3
        const auto restriction = restrict_wavelet(idx, b);
        CHECK(restriction.kind == RestrictionCase::Zero);
    }
    SUBCASE("exhaustive case agreement with ball_relation over the window") {
        const Window win(2, 1, 2);
        for (const auto& idx : win.wavelet_indices()) {
            const Ball supp = win.support_ball(idx);
            for (const auto& b : window_balls(win)) {
                const auto restriction = restrict_wavelet(idx, b);
                switch (ball_relation(supp, b)) {
                    case BallRelation::Equal:
                    case BallRelation::FirstInsideSecond:
                        CHECK(restriction.kind == RestrictionCase::Unchanged);
                        break;
                    case BallRelation::SecondInsideFirst:
                        CHECK(restriction.kind == RestrictionCase::ConstantOnBall);
                        break;
                    case BallRelation::Disjoint:
                        CHECK(restriction.kind == RestrictionCase::Zero);
                        break;
                }
            }
        }
    }
}

TEST_CASE("ball projection") {
    const Window win(3, 1, 2);
    testing::Rng rng(404);
    SUBCASE("a state supported inside B projects to itself") {
        const Ball b(3, 0, from_q(3, 1));  // 1 + Z_3 inside the domain
        GridState g(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (b.contains(win.representative(n))) g.set_value(n, rng.complex_unit_box());
        }
        const SpectralState psi = grid_to_spectral(g);
        const auto projection = project_ball(psi, b);
        CHECK((projection.inside - psi).norm() < 1e-13);
        CHECK(projection.outside.norm() < 1e-13);
    }
    SUBCASE("a state supported in B^c projects to zero") {
        const Ball b(3, 0, from_q(3, 1));
        GridState g(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (!b.contains(win.representative(n))) g.set_value(n, rng.complex_unit_box());
        }
        const SpectralState psi = grid_to_spectral(g);
        const auto projection = project_ball(psi, b);
        CHECK(projection.inside.norm() < 1e-13);
        CHECK((projection.outside - psi).norm() < 1e-13);
    }
    SUBCASE("spectral projection equals grid multiplication by 1_B") {
        for (int trial = 0; trial < 5; ++trial) {
            const SpectralState psi = rng.spectral_state(win);
            for (const auto& b : window_balls(win)) {
                const auto projection = project_ball(psi, b);
                const GridState oracle = grid_multiply_oracle(psi, b);
                CHECK(max_grid_diff(spectral_to_grid(projection.inside), oracle) < 1e-12);
            }
        }
    }
    SUBCASE("Pythagoras over every window ball") {
        const SpectralState psi = rng.spectral_state(win);
        for (const auto& b : window_balls(win)) {
            const auto projection = project_ball(psi, b);
            CHECK(std::abs(projection.inside.norm_squared() + projection.outside.norm_squared() -
                           psi.norm_squared()) < 1e-12);
            CHECK(std::abs(inner_product(projection.inside, projection.outside)) < 1e-12);
        }
    }
    SUBCASE("projection applied to one wavelet reproduces the restriction table") {
        const SpectralState zero(win);
        for (const auto& idx : win.wavelet_indices()) {
            SpectralState psi = zero;
            psi.set_coefficient(idx, Complex(1.0));
            for (const auto& b : window_balls(win)) {
                const auto projection = project_ball(psi, b);
                const auto restriction = restrict_wavelet(idx, b);
                GridState expected(win);
                switch (restriction.kind) {
                    case RestrictionCase::Unchanged:
                        expected = sample_wavelet(win, idx);
                        break;
                    case RestrictionCase::ConstantOnBall:
                        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
                            if (b.contains(win.representative(n)))
                                expected.set_value(n, restriction.constant_value);
                        }
                        break;
                    case RestrictionCase::Zero:
                        break;
                }
                CHECK(max_grid_diff(spectral_to_grid(projection.inside), expected) < 1e-12);
            }
        }
    }
    SUBCASE("balls outside the domain are rejected") {
        const SpectralState psi = rng.spectral_state(win);
        CHECK_THROWS_AS(project_ball(psi, Ball(3, -2, PAdicApprox(3))), std::invalid_argument);
        CHECK_THROWS_AS(project_ball(psi, Ball(3, 1, from_q(3, 1, 9))), std::invalid_argument);
    }
}

TEST_CASE("Monna pullback") {
    const Window win(2, 1, 2);
    testing::Rng rng(911);
    SUBCASE("psi_inf = 1 leaves the state unchanged") {
        const GridState psi = rng.grid_state(win);
        const auto pullback = pullback_real([](double) { return Complex(1.0); }, psi, 4);
        CHECK(max_grid_diff(pullback.state, psi.refined(4)) < 1e-15);
        CHECK(pullback.quadrature_error_bound == 0.0);
    }
    SUBCASE("an indicator of M(B) pulls back to 1_B") {
        const Ball b(2, 1, from_q(2, 1));
        const auto iv = monna_image_of_ball(b);
        const double lo = to_double(iv.lo), hi = to_double(iv.hi);
        const GridState psi = rng.grid_state(win);
        const auto pullback = pullback_real(
            [&](double x) { return x >= lo && x <= hi ? Complex(1.0) : Complex(0.0); }, psi, 4);
        GridState expected = psi.refined(4);
        for (std::int64_t n = 0; n < expected.window().coset_count(); ++n) {
            if (!b.contains(expected.window().representative(n)))
                expected.set_value(n, Complex(0.0));
        }
        CHECK(max_grid_diff(pullback.state, expected) < 1e-15);
    }
    SUBCASE("change of variables against real-line quadrature (Gaussian)") {
        // integral over [0,1] = M(Z_p) of F equals the Z_p integral of F(M(x)).
        const Window zp_win(2, 0, 4);
        const int refinement = zp_win.resolution() + 4;
        GridState ones(zp_win);
        for (std::int64_t n = 0; n < zp_win.coset_count(); ++n) ones.set_value(n, Complex(1.0));
        const RealPacketState gauss = RealPacketState::gaussian(0.7, 0.6).normalized();
        const auto pullback = pullback_real([&](double x) { return gauss.value(x); },
                                            ones, refinement);
        double padic_side = 0.0;
        const double cell = to_double(pullback.state.window().cell_measure());
        for (const auto& v : pullback.state.values()) padic_side += std::norm(v) * cell;
        double real_side = 0.0;
        const double h = 1e-5;
        for (double x = 0.0; x < 1.0; x += h) real_side += gauss.density(x + 0.5 * h) * h;
        CHECK(padic_side == doctest::Approx(real_side).epsilon(1e-6));
    }
    SUBCASE("refinement below the state resolution is rejected") {
        const GridState psi = rng.grid_state(win);
        CHECK_THROWS_AS(pullback_real([](double) { return Complex(1.0); }, psi, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("interaction probability") {
    const Window win(3, 1, 2);
    testing::Rng rng(17);
    const int refinement = win.resolution() + 4;
    SUBCASE("constant psi_inf reduces to the Type 2 Born probability") {
        const SpectralState psi = rng.spectral_state(win);
        const Ball b(3, 1, from_q(3, 1));
        const double p_int = interaction_probability(
            psi, [](double) { return Complex(0.7); }, b, refinement);
        const GridState g = spectral_to_grid(psi);
        double inside = 0.0;
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (b.contains(win.representative(n)))
                inside += std::norm(g.value(n)) * to_double(win.cell_measure());
        }
        CHECK(p_int == doctest::Approx(inside / g.norm_squared()).epsilon(1e-12));
    }
    SUBCASE("a partition into p^2 balls has probabilities summing to 1") {
        const SpectralState psi = rng.spectral_state(win);
        const RealFunction gauss = [](double x) { return std::exp(-0.5 * x * x); };
        double total = 0.0;
        // All scale-1 balls partition the domain (p^{R+1} = 9 at p=3, R=1).
        for (const auto& b : window_balls(win)) {
            if (b.scale() != 1) continue;
            total += interaction_probability(psi, gauss, b, refinement);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("a state supported away from B scores zero") {
        const Ball b(3, 1, from_q(3, 1));
        GridState g(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (!b.contains(win.representative(n))) g.set_value(n, rng.complex_unit_box());
        }
        // Exact zero on the grid path; representation roundoff only on the
        // spectral one.
        CHECK(interaction_probability(g, [](double) { return Complex(1.0); }, b, refinement) ==
              0.0);
        CHECK(interaction_probability(grid_to_spectral(g),
                                      [](double) { return Complex(1.0); }, b,
                                      refinement) < 1e-20);
    }
    SUBCASE("zero joint weight throws") {
        const Ball b(3, 1, from_q(3, 1));
        CHECK_THROWS_AS(interaction_probability(GridState(win),
                                                [](double) { return Complex(1.0); }, b,
                                                refinement),
                        std::domain_error);
    }
}

TEST_CASE("joint collapse") {
    const Window win(3, 1, 2);
    const int refinement = win.resolution() + 4;
    testing::Rng rng(23);
    const RealFunction gauss = [](double x) { return std::exp(-0.25 * (x - 1.0) * (x - 1.0)); };
    SUBCASE("a single-ball state inside B localizes to the pullback of the full state") {
        const Ball support(3, 2, from_q(3, 4));
        const Ball b(3, 1, from_q(3, 1));  // support inside b
        GridState g(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (support.contains(win.representative(n))) g.set_value(n, Complex(0.8, -0.2));
        }
        const SpectralState psi = grid_to_spectral(g);
        const auto outcome = collapse_joint(psi, gauss, b, refinement);
        CHECK_FALSE(outcome.zero_weight);
        CHECK(outcome.interaction_probability == doctest::Approx(1.0).epsilon(1e-12));
        const auto full = pullback_real(gauss, g, refinement);
        CHECK(max_grid_diff(outcome.localized, full.state) < 1e-13);
        CHECK(outcome.weight == doctest::Approx(full.state.norm_squared()).epsilon(1e-12));
        // The post-measurement p-adic state is psi^(B)/||psi^(B)|| = psi/||psi||.
        SpectralState expected = psi;
        expected *= Complex(1.0 / psi.norm());
        CHECK((*outcome.post_padic - expected).norm() < 1e-12);
    }
    SUBCASE("a scan disjoint from the support reports the zero-weight outcome") {
        const Ball b(3, 1, from_q(3, 1));
        GridState g(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (!b.contains(win.representative(n))) g.set_value(n, rng.complex_unit_box());
        }
        const auto outcome = collapse_joint(grid_to_spectral(g), gauss, b, refinement);
        CHECK(outcome.zero_weight);
        CHECK(outcome.weight == 0.0);
        CHECK_FALSE(outcome.post_padic.has_value());
    }
    SUBCASE("re-collapse on the same ball is idempotent on the p-adic factor") {
        const SpectralState psi = rng.spectral_state(win);
        const Ball b(3, 1, from_q(3, 2));
        const auto first = collapse_joint(psi, gauss, b, refinement);
        REQUIRE(first.post_padic.has_value());
        const auto second = collapse_joint(*first.post_padic, gauss, b, refinement);
        REQUIRE(second.post_padic.has_value());
        CHECK((*second.post_padic - *first.post_padic).norm() < 1e-12);
        CHECK(second.interaction_probability == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("product-state front end matches the spectral call") {
        const SpectralState psi = rng.spectral_state(win);
        const RealPacketState packet = RealPacketState::gaussian(1.0, 1.0);
        const ProductState product{packet, psi, std::nullopt};
        const Ball b(3, 1, from_q(3, 1));
        const auto via_product = collapse_joint(product, b, refinement);
        const auto direct = collapse_joint(
            psi, [&](double x) { return packet.value(x); }, b, refinement);
        CHECK(via_product.weight == doctest::Approx(direct.weight).epsilon(1e-14));
    }
}

TEST_CASE("projected-norm continuity along the evolution") {
    // ||psi^(B)(t)|| moves continuously: each step of size dt changes it by
    // at most C dt with C = E_max ||psi||.
    const Window win(3, 1, 2);
    const VladimirovOperator op(win, 1.0, 0.5);
    testing::Rng rng(88);
    SpectralState psi = rng.spectral_state(win);
    psi *= Complex(1.0 / psi.norm());
    const Ball b(3, 1, from_q(3, 1));
    const double e_max =
        std::max(op.energy(1 - win.resolution()), op.constant_mode_energy());
    const double dt = 1e-3;
    double previous = project_ball(psi, b).inside.norm();
    double max_step = 0.0;
    for (int i = 1; i <= 400; ++i) {
        const SpectralState evolved = evolve_padic(psi, op, i * dt);
        const double current = project_ball(evolved, b).inside.norm();
        max_step = std::max(max_step, std::abs(current - previous));
        previous = current;
    }
    CHECK(max_step <= e_max * dt);
}

TEST_CASE("GRW localization") {
    SUBCASE("localizing g_r itself returns g_r^2 renormalized") {
        const double sigma = 0.6, r = 0.8;
        // g_r as a packet term: amplitude (2 pi s^2)^{-1/4}, width_sq = 2 s^2.
        const RealPacketState g({GaussianTerm{
            Complex(std::pow(2.0 * M_PI * sigma * sigma, -0.25)), Complex(r),
            Complex(2.0 * sigma * sigma)}});
        CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-13));
        const RealPacketState localized = grw_localize(g, r, sigma);
        CHECK(localized.norm() == doctest::Approx(1.0).epsilon(1e-12));
        // g_r^2 renormalized is a Gaussian of width_sq = sigma^2 around r.
        const RealPacketState expected({GaussianTerm{
            Complex(std::pow(M_PI * sigma * sigma, -0.25)), Complex(r),
            Complex(sigma * sigma)}});
        for (double x : {r - 1.0, r - 0.2, r, r + 0.4, r + 1.5}) {
            CHECK(localized.density(x) == doctest::Approx(expected.density(x)).epsilon(1e-10));
        }
    }
    SUBCASE("P(r)^2 integrates to 1 over r for a normalized state") {
        const RealPacketState psi = RealPacketState::two_gaussian_superposition(1.0, 0.5);
        const double sigma = 0.4;
        double total = 0.0;
        const double h = 5e-3;
        for (double r = -25.0; r <= 25.0; r += h) total += grw_density(psi, r, sigma) * h;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("localization concentrates a broad state") {
        const RealPacketState broad = RealPacketState::gaussian(0.0, 3.0).normalized();
        const RealPacketState after = grw_localize(broad, 1.0, 0.3);
        CHECK(after.density_variance() < broad.density_variance());
        CHECK(after.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("P(r) = 0 throws") {
        const RealPacketState psi;
        CHECK_THROWS_AS(grw_localize(psi, 0.0, 0.5), std::domain_error);
    }
}

TEST_CASE("GRW trajectories") {
    const double mass = 0.5;
    SUBCASE("a vanishing rate gives pure Schrodinger evolution") {
        const RealPacketState psi0 = RealPacketState::two_gaussian_superposition(1.0, 0.5);
        const auto trajectory = grw_trajectory(psi0, {0.5, 1e-9}, 2.0, mass, 7);
        CHECK(trajectory.events.empty());
        const RealPacketState expected = evolve_real_free(psi0, mass, 2.0);
        for (double x : {-1.0, 0.0, 1.3}) {
            CHECK(std::abs(trajectory.final_state.value(x) - expected.value(x)) < 1e-12);
        }
    }
    SUBCASE("every post-event state has unit norm") {
        const RealPacketState psi0 = RealPacketState::two_gaussian_superposition(1.0, 0.5);
        const auto trajectory = grw_trajectory(psi0, {0.4, 3.0}, 3.0, mass, 99);
        CHECK(!trajectory.events.empty());
        for (const auto& event : trajectory.events) {
            CHECK(std::abs(event.post_norm - 1.0) < 1e-12);
            CHECK(std::abs(event.pre_norm - 1.0) < 1e-12);
            CHECK(event.time >= 0.0);
            CHECK(event.time <= 3.0);
        }
        CHECK(std::abs(trajectory.final_state.norm() - 1.0) < 1e-12);
    }
    SUBCASE("event counts follow the Poisson mean") {
        const RealPacketState psi0 = RealPacketState::gaussian(0.0, 0.7).normalized();
        const double lambda = 3.0, horizon = 2.0;
        const int trials = 300;
        double total = 0.0;
        for (int seed = 0; seed < trials; ++seed) {
            total += static_cast<double>(
                grw_trajectory(psi0, {0.5, lambda}, horizon, mass, 1000 + seed).events.size());
        }
        const double mean = total / trials;
        const double standard_error = std::sqrt(lambda * horizon / trials);
        CHECK(std::abs(mean - lambda * horizon) <= 3.0 * standard_error);
    }
    SUBCASE("trajectories are reproducible and the event log round-trips") {
        namespace fs = std::filesystem;
        const RealPacketState psi0 = RealPacketState::two_gaussian_superposition(1.0, 0.5);
        const auto a = grw_trajectory(psi0, {0.5, 2.0}, 2.0, mass, 1234);
        const auto b = grw_trajectory(psi0, {0.5, 2.0}, 2.0, mass, 1234);
        REQUIRE(a.events.size() == b.events.size());
        for (size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].r == b.events[i].r);
        }
        const fs::path dir = fs::temp_directory_path() / "padicqm_measurement_test";
        fs::create_directories(dir);
        const std::string path = (dir / "events.csv").string();
        write_grw_event_log(path, a.events);
        std::ifstream is(path);
        std::string line;
        std::getline(is, line);
        CHECK(line == "t_event,r,pre_norm,post_norm");
        size_t rows = 0;
        while (std::getline(is, line)) ++rows;
        CHECK(rows == a.events.size());
    }
}

TEST_CASE("collapse report rendering") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "padicqm_measurement_test";
    fs::create_directories(dir);
    const std::string path = (dir / "report.txt").string();
    const Ball b(3, 2, from_q(3, 4));
    write_collapse_report(path, {{0.5, b, 0.25, 0.1, 1.0, false},
                                 {1.0, b, 0.0, 0.0, 0.0, true}});
    std::ifstream is(path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.find("scan 0") != std::string::npos);
    CHECK(text.find("P_int     = 0.25") != std::string::npos);
    CHECK(text.find("outcome   = zero-weight") != std::string::npos);
    CHECK(text.find("p^2*Zp") != std::string::npos);
}
