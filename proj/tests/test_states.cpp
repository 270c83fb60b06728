#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "padicqm/states.hpp"
#include "test_rng.hpp"

using namespace padicqm;

namespace {

PAdicApprox from_q(int p, long long num, long long den = 1) {
    return PAdicApprox::from_rational(p, Rational(num, den));
}

// Quadrature-oracle Gram matrix of the full window basis (wavelets sampled
// pointwise plus the constant mode) against the identity.
double gram_max_deviation(const Window& win) {
    std::vector<GridState> basis;
    for (const auto& idx : win.wavelet_indices()) basis.push_back(sample_wavelet(win, idx));
    basis.push_back(constant_mode_state(win));
    double max_dev = 0.0;
    for (size_t i = 0; i < basis.size(); ++i) {
        for (size_t j = 0; j < basis.size(); ++j) {
            const Complex g = inner_product(basis[i], basis[j]);
            const Complex expected = i == j ? Complex(1.0) : Complex(0.0);
            max_dev = std::max(max_dev, std::abs(g - expected));
        }
    }
    return max_dev;
}

}  // namespace

TEST_CASE("wavelet evaluation") {
    SUBCASE("psi_{0,0,1}(0) = 1") {
        const WaveletIndex idx{0, FractionIndex(2), 1};
        CHECK(std::abs(eval_wavelet(idx, PAdicApprox(2)) - Complex(1.0)) < 1e-15);
    }
    SUBCASE("outside the support the wavelet vanishes") {
        const WaveletIndex idx{0, FractionIndex(3), 1};
        CHECK(eval_wavelet(idx, from_q(3, 1, 3)) == Complex(0.0));   // |x|_3 = 3
        CHECK(eval_wavelet(idx, from_q(3, 2, 9)) == Complex(0.0));   // |x|_3 = 9
    }
    SUBCASE("p=2: psi_{0,0,1}(1) = chi_2(1/2) = -1") {
        const WaveletIndex idx{0, FractionIndex(2), 1};
        const Complex v = eval_wavelet(idx, from_q(2, 1));
        CHECK(std::abs(v - Complex(-1.0)) < 1e-14);
    }
    SUBCASE("support law: zero exactly on cosets disjoint from the support") {
        const Window win(2, 2, 3);
        for (const auto& idx : win.wavelet_indices()) {
            const Ball supp = win.support_ball(idx);
            for (std::int64_t n = 0; n < win.coset_count(); ++n) {
                const Ball point_ball = win.coset_ball(n);
                const bool zero = eval_wavelet(idx, win.representative(n)) == Complex(0.0);
                const bool disjoint =
                    ball_relation(point_ball, supp) == BallRelation::Disjoint;
                CHECK(zero == disjoint);
            }
        }
    }
}

TEST_CASE("grid inner product") {
    SUBCASE("scaled indicators are orthonormal") {
        const Window win(3, 0, 2);
        const double scale = std::pow(3.0, 0.5 * 2);
        std::vector<GridState> indicators;
        for (std::int64_t i = 0; i < win.coset_count(); ++i) {
            GridState g(win);
            g.set_value(i, Complex(scale));
            indicators.push_back(g);
        }
        for (size_t i = 0; i < indicators.size(); ++i) {
            for (size_t j = 0; j < indicators.size(); ++j) {
                const Complex v = inner_product(indicators[i], indicators[j]);
                CHECK(std::abs(v - (i == j ? Complex(1.0) : Complex(0.0))) < 1e-14);
            }
        }
    }
    SUBCASE("<f,f> = ||f||^2 >= 0") {
        testing::Rng rng(11);
        const Window win(2, 1, 2);
        const GridState f = rng.grid_state(win);
        const Complex self = inner_product(f, f);
        CHECK(self.imag() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(self.real() == doctest::Approx(f.norm_squared()).epsilon(1e-13));
        CHECK(self.real() >= 0.0);
    }
    SUBCASE("refinement: coarser states are refined first") {
        const Window coarse(2, 0, 1);
        const Window fine(2, 0, 3);
        GridState f(coarse);
        f.set_value(0, Complex(1.0));
        f.set_value(1, Complex(2.0));
        GridState g(fine);
        for (std::int64_t n = 0; n < fine.coset_count(); ++n) g.set_value(n, Complex(1.0));
        // <f, 1> = integral of f = (1 + 2)/2.
        CHECK(std::abs(inner_product(f, g) - Complex(1.5)) < 1e-14);
        const Window other(3, 0, 1);
        CHECK_THROWS_AS(inner_product(f, GridState(other)), std::invalid_argument);
    }
    SUBCASE("window wavelet Gram matrix is the identity") {
        CHECK(gram_max_deviation(Window(2, 2, 3)) < 1e-12);
        CHECK(gram_max_deviation(Window(3, 1, 2)) < 1e-12);
        CHECK(gram_max_deviation(Window(5, 1, 1)) < 1e-12);
    }
}

TEST_CASE("window dimension counting") {
    for (const auto& [p, r, k] : {std::tuple{2, 2, 3}, {3, 1, 2}, {5, 1, 1}}) {
        const Window win(p, r, k);
        CHECK(win.wavelet_count() + 1 == win.coset_count());
        CHECK(static_cast<std::int64_t>(win.wavelet_indices().size()) == win.wavelet_count());
        // Scale multiplicities (p-1) p^{R-r}.
        for (int scale = r; scale >= 1 - k; --scale) {
            std::int64_t count = 0;
            for (const auto& idx : win.wavelet_indices()) {
                if (idx.r == scale) ++count;
            }
            CHECK(count == (p - 1) * ipow(p, r - scale));
        }
    }
}

TEST_CASE("grid/spectral transforms") {
    SUBCASE("normalized domain indicator is pure constant mode") {
        const Window win(3, 1, 2);
        const SpectralState s = grid_to_spectral(constant_mode_state(win));
        CHECK(std::abs(s.constant_mode() - Complex(1.0)) < 1e-14);
        for (const auto& [idx, c] : s.coefficients()) CHECK(std::abs(c) < 1e-14);
    }
    SUBCASE("a sampled window wavelet transforms to a unit coefficient") {
        const Window win(2, 2, 3);
        for (const auto& idx : win.wavelet_indices()) {
            const SpectralState s = grid_to_spectral(sample_wavelet(win, idx));
            CHECK(std::abs(s.coefficient(idx) - Complex(1.0)) < 1e-12);
            CHECK(std::abs(s.constant_mode()) < 1e-13);
            double off = 0.0;
            for (const auto& [other, c] : s.coefficients()) {
                if (!(other == idx)) off = std::max(off, std::abs(c));
            }
            CHECK(off < 1e-13);
        }
    }
    SUBCASE("round trip is the identity and Parseval holds") {
        testing::Rng rng(42);
        for (const auto& [p, r, k] : {std::tuple{2, 2, 3}, {3, 1, 2}, {5, 1, 1}}) {
            const Window win(p, r, k);
            const GridState f = rng.grid_state(win);
            const SpectralState s = grid_to_spectral(f);
            CHECK(std::abs(s.norm_squared() - f.norm_squared()) < 1e-12);
            const GridState back = spectral_to_grid(s);
            double max_err = 0.0;
            for (std::int64_t n = 0; n < win.coset_count(); ++n) {
                max_err = std::max(max_err, std::abs(back.value(n) - f.value(n)));
            }
            CHECK(max_err < 1e-12);
        }
    }
    SUBCASE("spectral inner product agrees with the grid one") {
        testing::Rng rng(43);
        const Window win(3, 1, 2);
        const GridState f = rng.grid_state(win);
        const GridState g = rng.grid_state(win);
        const Complex lhs = inner_product(grid_to_spectral(f), grid_to_spectral(g));
        const Complex rhs = inner_product(f, g);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("indicator expansion") {
    SUBCASE("Omega_{Z_p} against psi_{r,0,k}: coefficients p^{-r/2}") {
        for (int p : {2, 3}) {
            const int R = 3, K = 2;
            const Window win(p, R, K);
            const auto expansion = expand_indicator(Ball::unit_ball(p), win);
            for (const auto& idx : win.wavelet_indices()) {
                const Complex c = expansion.state.coefficient(idx);
                if (idx.r >= 1 && idx.b.is_zero()) {
                    CHECK(std::abs(c - Complex(std::pow(p, -0.5 * idx.r))) < 1e-12);
                } else {
                    CHECK(std::abs(c) < 1e-13);
                }
            }
            // Geometric-series oracle: sum_{r=1}^{R} (p-1) p^{-r} = 1 - p^{-R}.
            double oracle = 0.0;
            for (int r = 1; r <= R; ++r) oracle += (p - 1) * std::pow(p, -r);
            CHECK(expansion.wavelet_mass == doctest::Approx(oracle).epsilon(1e-12));
            CHECK(expansion.wavelet_mass ==
                  doctest::Approx(1.0 - std::pow(p, -R)).epsilon(1e-12));
            CHECK(expansion.tail_mass == doctest::Approx(std::pow(p, -R)).epsilon(1e-12));
        }
    }
    SUBCASE("brute-force inner product oracle agrees coefficient by coefficient") {
        const Window win(3, 2, 1);
        const Ball b(3, 1, from_q(3, 2));
        const auto expansion = expand_indicator(b, win);
        GridState indicator(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (b.contains(win.representative(n))) indicator.set_value(n, Complex(1.0));
        }
        for (const auto& idx : win.wavelet_indices()) {
            const Complex oracle = inner_product(indicator, sample_wavelet(win, idx));
            CHECK(std::abs(expansion.state.coefficient(idx) - oracle) < 1e-12);
        }
    }
    SUBCASE("the domain itself is pure constant mode") {
        const Window win(2, 1, 2);
        const auto expansion = expand_indicator(win.domain(), win);
        CHECK(expansion.wavelet_mass < 1e-14);
        for (const auto& [idx, c] : expansion.state.coefficients()) CHECK(std::abs(c) < 1e-14);
        CHECK(std::abs(expansion.state.constant_mode() -
                       Complex(std::pow(2.0, 0.5 * 1))) < 1e-14);
        CHECK(expansion.tail_mass == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("balls outside the domain are rejected") {
        const Window win(2, 0, 2);
        CHECK_THROWS_AS(expand_indicator(Ball(2, -1, PAdicApprox(2)), win),
                        std::invalid_argument);
        CHECK_THROWS_AS(expand_indicator(Ball(2, 0, from_q(2, 1, 2)), win),
                        std::invalid_argument);
    }
}

TEST_CASE("p-adic Born density") {
    SUBCASE("normalized ball state has constant density p^l on the ball") {
        const Window win(3, 1, 2);
        const Ball b(3, 1, from_q(3, 1));
        GridState psi(win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            if (b.contains(win.representative(n))) psi.set_value(n, Complex(1.0));
        }
        psi *= Complex(1.0 / psi.norm());
        const GridState density = density_padic(psi, true);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            const double expected = b.contains(win.representative(n)) ? 3.0 : 0.0;
            CHECK(density.value(n).real() == doctest::Approx(expected).epsilon(1e-12));
        }
        CHECK(integrate_grid(density) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero-norm state with normalize set throws") {
        const Window win(2, 0, 1);
        CHECK_THROWS_AS(density_padic(GridState(win), true), std::domain_error);
    }
}

TEST_CASE("real packet states") {
    SUBCASE("closed-form norm vs quadrature") {
        const RealPacketState psi = RealPacketState::two_gaussian_superposition(1.0, 0.5);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
        double quad = 0.0;
        const double h = 1e-3;
        for (double x = -12.0; x <= 12.0; x += h) quad += psi.density(x) * h;
        CHECK(quad == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("inner product conjugate symmetry") {
        const RealPacketState f = RealPacketState::gaussian(0.3, 0.7);
        const RealPacketState g = RealPacketState::two_gaussian_superposition(1.0, 0.4);
        const Complex a = inner_product(f, g);
        const Complex b = inner_product(g, f);
        CHECK(std::abs(a - std::conj(b)) < 1e-13);
    }
    SUBCASE("density moments") {
        const RealPacketState psi = RealPacketState::gaussian(2.0, 0.5).normalized();
        CHECK(psi.density_mean() == doctest::Approx(2.0).epsilon(1e-12));
        // |psi|^2 has variance sigma^2/2 in this parametrization.
        CHECK(psi.density_variance() == doctest::Approx(0.125).epsilon(1e-10));
    }
}

TEST_CASE("type 3 density factorizes for product states") {
    testing::Rng rng(77);
    const Window win(2, 1, 2);
    SpectralState padic = rng.spectral_state(win);
    const RealPacketState real = RealPacketState::two_gaussian_superposition(1.0, 0.5);
    const ProductState psi{real, padic, std::nullopt};
    const std::vector<double> grid{-1.5, -0.5, 0.0, 0.7, 1.9};
    const auto table = density_joint(psi, grid);
    const auto type1 = density_real(real, grid, true);
    const GridState type2 = density_padic(padic, true);
    for (size_t i = 0; i < grid.size(); ++i) {
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            CHECK(table.values(static_cast<Eigen::Index>(i), n) ==
                  doctest::Approx(type1[i] * type2.value(n).real()).epsilon(1e-10));
        }
    }
}

TEST_CASE("discretization") {
    SUBCASE("a constant discretizes exactly") {
        const auto f = [](const PAdicApprox&) { return Complex(2.5, -1.0); };
        const GridState g = discretize(f, 3, 2);
        for (const auto& v : g.values()) CHECK(std::abs(v - Complex(2.5, -1.0)) < 1e-15);
    }
    SUBCASE("a function already locally constant at scale l is reproduced") {
        const auto f = [](const PAdicApprox& x) {
            return Complex(static_cast<double>(x.digit_at(0)));
        };
        const GridState g1 = discretize(f, 2, 1);
        const GridState g3 = discretize(f, 2, 3);
        const GridState refined = g1.refined(3);
        for (std::int64_t n = 0; n < g3.window().coset_count(); ++n) {
            CHECK(std::abs(refined.value(n) - g3.value(n)) < 1e-15);
        }
    }
    SUBCASE("L2 discretization error decreases monotonically") {
        // Continuous but not locally constant at the tested scales.
        const auto f = [](const PAdicApprox& x) {
            return Complex(std::exp(-to_double(monna_map(x))));
        };
        const int fine = 7;
        const GridState reference = discretize(f, 2, fine);
        double previous = -1.0;
        for (int l = 0; l <= 4; ++l) {
            const GridState approx = discretize(f, 2, l).refined(fine);
            const GridState diff = approx - reference;
            const double err = diff.norm();
            if (previous >= 0.0) CHECK(err < previous);
            previous = err;
        }
    }
}

TEST_CASE("state serialization round trips") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "padicqm_states_test";
    fs::create_directories(dir);
    testing::Rng rng(8);
    const Window win(3, 1, 2);
    SUBCASE("grid") {
        const GridState f = rng.grid_state(win);
        const std::string path = (dir / "grid.csv").string();
        save_csv(f, path);
        const GridState back = load_grid_csv(path);
        CHECK(back.window() == win);
        for (std::int64_t n = 0; n < win.coset_count(); ++n) {
            CHECK(back.value(n) == f.value(n));  // %.17g round trips doubles
        }
    }
    SUBCASE("spectral") {
        const SpectralState s = rng.spectral_state(win);
        const std::string path = (dir / "spectral.csv").string();
        save_csv(s, path);
        const SpectralState back = load_spectral_csv(path);
        CHECK(back.constant_mode() == s.constant_mode());
        for (const auto& idx : win.wavelet_indices()) {
            CHECK(back.coefficient(idx) == s.coefficient(idx));
        }
    }
}
