#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "padicqm/padic.hpp"

namespace padicqm {

/// Index (r, b, k) of a basis wavelet. The indexed wavelet is supported on
/// the ball p^{-r} b + p^{-r} Z_p (radius p^r) and k runs over 1..p-1.
struct WaveletIndex {
    int r;
    FractionIndex b;
    int k;

    friend bool operator==(const WaveletIndex& a, const WaveletIndex& b) = default;
};

/// Canonical order: descending r, then lexicographic b digits, then
/// ascending k. Used for serialization, spectra and map storage.
struct WaveletIndexLess {
    bool operator()(const WaveletIndex& a, const WaveletIndex& b) const {
        if (a.r != b.r) return a.r > b.r;
        if (auto c = a.b <=> b.b; c != 0) return c < 0;
        return a.k < b.k;
    }
};

/// Truncation window over the domain ball p^{-R} Z_p at resolution K:
/// grid functions live on the p^{R+K} cosets of p^K Z_p, and the spectral
/// side holds the wavelets with 1-K <= r <= R whose support fits in the
/// domain, plus the normalized domain indicator as a separate constant mode.
class Window {
public:
    Window(int prime, int domain_exponent, int resolution);

    int prime() const { return p_; }
    int domain_exponent() const { return R_; }
    int resolution() const { return K_; }
    Ball domain() const { return Ball::domain_ball(p_, R_); }

    /// p^{R+K}.
    std::int64_t coset_count() const { return coset_count_; }
    /// p^{R+K} - 1 admissible wavelet indices.
    std::int64_t wavelet_count() const { return coset_count_ - 1; }

    friend bool operator==(const Window& a, const Window& b) = default;

    /// Canonical coset index of the coset containing x: the integer p^R * c
    /// where c is the canonical representative (digits at positions -R..K-1).
    std::int64_t coset_index_of(const PAdicApprox& x) const;
    /// Canonical representative of coset #n (exact, digits -R..K-1).
    PAdicApprox representative(std::int64_t n) const;
    /// The coset #n as a ball c + p^K Z_p.
    Ball coset_ball(std::int64_t n) const;
    /// Monna image of the representative (left endpoint of the coset's
    /// Monna interval, an interval of length p^{-K}).
    Rational coset_monna(std::int64_t n) const;

    /// All admissible wavelet indices in canonical order.
    const std::vector<WaveletIndex>& wavelet_indices() const { return indices_; }
    /// Ordinal of an index in the canonical order; throws if not admissible.
    std::int64_t ordinal_of(const WaveletIndex& idx) const;
    bool admissible(const WaveletIndex& idx) const;

    /// Support ball p^{-r} b + p^{-r} Z_p.
    Ball support_ball(const WaveletIndex& idx) const;

    /// haar measure of one finest coset, p^{-K}.
    Rational cell_measure() const { return rational_pow(p_, -K_); }

private:
    int p_;
    int R_;
    int K_;
    std::int64_t coset_count_;
    std::vector<WaveletIndex> indices_;
    std::map<WaveletIndex, std::int64_t, WaveletIndexLess> ordinals_;
};

/// Integer power p^e for e >= 0.
std::int64_t ipow(int p, int e);

}  // namespace padicqm
