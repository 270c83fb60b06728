#pragma once

#include <complex>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "padicqm/rational.hpp"

namespace padicqm {

/// A p-adic number held exactly on a finite digit window.
///
/// The value is sum_i d_i p^(v+i) with digits d_i in [0,p). Digits at
/// positions >= resolution_cap are unknown and treated as zero; every
/// operation states whether its result is exact or window-truncated.
/// Values are immutable after construction.
class PAdicApprox {
public:
    static constexpr int kDefaultCap = 32;

    /// Canonical zero.
    explicit PAdicApprox(int prime, int resolution_cap = kDefaultCap);

    /// From digits: digits[i] sits at position valuation+i. Normalizes
    /// (strips leading/trailing zeros, drops digits at positions >= cap).
    static PAdicApprox from_digits(int prime, int valuation, std::vector<int> digits,
                                   int resolution_cap = kDefaultCap);

    /// Exact expansion of an integer (truncated at the cap).
    static PAdicApprox from_integer(int prime, long long n, int resolution_cap = kDefaultCap);

    /// Exact expansion of a rational (truncated at the cap; the expansion of
    /// a rational is eventually periodic, so truncation may apply).
    static PAdicApprox from_rational(int prime, const Rational& q,
                                     int resolution_cap = kDefaultCap);

    int prime() const { return prime_; }
    int resolution_cap() const { return cap_; }
    bool is_zero() const { return digits_.empty(); }

    /// Valuation (position of the lowest nonzero digit); nullopt for zero,
    /// matching ord(0) = infinity.
    std::optional<int> valuation() const;

    /// Digit at an absolute position (0 outside the stored window).
    int digit_at(int position) const;

    /// Lowest stored position (valuation) — only valid when nonzero.
    int lowest_position() const { return valuation_; }
    /// One past the highest stored position.
    int end_position() const { return valuation_ + static_cast<int>(digits_.size()); }

    const std::vector<int>& digits() const { return digits_; }

    /// Value equality on the digit expansion (caps are metadata and do not
    /// participate).
    friend bool operator==(const PAdicApprox& a, const PAdicApprox& b);

private:
    int prime_;
    int valuation_;  // position of digits_[0]; 0 for the canonical zero
    int cap_;
    std::vector<int> digits_;

    void normalize();
};

/// (ord(x), |x|_p); zero reports (nullopt, 0).
std::pair<std::optional<int>, Rational> valuation_and_norm(const PAdicApprox& x);
Rational padic_norm(const PAdicApprox& x);

/// Field operations. add/sub/mul are exact on the overlapping digit window;
/// negate is window-truncated (the complement expansion does not terminate).
PAdicApprox add(const PAdicApprox& x, const PAdicApprox& y);
PAdicApprox negate(const PAdicApprox& x);
PAdicApprox sub(const PAdicApprox& x, const PAdicApprox& y);
PAdicApprox mul(const PAdicApprox& x, const PAdicApprox& y);
/// Multiply by p^e (exact; shifts the window).
PAdicApprox shift(const PAdicApprox& x, int e);
/// Multiply by a small integer (exact on the window).
PAdicApprox mul_integer(const PAdicApprox& x, long long n);

/// {x}_p: 0 if x = 0 or ord(x) >= 0, else the exact rational
/// p^ord(x) * sum_{j<-ord(x)} x_j p^j in [0,1).
Rational fractional_part(const PAdicApprox& x);

/// chi_p(y) = exp(2 pi i {y}_p), the additive character.
std::complex<double> additive_character(const PAdicApprox& y);

/// Monna map: sum y_j p^j -> sum y_j p^{-j-1}. Exact for expansions that
/// terminate inside the window.
Rational monna_map(const PAdicApprox& x);

/// Canonical log rendering: "p=3: ...d2 d1 d0 . d-1 d-2".
std::string render(const PAdicApprox& x);

/// A ball c + p^l Z_p. Two balls are equal iff their scales and reduced
/// center digits agree; the Haar measure is exactly p^{-l}.
class Ball {
public:
    /// Reduces the center modulo p^scale.
    Ball(int prime, int scale, const PAdicApprox& center);

    /// Z_p.
    static Ball unit_ball(int prime) { return Ball(prime, 0, PAdicApprox(prime)); }
    /// p^{-R} Z_p.
    static Ball domain_ball(int prime, int radius_exponent) {
        return Ball(prime, -radius_exponent, PAdicApprox(prime));
    }

    int prime() const { return prime_; }
    int scale() const { return scale_; }
    /// Reduced center (digits at positions < scale only); exact.
    const PAdicApprox& center() const { return center_; }

    Rational haar_measure() const { return rational_pow(prime_, -scale_); }

    bool contains(const PAdicApprox& x) const;

    friend bool operator==(const Ball& a, const Ball& b);

private:
    int prime_;
    int scale_;
    PAdicApprox center_;
};

enum class BallRelation { Disjoint, Equal, FirstInsideSecond, SecondInsideFirst };

/// Trichotomy of p-adic balls: disjoint, equal, or nested.
BallRelation ball_relation(const Ball& b1, const Ball& b2);

struct RationalInterval {
    Rational lo;
    Rational hi;
    Rational length() const { return hi - lo; }
};

/// M(B) = M(center) + [0, p^{-l}]; its Lebesgue length equals haar_measure(B)
/// exactly.
RationalInterval monna_image_of_ball(const Ball& b);

/// An element of Q_p/Z_p: finitely many digits at positions -1, -2, ..., -m,
/// with the deepest digit nonzero unless the element is 0.
class FractionIndex {
public:
    explicit FractionIndex(int prime) : prime_(prime) {}
    /// digits[j] is the digit at position -(j+1); deep zeros are stripped.
    FractionIndex(int prime, std::vector<int> digits);
    /// Class of x in Q_p/Z_p (its fractional digits).
    static FractionIndex from_padic(const PAdicApprox& x);

    int prime() const { return prime_; }
    bool is_zero() const { return digits_.empty(); }
    /// Depth m: deepest occupied position is -m.
    int depth() const { return static_cast<int>(digits_.size()); }
    /// Digit at position -(j+1) (0 beyond the stored depth).
    int digit(int j) const {
        return j >= 0 && j < depth() ? digits_[static_cast<size_t>(j)] : 0;
    }

    /// As an exact rational in [0,1).
    Rational value() const;
    PAdicApprox to_padic(int resolution_cap = PAdicApprox::kDefaultCap) const;

    friend bool operator==(const FractionIndex& a, const FractionIndex& b) = default;
    /// Lexicographic on the digit sequence (b_{-1}, b_{-2}, ...).
    friend std::strong_ordering operator<=>(const FractionIndex& a, const FractionIndex& b);

private:
    int prime_;
    std::vector<int> digits_;
};

}  // namespace padicqm
