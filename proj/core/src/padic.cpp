#include "padicqm/padic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace padicqm {

namespace {

void check_prime(int prime) {
    if (prime < 2) throw std::invalid_argument("prime must be >= 2");
}

void check_same_prime(const PAdicApprox& x, const PAdicApprox& y) {
    if (x.prime() != y.prime())
        throw std::invalid_argument("prime mismatch: " + std::to_string(x.prime()) + " vs " +
                                    std::to_string(y.prime()));
}

}  // namespace

PAdicApprox::PAdicApprox(int prime, int resolution_cap)
    : prime_(prime), valuation_(0), cap_(resolution_cap) {
    check_prime(prime);
}

void PAdicApprox::normalize() {
    // Drop digits at positions >= cap (unknown by convention).
    if (valuation_ + static_cast<int>(digits_.size()) > cap_) {
        digits_.resize(static_cast<size_t>(std::max(0, cap_ - valuation_)));
    }
    size_t lead = 0;
    while (lead < digits_.size() && digits_[lead] == 0) ++lead;
    if (lead > 0) {
        digits_.erase(digits_.begin(), digits_.begin() + static_cast<long>(lead));
        valuation_ += static_cast<int>(lead);
    }
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
    if (digits_.empty()) valuation_ = 0;
    if (!digits_.empty() && valuation_ > cap_)
        throw std::invalid_argument("valuation exceeds resolution cap");
}

PAdicApprox PAdicApprox::from_digits(int prime, int valuation, std::vector<int> digits,
                                     int resolution_cap) {
    check_prime(prime);
    for (int d : digits)
        if (d < 0 || d >= prime) throw std::invalid_argument("digit out of [0,p)");
    PAdicApprox x(prime, resolution_cap);
    x.valuation_ = valuation;
    x.digits_ = std::move(digits);
    x.normalize();
    return x;
}

PAdicApprox PAdicApprox::from_integer(int prime, long long n, int resolution_cap) {
    return from_rational(prime, Rational(n), resolution_cap);
}

PAdicApprox PAdicApprox::from_rational(int prime, const Rational& q, int resolution_cap) {
    check_prime(prime);
    PAdicApprox x(prime, resolution_cap);
    if (q.numerator() == 0) return x;
    long long num = q.numerator();
    long long den = q.denominator();  // boost keeps den > 0, gcd-reduced
    int v = 0;
    while (num % prime == 0) {
        num /= prime;
        ++v;
    }
    while (den % prime == 0) {
        den /= prime;
        --v;
    }
    // Digit extraction: d = num * den^{-1} mod p, then num <- (num - d*den)/p.
    long long den_mod = ((den % prime) + prime) % prime;
    long long den_inv = 1;
    for (long long e = prime - 2, b = den_mod; e > 0; e >>= 1) {  // Fermat inverse
        if (e & 1) den_inv = den_inv * b % prime;
        b = b * b % prime;
    }
    std::vector<int> digits;
    int pos = v;
    while (num != 0 && pos < resolution_cap) {
        long long num_mod = ((num % prime) + prime) % prime;
        long long d = num_mod * den_inv % prime;
        digits.push_back(static_cast<int>(d));
        num = (num - d * den) / prime;
        ++pos;
    }
    x.valuation_ = v;
    x.digits_ = std::move(digits);
    x.normalize();
    return x;
}

std::optional<int> PAdicApprox::valuation() const {
    if (is_zero()) return std::nullopt;
    return valuation_;
}

int PAdicApprox::digit_at(int position) const {
    if (is_zero() || position < valuation_ || position >= end_position()) return 0;
    return digits_[static_cast<size_t>(position - valuation_)];
}

bool operator==(const PAdicApprox& a, const PAdicApprox& b) {
    return a.prime_ == b.prime_ && a.valuation_ == b.valuation_ && a.digits_ == b.digits_;
}

std::pair<std::optional<int>, Rational> valuation_and_norm(const PAdicApprox& x) {
    auto v = x.valuation();
    if (!v) return {std::nullopt, Rational(0)};
    return {v, rational_pow(x.prime(), -*v)};
}

Rational padic_norm(const PAdicApprox& x) { return valuation_and_norm(x).second; }

PAdicApprox add(const PAdicApprox& x, const PAdicApprox& y) {
    check_same_prime(x, y);
    const int p = x.prime();
    const int cap = std::min(x.resolution_cap(), y.resolution_cap());
    if (x.is_zero()) return PAdicApprox::from_digits(p, y.lowest_position(), y.digits(), cap);
    if (y.is_zero()) return PAdicApprox::from_digits(p, x.lowest_position(), x.digits(), cap);
    const int lo = std::min(x.lowest_position(), y.lowest_position());
    std::vector<int> digits(static_cast<size_t>(std::max(0, cap - lo)), 0);
    int carry = 0;
    for (int pos = lo; auto& out : digits) {
        int s = x.digit_at(pos) + y.digit_at(pos) + carry;
        out = s % p;
        carry = s / p;
        ++pos;
    }
    return PAdicApprox::from_digits(p, lo, std::move(digits), cap);
}

PAdicApprox negate(const PAdicApprox& x) {
    if (x.is_zero()) return x;
    const int p = x.prime();
    const int lo = x.lowest_position();
    const int cap = x.resolution_cap();
    // -x has digit p - d at the valuation and p-1-d above it, continuing
    // with p-1 forever; the window truncates at the cap.
    std::vector<int> digits(static_cast<size_t>(std::max(0, cap - lo)), 0);
    for (int pos = lo; auto& out : digits) {
        out = pos == lo ? p - x.digit_at(pos) : p - 1 - x.digit_at(pos);
        ++pos;
    }
    return PAdicApprox::from_digits(p, lo, std::move(digits), cap);
}

PAdicApprox sub(const PAdicApprox& x, const PAdicApprox& y) {
    if (y.is_zero()) return x;
    check_same_prime(x, y);
    // Keep the full common window: negate(y) alone would truncate to y's cap.
    const int cap = std::min(x.resolution_cap(), y.resolution_cap());
    PAdicApprox yc = PAdicApprox::from_digits(y.prime(), y.lowest_position(), y.digits(), cap);
    return add(x, negate(yc));
}

PAdicApprox mul(const PAdicApprox& x, const PAdicApprox& y) {
    check_same_prime(x, y);
    const int p = x.prime();
    if (x.is_zero() || y.is_zero())
        return PAdicApprox(p, std::min(x.resolution_cap(), y.resolution_cap()));
    const int vx = x.lowest_position(), vy = y.lowest_position();
    // Exactness window shifts with the valuations.
    const int cap = std::min(vx + y.resolution_cap(), vy + x.resolution_cap());
    const int v = vx + vy;
    const size_t n = static_cast<size_t>(std::max(0, cap - v));
    std::vector<long long> acc(n, 0);
    for (size_t i = 0; i < x.digits().size(); ++i) {
        for (size_t j = 0; j < y.digits().size(); ++j) {
            if (i + j < n) acc[i + j] += static_cast<long long>(x.digits()[i]) * y.digits()[j];
        }
    }
    std::vector<int> digits(n, 0);
    long long carry = 0;
    for (size_t i = 0; i < n; ++i) {
        long long s = acc[i] + carry;
        digits[i] = static_cast<int>(s % p);
        carry = s / p;
    }
    return PAdicApprox::from_digits(p, v, std::move(digits), cap);
}

PAdicApprox shift(const PAdicApprox& x, int e) {
    if (x.is_zero()) {
        return PAdicApprox(x.prime(), x.resolution_cap() + e);
    }
    return PAdicApprox::from_digits(x.prime(), x.lowest_position() + e, x.digits(),
                                    x.resolution_cap() + e);
}

PAdicApprox mul_integer(const PAdicApprox& x, long long n) {
    return mul(x, PAdicApprox::from_integer(x.prime(), n, x.resolution_cap()));
}

Rational fractional_part(const PAdicApprox& x) {
    auto v = x.valuation();
    if (!v || *v >= 0) return Rational(0);
    Rational sum(0);
    for (int pos = *v; pos < 0; ++pos) {
        sum += Rational(x.digit_at(pos)) * rational_pow(x.prime(), pos);
    }
    return sum;
}

std::complex<double> additive_character(const PAdicApprox& y) {
    const double frac = to_double(fractional_part(y));
    return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

Rational monna_map(const PAdicApprox& x) {
    Rational sum(0);
    if (x.is_zero()) return sum;
    for (int pos = x.lowest_position(); pos < x.end_position(); ++pos) {
        if (int d = x.digit_at(pos); d != 0) sum += Rational(d) * rational_pow(x.prime(), -pos - 1);
    }
    return sum;
}

std::string render(const PAdicApprox& x) {
    std::ostringstream os;
    os << "p=" << x.prime() << ":";
    if (x.is_zero()) {
        os << " 0 .";
        return os.str();
    }
    const bool truncated = x.end_position() >= x.resolution_cap();
    os << (truncated ? " \xE2\x80\xA6" : " ");
    const int hi = std::max(x.end_position() - 1, 0);
    const int lo = std::min(x.lowest_position(), 0);
    for (int pos = hi; pos >= lo; --pos) {
        os << x.digit_at(pos);
        if (pos == 0) os << " .";
        if (pos > lo) os << " ";
    }
    return os.str();
}

Ball::Ball(int prime, int scale, const PAdicApprox& center)
    : prime_(prime), scale_(scale), center_(prime) {
    check_prime(prime);
    if (center.prime() != prime) throw std::invalid_argument("ball center prime mismatch");
    // Reduce modulo p^scale: keep digits at positions < scale only.
    if (!center.is_zero()) {
        std::vector<int> digits;
        for (int pos = center.lowest_position(); pos < std::min(scale, center.end_position());
             ++pos) {
            digits.push_back(center.digit_at(pos));
        }
        if (!digits.empty()) {
            center_ = PAdicApprox::from_digits(prime, center.lowest_position(), std::move(digits),
                                               std::max(scale, center.resolution_cap()));
        }
    }
}

bool Ball::contains(const PAdicApprox& x) const {
    // x in c + p^l Z_p  iff  digits of x and c agree at every position < l.
    const int lo = std::min(x.is_zero() ? 0 : x.lowest_position(),
                            center_.is_zero() ? 0 : center_.lowest_position());
    for (int pos = lo; pos < scale_; ++pos) {
        if (x.digit_at(pos) != center_.digit_at(pos)) return false;
    }
    return true;
}

bool operator==(const Ball& a, const Ball& b) {
    return a.prime_ == b.prime_ && a.scale_ == b.scale_ && a.center_ == b.center_;
}

BallRelation ball_relation(const Ball& b1, const Ball& b2) {
    if (b1.prime() != b2.prime()) throw std::invalid_argument("ball prime mismatch");
    if (b1.scale() == b2.scale())
        return b1.center() == b2.center() ? BallRelation::Equal : BallRelation::Disjoint;
    if (b1.scale() < b2.scale()) {
        // b1 is the bigger ball; containment iff b2's center lies in b1.
        return b1.contains(b2.center()) ? BallRelation::SecondInsideFirst : BallRelation::Disjoint;
    }
    return b2.contains(b1.center()) ? BallRelation::FirstInsideSecond : BallRelation::Disjoint;
}

RationalInterval monna_image_of_ball(const Ball& b) {
    const Rational lo = monna_map(b.center());
    return {lo, lo + rational_pow(b.prime(), -b.scale())};
}

FractionIndex::FractionIndex(int prime, std::vector<int> digits)
    : prime_(prime), digits_(std::move(digits)) {
    check_prime(prime);
    for (int d : digits_)
        if (d < 0 || d >= prime) throw std::invalid_argument("digit out of [0,p)");
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
}

FractionIndex FractionIndex::from_padic(const PAdicApprox& x) {
    std::vector<int> digits;
    if (auto v = x.valuation(); v && *v < 0) {
        digits.resize(static_cast<size_t>(-*v), 0);
        for (int pos = *v; pos < 0; ++pos) digits[static_cast<size_t>(-pos - 1)] = x.digit_at(pos);
    }
    return FractionIndex(x.prime(), std::move(digits));
}

Rational FractionIndex::value() const {
    Rational sum(0);
    for (int j = 0; j < depth(); ++j) sum += Rational(digit(j)) * rational_pow(prime_, -(j + 1));
    return sum;
}

PAdicApprox FractionIndex::to_padic(int resolution_cap) const {
    if (is_zero()) return PAdicApprox(prime_, resolution_cap);
    std::vector<int> digits(static_cast<size_t>(depth()), 0);
    for (int j = 0; j < depth(); ++j) digits[static_cast<size_t>(depth() - 1 - j)] = digit(j);
    return PAdicApprox::from_digits(prime_, -depth(), std::move(digits), resolution_cap);
}

std::strong_ordering operator<=>(const FractionIndex& a, const FractionIndex& b) {
    const int n = std::max(a.depth(), b.depth());
    for (int j = 0; j < n; ++j) {
        if (auto c = a.digit(j) <=> b.digit(j); c != 0) return c;
    }
    return std::strong_ordering::equal;
}

}  // namespace padicqm
