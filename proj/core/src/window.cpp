#include "padicqm/window.hpp"

#include <stdexcept>
#include <string>

namespace padicqm {

std::int64_t ipow(int p, int e) {
    std::int64_t v = 1;
    for (int i = 0; i < e; ++i) v *= p;
    return v;
}

Window::Window(int prime, int domain_exponent, int resolution)
    : p_(prime), R_(domain_exponent), K_(resolution) {
    if (prime < 2) throw std::invalid_argument("prime must be >= 2");
    if (R_ < 0) throw std::invalid_argument("domain exponent R must be >= 0");
    if (K_ < 0) throw std::invalid_argument("resolution K must be >= 0");
    coset_count_ = ipow(p_, R_ + K_);
    // Scale r has (p-1) p^{R-r} admissible wavelets; enumerate b big-endian
    // (digit b_{-1} most significant) to realize the lexicographic order.
    for (int r = R_; r >= 1 - K_; --r) {
        const int depth = R_ - r;
        const std::int64_t balls = ipow(p_, depth);
        for (std::int64_t n = 0; n < balls; ++n) {
            std::vector<int> bdigits(static_cast<size_t>(depth), 0);
            std::int64_t rem = n;
            for (int j = depth - 1; j >= 0; --j) {
                bdigits[static_cast<size_t>(j)] = static_cast<int>(rem % p_);
                rem /= p_;
            }
            FractionIndex b(p_, std::move(bdigits));
            for (int k = 1; k < p_; ++k) {
                ordinals_[{r, b, k}] = static_cast<std::int64_t>(indices_.size());
                indices_.push_back({r, b, k});
            }
        }
    }
}

std::int64_t Window::coset_index_of(const PAdicApprox& x) const {
    if (x.prime() != p_) throw std::invalid_argument("coset_index_of: prime mismatch");
    if (auto v = x.valuation(); v && *v < -R_)
        throw std::invalid_argument("coset_index_of: point outside domain ball");
    std::int64_t n = 0;
    for (int i = K_ - 1; i >= -R_; --i) n = n * p_ + x.digit_at(i);
    return n;
}

PAdicApprox Window::representative(std::int64_t n) const {
    if (n < 0 || n >= coset_count_) throw std::invalid_argument("coset index out of range");
    std::vector<int> digits(static_cast<size_t>(R_ + K_), 0);
    for (size_t i = 0; i < digits.size() && n != 0; ++i) {
        digits[i] = static_cast<int>(n % p_);
        n /= p_;
    }
    return PAdicApprox::from_digits(p_, -R_, std::move(digits));
}

Ball Window::coset_ball(std::int64_t n) const { return Ball(p_, K_, representative(n)); }

Rational Window::coset_monna(std::int64_t n) const { return monna_map(representative(n)); }

bool Window::admissible(const WaveletIndex& idx) const {
    if (idx.b.prime() != p_) return false;
    if (idx.k < 1 || idx.k >= p_) return false;
    if (idx.r > R_ || idx.r < 1 - K_) return false;
    return idx.b.depth() <= R_ - idx.r;
}

std::int64_t Window::ordinal_of(const WaveletIndex& idx) const {
    auto it = ordinals_.find(idx);
    if (it == ordinals_.end())
        throw std::invalid_argument("wavelet index not admissible in this window");
    return it->second;
}

Ball Window::support_ball(const WaveletIndex& idx) const {
    return Ball(idx.b.prime(), -idx.r, shift(idx.b.to_padic(), -idx.r));
}

}  // namespace padicqm
