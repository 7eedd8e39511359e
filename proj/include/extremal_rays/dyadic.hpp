#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <vector>

#include "errors.hpp"

namespace extremal_rays {

// Exact dyadic rational num / 2^exp2, normalized so that num is odd or zero.
// Comb geometry at k=5 needs spacing 2^-10 resolved exactly; all grid and
// slit coordinates go through this type so cell classification never depends
// on float rounding. A double shadow is available via value().
class Dyadic {
  public:
    constexpr Dyadic() : num_(0), exp2_(0) {}
    constexpr Dyadic(std::int64_t n) : num_(n), exp2_(0) { normalize(); }
    constexpr Dyadic(std::int64_t n, int exp2) : num_(n), exp2_(exp2) { normalize(); }

    static Dyadic pow2(int e) { return e >= 0 ? Dyadic(std::int64_t(1) << e, 0) : Dyadic(1, -e); }

    // Parses "p/2^q", "p/q" with q a power of two, a plain integer, or a
    // finite decimal (decimals are exact iff the reduced denominator is a
    // power of two, e.g. "0.31250" but not "0.1").
    static Dyadic parse(const std::string& s);

    constexpr std::int64_t num() const { return num_; }
    constexpr int exp2() const { return exp2_; }
    double value() const { return std::ldexp(double(num_), -exp2_); }

    friend constexpr Dyadic operator+(Dyadic a, Dyadic b) {
        int e = a.exp2_ > b.exp2_ ? a.exp2_ : b.exp2_;
        return Dyadic(shifted(a, e) + shifted(b, e), e);
    }
    friend constexpr Dyadic operator-(Dyadic a, Dyadic b) {
        int e = a.exp2_ > b.exp2_ ? a.exp2_ : b.exp2_;
        return Dyadic(shifted(a, e) - shifted(b, e), e);
    }
    friend constexpr Dyadic operator*(Dyadic a, Dyadic b) {
        return Dyadic(a.num_ * b.num_, a.exp2_ + b.exp2_);
    }
    constexpr Dyadic operator-() const { return Dyadic(-num_, exp2_); }

    friend constexpr bool operator==(Dyadic a, Dyadic b) {
        return a.num_ == b.num_ && (a.num_ == 0 || a.exp2_ == b.exp2_);
    }
    friend constexpr std::strong_ordering operator<=>(Dyadic a, Dyadic b) {
        int e = a.exp2_ > b.exp2_ ? a.exp2_ : b.exp2_;
        return shifted(a, e) <=> shifted(b, e);
    }

    // a / b when the quotient is an exact integer (used for cell indexing);
    // throws resolution_error otherwise.
    friend std::int64_t exact_div(Dyadic a, Dyadic b) {
        if (b.num_ == 0) throw invalid_parameter("exact_div: division by zero");
        int e = a.exp2_ > b.exp2_ ? a.exp2_ : b.exp2_;
        std::int64_t an = shifted(a, e), bn = shifted(b, e);
        if (an % bn != 0) throw resolution_error("coordinate is not a multiple of the grid step");
        return an / bn;
    }
    friend bool divides(Dyadic b, Dyadic a) {
        if (b.num_ == 0) return false;
        int e = a.exp2_ > b.exp2_ ? a.exp2_ : b.exp2_;
        return shifted(a, e) % shifted(b, e) == 0;
    }

    // a / n when the quotient is dyadic (n = 2^s m with odd m dividing a's
    // numerator); throws invalid_parameter otherwise.
    friend Dyadic div_int(Dyadic a, std::int64_t n) {
        if (n == 0) throw invalid_parameter("div_int: division by zero");
        if (n < 0) { a = -a; n = -n; }
        int s = 0;
        while (n % 2 == 0) { n /= 2; ++s; }
        if (a.num_ % n != 0) throw invalid_parameter("div_int: quotient is not dyadic");
        return Dyadic(a.num_ / n, a.exp2_ + s);
    }

    // Exact decimal string (every dyadic has a finite decimal expansion).
    std::string to_decimal() const;

  private:
    static constexpr std::int64_t shifted(Dyadic d, int e) {
        return d.num_ << (e - d.exp2_);  // caller guarantees e >= exp2_
    }
    constexpr void normalize() {
        if (num_ == 0) { exp2_ = 0; return; }
        while ((num_ & 1) == 0 && exp2_ > 0) { num_ >>= 1; --exp2_; }
    }

    std::int64_t num_;
    int exp2_;  // >= 0 after normalization
};

inline std::string Dyadic::to_decimal() const {
    if (num_ == 0) return "0";
    // num / 2^e = num * 5^e / 10^e
    bool neg = num_ < 0;
    unsigned __int128 n = neg ? -(unsigned __int128)num_ : (unsigned __int128)num_;
    for (int i = 0; i < exp2_; ++i) n *= 5;
    std::string digits;
    while (n > 0) { digits.push_back(char('0' + int(n % 10))); n /= 10; }
    while ((int)digits.size() <= exp2_) digits.push_back('0');
    std::string out;
    if (neg) out.push_back('-');
    for (int i = (int)digits.size() - 1; i >= 0; --i) {
        out.push_back(digits[i]);
        if (i == exp2_ && i != 0) out.push_back('.');
    }
    if (exp2_ > 0 && exp2_ >= (int)digits.size()) {}  // handled by zero padding above
    if (exp2_ == 0) return out;
    // trim trailing zeros after the point
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
    return out;
}

inline Dyadic Dyadic::parse(const std::string& s) {
    if (s.empty()) throw invalid_parameter("Dyadic::parse: empty string");
    auto bad = [&]() -> Dyadic { throw invalid_parameter("Dyadic::parse: '" + s + "' is not an exact dyadic rational"); };
    size_t slash = s.find('/');
    if (slash != std::string::npos) {
        std::int64_t p = 0;
        bool neg = false;
        size_t i = 0;
        if (s[i] == '-') { neg = true; ++i; }
        if (i == slash) return bad();
        for (; i < slash; ++i) {
            if (s[i] < '0' || s[i] > '9') return bad();
            p = p * 10 + (s[i] - '0');
        }
        std::string den = s.substr(slash + 1);
        int q = 0;
        if (den.rfind("2^", 0) == 0) {
            q = std::stoi(den.substr(2));
        } else {
            std::int64_t d = std::stoll(den);
            if (d <= 0) return bad();
            while (d > 1) {
                if (d % 2 != 0) return bad();
                d /= 2;
                ++q;
            }
        }
        return Dyadic(neg ? -p : p, q);
    }
    size_t caret = s.find('^');
    if (caret != std::string::npos) {
        // "2^-q" shorthand
        if (s.rfind("2^", 0) != 0) return bad();
        int e = std::stoi(s.substr(2));
        return pow2(e);
    }
    size_t dot = s.find('.');
    if (dot == std::string::npos) return Dyadic(std::stoll(s), 0);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    int frac = int(s.size() - dot - 1);
    if (digits.empty() || frac <= 0) return bad();
    bool neg = digits[0] == '-';
    if (neg) digits = digits.substr(1);
    unsigned __int128 p = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return bad();
        p = p * 10 + (c - '0');
    }
    // p / 10^frac = p / (2^frac 5^frac): dyadic iff 5^frac divides p
    for (int i = 0; i < frac; ++i) {
        if (p % 5 != 0) return bad();
        p /= 5;
    }
    if (p > (unsigned __int128)INT64_MAX) return bad();
    return Dyadic(neg ? -std::int64_t(p) : std::int64_t(p), frac);
}

}  // namespace extremal_rays
