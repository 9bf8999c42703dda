#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace manin {

using Int = std::int64_t;
using i128 = __int128;
using IntVec = std::vector<Int>;

class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a requested exact computation exceeds the configured work budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Int narrow_i128(i128 v, const char* what = "integer overflow") {
    if (v > static_cast<i128>(INT64_MAX) || v < static_cast<i128>(INT64_MIN))
        throw OverflowError(what);
    return static_cast<Int>(v);
}

inline i128 mul_checked(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit multiply overflow");
    return r;
}

inline i128 add_checked(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit add overflow");
    return r;
}

inline Int abs64(Int a) {
    if (a == INT64_MIN) throw OverflowError("abs(INT64_MIN)");
    return a < 0 ? -a : a;
}

inline Int gcd64(Int a, Int b) { return std::gcd(abs64(a), abs64(b)); }

inline Int gcd_vec(const IntVec& v) {
    Int g = 0;
    for (Int x : v) g = gcd64(g, x);
    return g;
}

inline Int max_abs(const IntVec& v) {
    Int m = 0;
    for (Int x : v) m = std::max(m, abs64(x));
    return m;
}

inline bool is_zero_vec(const IntVec& v) {
    for (Int x : v)
        if (x != 0) return false;
    return true;
}

// Neumaier variant of compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Moebius function values mu[1..n]; mu[0] is unused.
std::vector<int> moebius_table(Int n);

// Exact floor(b^(1/k)) for b >= 0, k >= 1.
Int integer_root(double b, int k);

// Euler phi by trial division; q >= 1.
Int euler_phi(Int q);

// Nonnegative residue of a modulo m > 0.
inline Int mod_pos(Int a, Int m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace manin
