#include "manin/arith.hpp"

namespace manin {

std::vector<int> moebius_table(Int n) {
    if (n < 1) throw std::invalid_argument("moebius_table: n must be >= 1");
    // Smallest prime factor sieve.
    std::vector<Int> spf(n + 1, 0);
    std::vector<Int> primes;
    for (Int i = 2; i <= n; ++i) {
        if (spf[i] == 0) {
            spf[i] = i;
            primes.push_back(i);
        }
        for (Int p : primes) {
            if (p > spf[i] || i * p > n) break;
            spf[i * p] = p;
        }
    }
    std::vector<int> mu(n + 1, 0);
    if (n >= 1) mu[1] = 1;
    for (Int i = 2; i <= n; ++i) {
        const Int p = spf[i];
        const Int m = i / p;
        mu[i] = (m % p == 0) ? 0 : -mu[m];
    }
    return mu;
}

Int integer_root(double b, int k) {
    if (k < 1) throw std::invalid_argument("integer_root: k must be >= 1");
    if (b < 0) throw std::invalid_argument("integer_root: negative radicand");
    if (b < 1) return 0;
    Int r = static_cast<Int>(std::floor(std::pow(b, 1.0 / k)));
    auto pow_le = [&](Int v) {
        i128 acc = 1;
        for (int t = 0; t < k; ++t) {
            acc *= v;
            if (acc > static_cast<i128>(1) << 100) return false;
        }
        return static_cast<double>(acc) <= b;
    };
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

Int euler_phi(Int q) {
    if (q < 1) throw std::invalid_argument("euler_phi: q must be >= 1");
    Int result = q;
    Int m = q;
    for (Int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            result -= result / p;
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

}  // namespace manin
