#include "manin/piecewise.hpp"

#include <algorithm>
#include <stdexcept>

namespace manin {

namespace {

using Poly = std::vector<mpq_class>;  // coefficient c0 + c1 x + ...

mpq_class poly_eval(const Poly& p, const mpq_class& x) {
    mpq_class acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly poly_antiderivative(const Poly& p) {
    Poly out(p.size() + 1, mpq_class(0));
    for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] = p[k] / mpq_class(k + 1);
    return out;
}

// p(x + s) expanded by the binomial theorem.
Poly poly_shift(const Poly& p, const mpq_class& s) {
    Poly out(p.size(), mpq_class(0));
    for (std::size_t k = 0; k < p.size(); ++k) {
        // distribute p[k] * (x+s)^k
        mpq_class binom = 1;
        mpq_class spow = 1;
        // term x^(k-t) s^t * C(k,t)
        for (std::size_t t = 0; t <= k; ++t) {
            out[k - t] += p[k] * binom * spow;
            binom = binom * mpq_class(static_cast<long>(k - t)) / mpq_class(static_cast<long>(t + 1));
            spow *= s;
        }
    }
    return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), mpq_class(0));
    for (std::size_t k = 0; k < a.size(); ++k) out[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) out[k] -= b[k];
    return out;
}

}  // namespace

mpq_class PiecewisePoly::eval(const mpq_class& x) const {
    if (breaks.empty() || x < breaks.front() || x >= breaks.back()) return 0;
    // last interval with breaks[i] <= x
    std::size_t lo = 0, hi = breaks.size() - 1;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (breaks[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    return poly_eval(pieces[lo], x);
}

PiecewisePoly uniform_density(const mpq_class& c) {
    if (c <= 0) throw std::invalid_argument("uniform_density: scale must be positive");
    PiecewisePoly f;
    f.breaks = {-c, c};
    f.pieces = {{mpq_class(1) / (2 * c)}};
    return f;
}

PiecewisePoly convolve_uniform(const PiecewisePoly& f, const mpq_class& c) {
    if (c <= 0) throw std::invalid_argument("convolve_uniform: scale must be positive");
    if (f.breaks.size() < 2) throw std::invalid_argument("convolve_uniform: empty density");

    // CDF pieces of f, with cumulative constants so each piece is exact on
    // its own interval; 0 to the left of the support, 1 to the right.
    const std::size_t np = f.pieces.size();
    std::vector<Poly> cdf(np);
    mpq_class cum = 0;
    for (std::size_t i = 0; i < np; ++i) {
        const Poly P = poly_antiderivative(f.pieces[i]);
        Poly piece = P;
        piece[0] += cum - poly_eval(P, f.breaks[i]);
        cdf[i] = piece;
        cum = poly_eval(piece, f.breaks[i + 1]);
    }
    // cum is the total mass; for a probability density it is 1.

    // F(x + s) as a polynomial valid near x0 (s = +-c).
    const auto shifted_cdf = [&](const mpq_class& x0, const mpq_class& s) -> Poly {
        const mpq_class arg = x0 + s;
        if (arg < f.breaks.front()) return Poly{mpq_class(0)};
        if (arg >= f.breaks.back()) return Poly{cum};
        std::size_t lo = 0, hi = f.breaks.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (f.breaks[mid] <= arg)
                lo = mid;
            else
                hi = mid;
        }
        return poly_shift(cdf[lo], s);
    };

    PiecewisePoly g;
    for (const auto& b : f.breaks) {
        g.breaks.push_back(b - c);
        g.breaks.push_back(b + c);
    }
    std::sort(g.breaks.begin(), g.breaks.end());
    g.breaks.erase(std::unique(g.breaks.begin(), g.breaks.end()), g.breaks.end());

    const mpq_class scale = mpq_class(1) / (2 * c);
    for (std::size_t i = 0; i + 1 < g.breaks.size(); ++i) {
        const mpq_class mid = (g.breaks[i] + g.breaks[i + 1]) / 2;
        Poly piece = poly_sub(shifted_cdf(mid, c), shifted_cdf(mid, -c));
        for (auto& co : piece) co *= scale;
        g.pieces.push_back(std::move(piece));
    }
    return g;
}

mpq_class density_at_zero(const std::vector<mpq_class>& cs) {
    if (cs.empty()) throw std::invalid_argument("density_at_zero: need at least one scale");
    for (const auto& c : cs)
        if (c <= 0) throw std::invalid_argument("density_at_zero: scales must be positive");
    PiecewisePoly f = uniform_density(cs[0]);
    for (std::size_t k = 1; k < cs.size(); ++k) f = convolve_uniform(f, cs[k]);
    return f.eval(0);
}

double density_at_zero_real(const std::vector<double>& cs) {
    const int m = static_cast<int>(cs.size());
    if (m == 0) throw std::invalid_argument("density_at_zero_real: need at least one scale");
    if (m > 24) throw std::invalid_argument("density_at_zero_real: too many scales");
    if (m == 1) return 1.0 / (2.0 * cs[0]);
    double C = 0.0, prod = 1.0, fact = 1.0;
    for (int k = 0; k < m; ++k) {
        C += cs[k];
        prod *= 2.0 * cs[k];
    }
    for (int k = 2; k < m; ++k) fact *= k;
    // Box-spline expansion: sum over sign subsets of (C - 2 sum_S c)_+^{m-1}.
    double acc = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        double t = C;
        int bits = 0;
        for (int k = 0; k < m; ++k)
            if (mask & (1u << k)) {
                t -= 2.0 * cs[k];
                ++bits;
            }
        if (t <= 0.0) continue;
        double pw = 1.0;
        for (int e = 0; e < m - 1; ++e) pw *= t;
        acc += (bits & 1) ? -pw : pw;
    }
    return acc / (fact * prod);
}

}  // namespace manin
