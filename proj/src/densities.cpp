#include "manin/densities.hpp"

#include <cmath>
#include <stdexcept>

#include "manin/piecewise.hpp"

namespace manin {
namespace {

bool is_prime(Int p) {
    if (p < 2) return false;
    for (Int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

mpz_class mpz_pow(Int base, unsigned long exp) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), exp);
    return out;
}

// p^{2r(n+1)}, the number of (x, y) residue pairs mod p^r, saturating at the
// budget sentinel to keep the comparison overflow-safe.
long long pair_loop_size(Int p, int r, int dim) {
    i128 v = 1;
    for (int e = 0; e < 2 * r * dim; ++e) {
        v *= p;
        if (v > static_cast<i128>(4) * kDefaultResidueBudget * 1000) return INT64_MAX;
    }
    return narrow_i128(v);
}

mpq_class one_minus_p_pow(Int p, int n) {
    // 1 - p^{-n} as an exact rational
    mpq_class r(mpz_pow(p, n) - 1, mpz_pow(p, n));
    r.canonicalize();
    return r;
}

}  // namespace

LocalDensity sigma_p(const TrilinearForm& f, Int p, int r_max, long long budget) {
    if (!is_prime(p)) throw std::invalid_argument("sigma_p: p must be prime");
    if (r_max < 0) throw std::invalid_argument("sigma_p: r_max must be >= 0");
    LocalDensity out;
    out.p = p;
    Int q = 1;
    for (int r = 0; r <= r_max; ++r) {
        if (r > 0) q *= p;
        if (pair_loop_size(p, r, f.dim()) > budget) {
            out.stabilized = false;
            throw SigmaPBudgetError(
                "sigma_p: residue pair loop for p^" + std::to_string(r) + " exceeds budget", out);
        }
        mpq_class term(mpz_class(static_cast<long>(M_of_q(f, q))),
                       mpz_pow(p, static_cast<unsigned long>(r) * (3 * f.n() + 2)));
        term.canonicalize();
        out.seq.emplace_back(r, std::move(term));
    }
    out.value = out.seq.back().second;
    out.stabilized = out.seq.size() >= 2 &&
                     out.seq[out.seq.size() - 2].second == out.seq.back().second;
    return out;
}

long long N_star(const TrilinearForm& f, Int p, int r) {
    if (!is_prime(p)) throw std::invalid_argument("N_star: p must be prime");
    if (r < 1) throw std::invalid_argument("N_star: r must be >= 1");
    const int d = f.dim();
    Int q = 1;
    for (int e = 0; e < r; ++e) q = narrow_i128(mul_checked(static_cast<i128>(q), static_cast<i128>(p)));

    // powers of p up to the largest exponent used below
    const int max_exp = r * d + r;
    std::vector<i128> pp(static_cast<std::size_t>(max_exp) + 1, 1);
    for (int e = 1; e <= max_exp; ++e) pp[e] = mul_checked(pp[e - 1], static_cast<i128>(p));

    const auto vec_nonzero_mod_p = [p](const IntVec& v) {
        for (Int c : v)
            if (c % p != 0) return true;
        return false;
    };

    IntVec x(d, 0), y(d, 0), b(d, 0);
    auto next = [&](IntVec& v) {
        for (auto& c : v) {
            if (++c < q) return true;
            c = 0;
        }
        return false;
    };

    i128 total = 0;
    do {
        if (!vec_nonzero_mod_p(x)) continue;
        do {
            if (!vec_nonzero_mod_p(y)) continue;
            for (int k = 0; k < d; ++k) {
                i128 s = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        s += static_cast<i128>(f.coeff(i, j, k)) * x[i] % q * y[j] % q;
                b[k] = static_cast<Int>(mod_pos(static_cast<Int>(s % q), q));
            }
            // v = min valuation of the b_k, capped at r (b_k = 0 mod p^r
            // counts as >= r)
            int v = r;
            for (Int c : b) {
                int vc = 0;
                while (vc < r && c % p == 0) {
                    c /= p;
                    ++vc;
                }
                if (vc < v) v = vc;
            }
            // z with b.z = 0 mod p^r and z not 0 mod p: solutions in the full
            // space minus those supported on p Z^d.
            const i128 all = pp[static_cast<std::size_t>(r) * (d - 1) + std::min(r, v)];
            const i128 sub = pp[static_cast<std::size_t>(r - 1) * (d - 1) + std::min(r - 1, v)];
            total += all - sub;
        } while (next(y));
        std::fill(y.begin(), y.end(), 0);
    } while (next(x));
    return narrow_i128(total);
}

PrimitiveDensityReport check_primitive_density(const TrilinearForm& f, Int p, int r_max,
                                               long long budget) {
    if (r_max < 1)
        throw std::invalid_argument("check_primitive_density: r_max must be >= 1");
    const auto dens = sigma_p(f, p, r_max, budget);
    mpq_class factor = one_minus_p_pow(p, f.n());
    factor = factor * factor * factor;

    PrimitiveDensityReport rep;
    rep.p = p;
    rep.gaps_shrink = true;
    for (int r = 1; r <= r_max; ++r) {
        PrimitiveDensityRow row;
        row.r = r;
        row.primitive_ratio =
            mpq_class(mpz_class(static_cast<long>(N_star(f, p, r))),
                      mpz_pow(p, static_cast<unsigned long>(r) * (3 * f.n() + 2)));
        row.primitive_ratio.canonicalize();
        row.target = factor * dens.seq[static_cast<std::size_t>(r)].second;
        row.gap = abs(row.primitive_ratio - row.target);
        if (!rep.rows.empty() && row.gap > rep.rows.back().gap) rep.gaps_shrink = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

ArchDensity sigma_infinity(const TrilinearForm& f, ArchMethod method, const ArchParams& params) {
    if (f.n() < 1) throw std::invalid_argument("sigma_infinity: needs n >= 1");
    ArchDensity out;
    out.phi = params.phi;

    if (method == ArchMethod::LerayFiber || method == ArchMethod::Both) {
        const int d = f.dim();
        const int dim = 2 * d;
        auto est = qmc_integrate(dim, params.mc, [&f, d](const double* t) {
            double x[8], y[8];
            for (int i = 0; i < d; ++i) {
                x[i] = 2.0 * t[i] - 1.0;
                y[i] = 2.0 * t[d + i] - 1.0;
            }
            double b[8];
            contract_real(f, BilinearKind::B, x, y, b);
            std::vector<double> cs;
            cs.reserve(d);
            for (int k = 0; k < d; ++k)
                if (b[k] != 0.0) cs.push_back(std::abs(b[k]));
            if (cs.empty()) return 0.0;  // measure-zero degenerate pairs
            // fiber slice mass Vol/|b| = 2^d f_b(0)
            return std::ldexp(density_at_zero_real(cs), d);
        });
        const double vol = std::ldexp(1.0, dim);
        out.leray = {est.value * vol, est.stderr_ * vol};
        out.have_leray = true;
    }

    if (method == ArchMethod::Sinc || method == ArchMethod::Both) {
        QuadSpec quad;
        quad.mc = params.mc;
        const auto ests = J_of_phi_many(f, {params.phi, params.phi / 2.0}, quad);
        out.sinc_tail = std::abs(ests[0].value - ests[1].value);
        out.sinc.value = ests[0].value;
        out.sinc.stderr_ =
            std::sqrt(ests[0].stderr_ * ests[0].stderr_ + out.sinc_tail * out.sinc_tail);
        out.have_sinc = true;
    }
    return out;
}

mpq_class a_of_p(Int p, int n) {
    if (!is_prime(p)) throw std::invalid_argument("a_of_p: p must be prime");
    if (n < 1) throw std::invalid_argument("a_of_p: n must be >= 1");
    mpq_class half(mpz_class(p) - 1, mpz_class(p));  // 1 - 1/p
    half.canonicalize();
    mpq_class body = one_minus_p_pow(p, n);
    mpq_class r = half * half * half / (body * body * body);
    r.canonicalize();
    return r;
}

mpq_class tamagawa_p(const TrilinearForm& f, Int p, int r_max, long long budget) {
    mpq_class factor = one_minus_p_pow(p, f.n());
    factor = factor * factor * factor;
    return factor * sigma_p(f, p, r_max, budget).value;
}

McEstimate tamagawa_inf(const TrilinearForm& f, ArchMethod method, const ArchParams& params) {
    if (method == ArchMethod::Both)
        throw std::invalid_argument("tamagawa_inf: pick one estimator");
    const auto dens = sigma_infinity(f, method, params);
    const auto& est = method == ArchMethod::LerayFiber ? dens.leray : dens.sinc;
    const double scale = std::pow(static_cast<double>(f.n()), 3) / 8.0;
    return {scale * est.value, scale * est.stderr_};
}

}  // namespace manin
