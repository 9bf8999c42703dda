#include "manin/fiber.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include "manin/enumerate.hpp"
#include "manin/lattice.hpp"
#include "manin/piecewise.hpp"

namespace manin {
namespace {

int fiber_lambda(int n, int lambda) {
    const int l = lambda == 0 ? n : lambda;
    if (l < 1 || l > n + 1) throw std::invalid_argument("fiber: lambda must lie in [1, n+1]");
    return l;
}

void require_admissible(const TrilinearForm& f, const IntVec& x, int lambda) {
    if (static_cast<int>(x.size()) != f.dim())
        throw std::invalid_argument("fiber: x has the wrong dimension");
    if (!in_admissible(f, Slot::X, x, lambda))
        throw std::domain_error("fiber: x lies outside the admissible locus");
}

// #{b mod q : B(x,b) = 0 mod q}. The congruence is linear in b with the
// matrix R[j][k] = sum_i a_{ijk} x_i, so one pass over (Z/q)^{n+1} suffices.
long long zero_image_count(const TrilinearForm& f, const IntVec& x, Int q) {
    const int d = f.dim();
    std::vector<Int> R(static_cast<std::size_t>(d) * d, 0);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            Int s = 0;
            for (int i = 0; i < d; ++i)
                s = (s + mod_pos(f.coeff(i, j, k), q) * mod_pos(x[i], q)) % q;
            R[static_cast<std::size_t>(j) * d + k] = s;
        }

    long long cnt = 0;
    IntVec b(d, 0);
    while (true) {
        bool zero = true;
        for (int k = 0; k < d && zero; ++k) {
            Int s = 0;
            for (int j = 0; j < d; ++j) s = (s + R[static_cast<std::size_t>(j) * d + k] * b[j]) % q;
            zero = s == 0;
        }
        if (zero) ++cnt;
        int j = 0;
        while (j < d && b[j] == q - 1) b[j++] = 0;
        if (j == d) return cnt;
        ++b[j];
    }
}

long long ipow_ll(Int base, int exp) {
    i128 r = 1;
    for (int e = 0; e < exp; ++e) r = mul_checked(r, static_cast<i128>(base));
    return narrow_i128(r);
}

}  // namespace

long long fiber_S_aq_exact(const TrilinearForm& f, const IntVec& x, Int a, Int q) {
    if (q < 1) throw std::invalid_argument("fiber_S_aq: q must be >= 1");
    if (std::gcd(static_cast<long long>(mod_pos(a, q)), static_cast<long long>(q)) != 1)
        throw std::invalid_argument("fiber_S_aq: a and q must be coprime");
    if (static_cast<int>(x.size()) != f.dim())
        throw std::invalid_argument("fiber_S_aq: x has the wrong dimension");
    return narrow_i128(mul_checked(static_cast<i128>(ipow_ll(q, f.dim())),
                                   static_cast<i128>(zero_image_count(f, x, q))));
}

mpq_class fiber_series(const TrilinearForm& f, const IntVec& x, Int Q, int lambda) {
    if (Q < 1) throw std::invalid_argument("fiber_series: Q must be >= 1");
    require_admissible(f, x, fiber_lambda(f.n(), lambda));
    mpq_class total = 0;
    for (Int q = 1; q <= Q; ++q) {
        mpz_class denom;
        mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(q),
                      static_cast<unsigned long>(f.dim()));
        mpq_class term(mpz_class(static_cast<long>(euler_phi(q))) *
                           static_cast<long>(zero_image_count(f, x, q)),
                       denom);
        term.canonicalize();
        total += term;
    }
    return total;
}

McEstimate fiber_J(const TrilinearForm& f, const IntVec& x, ArchMethod method,
                   const FiberJParams& params, int lambda) {
    require_admissible(f, x, fiber_lambda(f.n(), lambda));
    const int d = f.dim();
    std::vector<double> xr(x.begin(), x.end());

    if (method == ArchMethod::LerayFiber) {
        std::vector<double> y(d), b(d);
        std::vector<double> cs;
        auto est = qmc_integrate(d, params.mc, [&](const double* u) {
            for (int k = 0; k < d; ++k) y[k] = 2.0 * u[k] - 1.0;
            contract_real(f, BilinearKind::B, xr.data(), y.data(), b.data());
            cs.clear();
            for (int k = 0; k < d; ++k)
                if (b[k] != 0.0) cs.push_back(std::fabs(b[k]));
            if (cs.empty()) return 0.0;
            return std::ldexp(density_at_zero_real(cs), d);
        });
        const double vol = std::ldexp(1.0, d);
        return {est.value * vol, est.stderr_ * vol};
    }
    if (method != ArchMethod::Sinc)
        throw std::invalid_argument("fiber_J: method must be LerayFiber or Sinc");

    if (params.phi <= 0.0) throw std::invalid_argument("fiber_J: phi must be > 0");
    const auto Rm = contraction_matrix(f, Slot::X, x);
    std::vector<double> R(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) R[static_cast<std::size_t>(j) * d + k] =
            static_cast<double>(Rm[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);

    auto kernel = [&](double phi, const double* u) {
        double F = 0.0;
        for (int j = 0; j < d; ++j) {
            const double v = 2.0 * u[j] - 1.0;
            double row = 0.0;
            for (int k = 0; k < d; ++k) row += R[static_cast<std::size_t>(j) * d + k] *
                                               (2.0 * u[d + k] - 1.0);
            F += v * row;
        }
        if (F == 0.0) return 2.0 * phi;
        return std::sin(2.0 * M_PI * phi * F) / (M_PI * F);
    };
    const double phi = params.phi;
    auto ests = qmc_integrate_many(
        2 * d, params.mc,
        {[&](const double* u) { return kernel(phi, u); },
         [&](const double* u) { return kernel(phi / 2.0, u); }});
    const double vol = std::ldexp(1.0, 2 * d);
    const double value = ests[0].value * vol;
    const double tail = std::fabs(ests[0].value - ests[1].value) * vol;
    const double mc = ests[0].stderr_ * vol;
    return {value, std::sqrt(mc * mc + tail * tail)};
}

FiberDensity fiber_density(const TrilinearForm& f, const IntVec& x, Int Q, ArchMethod method,
                           const FiberJParams& params, int lambda) {
    FiberDensity out;
    out.x = x;
    out.Q = Q;
    out.phi = method == ArchMethod::Sinc ? params.phi : 0.0;
    out.series_trunc = fiber_series(f, x, Q, lambda);
    out.J_x = fiber_J(f, x, method, params, lambda);
    return out;
}

double fiber_predict(const TrilinearForm& f, const IntVec& x, Int P2, Int P3, Int Q,
                     const FiberJParams& params, int lambda) {
    if (P2 < 0 || P3 < 0) throw std::invalid_argument("fiber_predict: bounds must be >= 0");
    const double series = fiber_series(f, x, Q, lambda).get_d();
    const double J = fiber_J(f, x, ArchMethod::LerayFiber, params, lambda).value;
    return series * J * std::pow(static_cast<double>(P2), f.n()) *
           std::pow(static_cast<double>(P3), f.n());
}

long long count_N_x(const TrilinearForm& f, const IntVec& x, Int P2, Int P3) {
    if (P2 < 0 || P3 < 0) throw std::invalid_argument("count_N_x: bounds must be >= 0");
    if (static_cast<int>(x.size()) != f.dim())
        throw std::invalid_argument("count_N_x: x has the wrong dimension");
    // B(x,-y) = -B(x,y) cuts the same hyperplane, so y and -y contribute
    // equal fiber counts; y = 0 is degenerate and contributes nothing.
    i128 total = 0;
    for (const auto& y : half_space_points(f.dim(), P2)) {
        const auto b = contract(f, BilinearKind::B, x, y);
        if (b.is_zero()) continue;
        total = add_checked(total,
                            2 * static_cast<i128>(count_hyperplane_points(b.values, P3)));
    }
    return narrow_i128(total);
}

FiberSumReport fiber_sum(const TrilinearForm& f, Int P1, Int Q, const FiberJParams& params,
                         int lambda) {
    if (P1 < 1) throw std::invalid_argument("fiber_sum: P1 must be >= 1");
    const int lam = fiber_lambda(f.n(), lambda);
    FiberSumReport rep;
    rep.P1 = P1;
    rep.Q = Q;
    CompensatedSum acc;
    // Both factors are even in x, so each half-space representative stands
    // for itself and its negative.
    for (const auto& x : half_space_points(f.dim(), P1)) {
        if (!in_admissible(f, Slot::X, x, lam)) continue;
        const double term = fiber_series(f, x, Q, lam).get_d() *
                            fiber_J(f, x, ArchMethod::LerayFiber, params, lam).value;
        IntVec neg(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
        rep.terms.emplace_back(x, term);
        rep.terms.emplace_back(std::move(neg), term);
        acc.add(2.0 * term);
    }
    rep.value = acc.value();
    return rep;
}

}  // namespace manin
