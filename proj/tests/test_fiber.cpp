#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "doctest.h"
#include "manin/enumerate.hpp"
#include "manin/fiber.hpp"

using namespace manin;

namespace {

void iterate_box(int d, Int P, const std::function<void(const IntVec&)>& fn) {
    IntVec v(d, -P);
    while (true) {
        fn(v);
        int k = 0;
        while (k < d && v[k] == P) v[k++] = -P;
        if (k == d) return;
        ++v[k];
    }
}

// Definition-level complete sum: both residue blocks enumerated, complex
// exponentials summed as written.
std::complex<double> direct_fiber_S(const TrilinearForm& f, const IntVec& x, Int a, Int q) {
    const int d = f.dim();
    std::complex<double> total = 0.0;
    IntVec b(d, 0), bp(d, 0);
    auto next = [&](IntVec& v) {
        int k = 0;
        while (k < d && v[k] == q - 1) v[k++] = 0;
        if (k == d) return false;
        ++v[k];
        return true;
    };
    do {
        std::fill(bp.begin(), bp.end(), 0);
        do {
            const Int val = mod_pos(eval_form(f, x, b, bp), q);
            total += std::polar(1.0, 2.0 * M_PI * static_cast<double>(a) *
                                         static_cast<double>(val) / static_cast<double>(q));
        } while (next(bp));
    } while (next(b));
    return total;
}

}  // namespace

TEST_SUITE("fiber") {

TEST_CASE("collapsed complete sums match the definition") {
    const auto diag = TrilinearForm::diagonal(1);
    const auto gen = random_generic_form(1, 3, 99);
    const IntVec xd{1, 1}, xg{1, 2};
    for (Int q = 1; q <= 6; ++q) {
        long long ref = -1;
        for (Int a = 0; a < q || (q == 1 && a == 0); ++a) {
            if (std::gcd(static_cast<long long>(a == 0 && q == 1 ? 1 : a),
                         static_cast<long long>(q)) != 1)
                continue;
            const Int aa = q == 1 ? 0 : a;
            const long long collapsed = fiber_S_aq_exact(diag, xd, aa, q);
            const auto direct = direct_fiber_S(diag, xd, aa, q);
            CHECK(std::abs(direct.imag()) < 1e-6);
            CHECK(direct.real() == doctest::Approx(static_cast<double>(collapsed)).epsilon(1e-9));
            if (ref < 0) ref = collapsed;
            CHECK(collapsed == ref);  // value does not depend on a

            const auto dg = direct_fiber_S(gen, xg, aa, q);
            CHECK(dg.real() ==
                  doctest::Approx(static_cast<double>(fiber_S_aq_exact(gen, xg, aa, q)))
                      .epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(fiber_S_aq_exact(diag, xd, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(fiber_S_aq_exact(diag, xd, 1, 0), std::invalid_argument);
}

TEST_CASE("truncated series: pinned values") {
    const auto f = TrilinearForm::diagonal(1);
    CHECK(fiber_series(f, {1, 1}, 1) == mpq_class(1));
    CHECK(fiber_series(f, {1, 1}, 2) == mpq_class(5, 4));
    CHECK(fiber_series(f, {1, 1}, 3) == mpq_class(53, 36));
    CHECK(fiber_series(f, {1, 1}, 4) == mpq_class(115, 72));
    // Imprimitive x sees denser congruences: at x = (2,2) every b works mod 2.
    CHECK(fiber_series(f, {2, 2}, 2) == mpq_class(2));
}

TEST_CASE("series terms are the normalized complete sums") {
    const auto f = random_generic_form(1, 2, 17);
    const IntVec x{1, 1};
    const int d = f.dim();
    mpq_class total = 0;
    for (Int q = 1; q <= 8; ++q) {
        mpz_class denom;
        mpz_ui_pow_ui(denom.get_mpz_t(), static_cast<unsigned long>(q),
                      static_cast<unsigned long>(2 * d));
        mpq_class term(mpz_class(static_cast<long>(euler_phi(q))) *
                           static_cast<long>(fiber_S_aq_exact(f, x, q == 1 ? 0 : 1, q)),
                       denom);
        term.canonicalize();
        total += term;
    }
    CHECK(total == fiber_series(f, x, 8));
}

TEST_CASE("degenerate points are rejected") {
    const auto f = TrilinearForm::diagonal(1);
    CHECK_THROWS_AS(fiber_series(f, {1, 0}, 4), std::domain_error);  // kernel dim 1 at lambda = n
    CHECK_THROWS_AS(fiber_series(f, {0, 0}, 4), std::domain_error);
    CHECK_THROWS_AS(fiber_J(f, {1, 0}), std::domain_error);
    CHECK_THROWS_AS(fiber_series(f, {1, 1, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(fiber_series(f, {1, 1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(fiber_series(f, {1, 1}, 4, 5), std::invalid_argument);
    // Relaxing lambda to n+1 admits the axis point and its series is finite.
    CHECK(fiber_series(f, {1, 0}, 2, 2) == mpq_class(3, 2));
}

TEST_CASE("slice route lands on the hand value at the diagonal") {
    // x = (1,1): integrand 2/max(|y0|,|y1|), and the integral over the square
    // is exactly 16.
    const auto f = TrilinearForm::diagonal(1);
    FiberJParams p;
    p.mc.samples = 200'000;
    const auto l = fiber_J(f, {1, 1}, ArchMethod::LerayFiber, p);
    CHECK(l.value > 15.0);
    CHECK(l.value < 17.0);
    CHECK(std::abs(l.value - 16.0) < 4.0 * l.stderr_ + 0.05);
    CHECK_THROWS_AS(fiber_J(f, {1, 1}, ArchMethod::Both, p), std::invalid_argument);
}

TEST_CASE("slice and oscillatory routes agree") {
    FiberJParams p;
    p.mc.samples = 200'000;
    p.phi = 16.0;
    for (std::uint64_t seed : {31u, 32u}) {
        const auto f = random_generic_form(1, 2, seed);
        const IntVec x{1, 1};
        const auto l = fiber_J(f, x, ArchMethod::LerayFiber, p);
        const auto s = fiber_J(f, x, ArchMethod::Sinc, p);
        CHECK(s.stderr_ > 0.0);
        CHECK(std::abs(l.value - s.value) <= 3.0 * (l.stderr_ + s.stderr_));
    }
}

TEST_CASE("fiber integral scales inversely with the point") {
    const auto f = TrilinearForm::diagonal(1);
    FiberJParams p;
    p.mc.samples = 50'000;
    const auto j1 = fiber_J(f, {1, 1}, ArchMethod::LerayFiber, p);
    const auto j2 = fiber_J(f, {2, 2}, ArchMethod::LerayFiber, p);
    // Same point set, pointwise-halved integrand: the ratio is exact.
    CHECK(j2.value == doctest::Approx(j1.value / 2.0).epsilon(1e-12));

    FiberJParams q = p;
    q.mc.seed = 7;
    const auto gen = random_generic_form(1, 2, 5);
    const auto a = fiber_J(gen, {1, 2}, ArchMethod::LerayFiber, p);
    const auto b = fiber_J(gen, {3, 6}, ArchMethod::LerayFiber, q);
    CHECK(std::abs(b.value - a.value / 3.0) <= 3.0 * (b.stderr_ + a.stderr_ / 3.0));
}

TEST_CASE("fiber counts assemble to the box count") {
    // Summing the per-point counts over admissible x must reproduce the
    // x-filtered box count exactly; both sides are exact enumerations.
    struct Case {
        TrilinearForm f;
        Int P1, P2, P3;
    };
    const std::vector<Case> cases = {
        {TrilinearForm::diagonal(1), 2, 2, 2},
        {random_generic_form(1, 2, 11), 1, 2, 2},
        {TrilinearForm::diagonal(2), 1, 1, 1},
    };
    for (const auto& c : cases) {
        long long total = 0;
        iterate_box(c.f.dim(), c.P1, [&](const IntVec& x) {
            if (!in_admissible(c.f, Slot::X, x, c.f.n())) return;
            total += count_N_x(c.f, x, c.P2, c.P3);
        });
        CHECK(total == count_box(c.f, c.P1, c.P2, c.P3, CountVariant::n1()).count);
    }
    CHECK(count_N_x(TrilinearForm::diagonal(1), {1, 1}, 2, 0) > 0);  // z = 0 on every section
    CHECK_THROWS_AS(count_N_x(TrilinearForm::diagonal(1), {1, 1}, -1, 2), std::invalid_argument);
}

TEST_CASE("prediction tracks the exact section count") {
    const auto f = TrilinearForm::diagonal(1);
    const IntVec x{1, 1};
    FiberJParams p;
    p.mc.samples = 400'000;
    for (Int P : {20, 40, 80}) {
        const auto exact = static_cast<double>(count_N_x(f, x, P, P));
        const double pred = fiber_predict(f, x, P, P, 12, p);
        const double ratio = exact / pred;
        // The series truncation at fixed Q leaves a slowly growing factor
        // unmatched at n = 1, so only coarse agreement is checked; the ratio
        // itself is recorded for inspection.
        MESSAGE("P=", P, " exact=", exact, " predicted=", pred, " ratio=", ratio);
        CHECK(ratio > 0.2);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("sums over a small box enumerate the admissible points") {
    FiberJParams p;
    p.mc.samples = 20'000;

    // Generic form: every nonzero x in the unit box has a nonsingular
    // contraction, so the sum has all 8 terms.
    const auto gen = random_generic_form(1, 3, 23);
    const auto rep = fiber_sum(gen, 1, 4, p);
    CHECK(rep.terms.size() == 8);
    double manual = 0.0;
    for (const auto& [x, term] : rep.terms) {
        CHECK(term == doctest::Approx(fiber_series(gen, x, 4).get_d() *
                                      fiber_J(gen, x, ArchMethod::LerayFiber, p).value)
                          .epsilon(1e-12));
        manual += term;
    }
    CHECK(rep.value == doctest::Approx(manual).epsilon(1e-9));

    // Diagonal form: the four axis points are degenerate and are skipped.
    const auto diag = fiber_sum(TrilinearForm::diagonal(1), 1, 4, p);
    CHECK(diag.terms.size() == 4);
    for (const auto& [x, term] : diag.terms) {
        CHECK(x[0] != 0);
        CHECK(x[1] != 0);
        CHECK(term > 0.0);
    }
    CHECK_THROWS_AS(fiber_sum(TrilinearForm::diagonal(1), 0, 4, p), std::invalid_argument);
}

TEST_CASE("density bundle carries both halves") {
    const auto f = TrilinearForm::diagonal(1);
    FiberJParams p;
    p.mc.samples = 50'000;
    const auto d = fiber_density(f, {1, 1}, 2, ArchMethod::LerayFiber, p);
    CHECK(d.series_trunc == mpq_class(5, 4));
    CHECK(d.Q == 2);
    CHECK(d.phi == 0.0);
    CHECK(d.J_x.value > 14.0);
    CHECK(d.J_x.value < 18.0);
    const auto s = fiber_density(f, {1, 1}, 2, ArchMethod::Sinc, p);
    CHECK(s.phi == 16.0);
}

}
