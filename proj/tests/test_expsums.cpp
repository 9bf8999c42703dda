#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "doctest.h"
#include "manin/enumerate.hpp"
#include "manin/expsums.hpp"

using namespace manin;

namespace {

constexpr double kTau = 6.28318530717958647692;

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

bool pair_survives(const TrilinearForm& f, const CountVariant& v, const IntVec& x,
                   const IntVec& y) {
    if (v.tag == CountTag::All) return true;
    if (contract(f, BilinearKind::B, x, y).is_zero()) return false;
    if (v.tag == CountTag::Nondeg3) return true;
    const int lambda = effective_lambda(v, f.n());
    if (!in_admissible(f, Slot::X, x, lambda)) return false;
    if (v.tag == CountTag::N1) return true;
    return in_admissible(f, Slot::Y, y, lambda);
}

// Definition-level oracle: full triple box, complex exponentials.
std::complex<double> direct_S(const TrilinearForm& f, double alpha, Int P1, Int P2, Int P3,
                              const CountVariant& v) {
    std::complex<double> total = 0.0;
    iterate_box(f.dim(), P1, [&](const IntVec& x) {
        iterate_box(f.dim(), P2, [&](const IntVec& y) {
            if (!pair_survives(f, v, x, y)) return;
            iterate_box(f.dim(), P3, [&](const IntVec& z) {
                const double F = static_cast<double>(eval_form(f, x, y, z));
                total += std::polar(1.0, kTau * alpha * F);
            });
        });
    });
    return total;
}

std::complex<double> direct_S_aq(const TrilinearForm& f, Int a, Int q) {
    std::complex<double> total = 0.0;
    const int d = f.dim();
    IntVec x(d, 0), y(d, 0), z(d, 0);
    auto next = [&](IntVec& v) {
        for (auto& c : v) {
            if (++c < q) return true;
            c = 0;
        }
        return false;
    };
    do {
        do {
            std::fill(z.begin(), z.end(), 0);
            do {
                const double F = static_cast<double>(eval_form(f, x, y, z));
                total += std::polar(1.0, kTau * static_cast<double>(a) * F / q);
            } while (next(z));
        } while (next(y));
    } while (next(x));
    return total;
}

long long direct_M(const TrilinearForm& f, Int q) {
    long long cnt = 0;
    const int d = f.dim();
    IntVec x(d, 0), y(d, 0), z(d, 0);
    auto next = [&](IntVec& v) {
        for (auto& c : v) {
            if (++c < q) return true;
            c = 0;
        }
        return false;
    };
    do {
        do {
            std::fill(z.begin(), z.end(), 0);
            do {
                if (mod_pos(eval_form(f, x, y, z), q) == 0) ++cnt;
            } while (next(z));
        } while (next(y));
    } while (next(x));
    return cnt;
}

}  // namespace

TEST_SUITE_BEGIN("expsums");

TEST_CASE("major arc membership") {
    ArcSpec arc{1, 3, 0.05, 1000.0};
    CHECK(in_major_arc(1.0 / 3.0, arc));
    // width is 3 * 1000^(-0.9) / 3 ~ 1/501; step outside it
    CHECK(!in_major_arc(1.0 / 3.0 + 0.01, arc));
    CHECK(in_major_arc(1.0 / 3.0 + 0.5 * std::pow(1000.0, -0.9), arc));

    CHECK_THROWS_AS(in_major_arc(0.5, ArcSpec{2, 4, 0.05, 10.0}), std::invalid_argument);
    CHECK_THROWS_AS(in_major_arc(0.5, ArcSpec{1, 2, 0.0, 10.0}), std::invalid_argument);
    CHECK_THROWS_AS(in_major_arc(0.5, ArcSpec{1, 2, 0.05, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(in_major_arc(0.5, ArcSpec{3, 2, 0.05, 10.0}), std::invalid_argument);
}

TEST_CASE("exponential sum at alpha = 0 and periodicity") {
    const auto f = TrilinearForm::diagonal(1);
    long long pairs = 0;
    iterate_box(2, 2, [&](const IntVec& x) {
        iterate_box(2, 2, [&](const IntVec& y) {
            if (!contract(f, BilinearKind::B, x, y).is_zero()) ++pairs;
        });
    });
    const auto s0 = S_alpha(f, 0.0, 2, 2, 2);
    CHECK(s0.real() == doctest::Approx(static_cast<double>(pairs) * 25.0));  // (2*2+1)^{n+1}
    CHECK(s0.imag() == 0.0);

    const auto s1 = S_alpha(f, 1.0, 2, 2, 2);
    CHECK(s1.real() == doctest::Approx(s0.real()).epsilon(1e-9));

    std::mt19937_64 gen(31);
    for (int t = 0; t < 5; ++t) {
        const double alpha = std::ldexp(static_cast<double>(gen() >> 11), -53);
        const auto a = S_alpha(f, alpha, 2, 2, 2);
        const auto b = S_alpha(f, alpha + 1.0, 2, 2, 2);
        CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-9));
    }
}

TEST_CASE("exponential sum matches the direct triple summation") {
    const auto diag = TrilinearForm::diagonal(1);
    const auto d05 = direct_S(diag, 0.5, 1, 1, 1, CountVariant::nondeg3());
    CHECK(S_alpha(diag, 0.5, 1, 1, 1).real() == doctest::Approx(d05.real()).epsilon(1e-9));
    CHECK(std::abs(d05.imag()) < 1e-9);

    std::mt19937_64 gen(32);
    for (int t = 0; t < 3; ++t) {
        const auto f = random_generic_form(1, 3, 800 + t);
        const double alpha = 0.05 + 0.9 * std::ldexp(static_cast<double>(gen() >> 11), -53);
        for (const auto& v : {CountVariant::all(), CountVariant::nondeg3(), CountVariant::n1(),
                              CountVariant::nprime()}) {
            const auto direct = direct_S(f, alpha, 1, 2, 1, v);
            const auto fast = S_alpha(f, alpha, 1, 2, 1, v);
            CHECK(fast.real() == doctest::Approx(direct.real()).epsilon(1e-8));
            CHECK(std::abs(direct.imag()) < 1e-8);
        }
    }
    CHECK_THROWS_AS(S_alpha(diag, 0.3, 1, 1, 1, CountVariant::u()), std::invalid_argument);
}

TEST_CASE("complete sums: residue reduction equals the definition") {
    const auto diag = TrilinearForm::diagonal(1);
    CHECK(S_aq_exact(diag, 0, 1) == 1);
    for (Int q = 2; q <= 8; ++q) {
        for (Int a = 1; a < q; ++a) {
            if (std::gcd(static_cast<long long>(a), static_cast<long long>(q)) != 1) continue;
            const auto direct = direct_S_aq(diag, a, q);
            CHECK(static_cast<double>(S_aq_exact(diag, a, q)) ==
                  doctest::Approx(direct.real()).epsilon(1e-9));
            CHECK(std::abs(direct.imag()) < 1e-6);
        }
    }
    const auto f = random_generic_form(1, 3, 810);
    CHECK(S_aq_exact(f, 1, 5) == S_aq_exact(f, 2, 5));  // a-independence
    CHECK(S_aq_exact(f, 1, 6) == S_aq_exact(f, 5, 6));
    CHECK_THROWS_AS(S_aq_exact(f, 2, 4), std::invalid_argument);
    CHECK(S_aq(f, 1, 3).imag() == 0.0);
}

TEST_CASE("series terms: pinned values and multiplicativity") {
    const auto diag = TrilinearForm::diagonal(1);
    CHECK(A_of_q(diag, 1) == mpq_class(1));
    CHECK(A_of_q(diag, 2) == mpq_class(9, 16));
    CHECK(A_of_q(diag, 6) == A_of_q(diag, 2) * A_of_q(diag, 3));

    for (int t = 0; t < 5; ++t) {
        const auto f = random_generic_form(1, 3, 820 + t);
        for (auto [q1, q2] : {std::pair<Int, Int>{2, 3}, {3, 4}, {4, 5}, {2, 5}}) {
            const mpq_class lhs = A_of_q(f, q1 * q2);
            const mpq_class rhs = A_of_q(f, q1) * A_of_q(f, q2);
            CHECK(lhs == rhs);
        }
    }

    // A(q) against the phi(q)/q^{3n+3} multiple of the complete sum
    const auto f = random_generic_form(1, 4, 830);
    for (Int q : {2, 3, 4, 5}) {
        mpz_class qpow = 1;
        for (int e = 0; e < 6; ++e) qpow *= q;
        mpq_class viaS(mpz_class(euler_phi(q)) * static_cast<long>(S_aq_exact(f, 1, q)), qpow);
        viaS.canonicalize();
        CHECK(A_of_q(f, q) == viaS);
    }
}

TEST_CASE("solution counts mod q and the partial-sum law") {
    const auto diag1 = TrilinearForm::diagonal(1);
    CHECK(M_of_q(diag1, 1) == 1);
    CHECK(M_of_q(diag1, 2) == 50);
    for (Int q : {2, 3, 4}) CHECK(M_of_q(diag1, q) == direct_M(diag1, q));

    const auto f2 = random_generic_form(2, 2, 840);
    for (Int q : {2, 3}) CHECK(M_of_q(f2, q) == direct_M(f2, q));

    // sum_{k<=N} A(p^k) = M(p^N) / p^{N(3n+2)}
    const auto check_law = [](const TrilinearForm& f, Int p, int N) {
        mpq_class lhs = 0;
        Int pk = 1;
        for (int k = 0; k <= N; ++k) {
            lhs += A_of_q(f, pk);
            pk *= p;
        }
        mpz_class denom = 1;
        for (int e = 0; e < N * (3 * f.n() + 2); ++e) denom *= p;
        mpq_class rhs(mpz_class(static_cast<long>(M_of_q(f, pk / p))), denom);
        rhs.canonicalize();
        CHECK(lhs == rhs);
    };
    for (Int p : {2, 3})
        for (int N = 1; N <= 2; ++N) check_law(diag1, p, N);
    const auto f1 = random_generic_form(1, 3, 850);
    check_law(f1, 2, 2);
    check_law(f1, 3, 1);
    check_law(f2, 2, 2);
}

TEST_CASE("unit-interval average of S recovers the box count") {
    // S is a trigonometric polynomial with integer frequencies well inside
    // the grid order, so the trapezoid average is exact up to rounding.
    const auto diag = TrilinearForm::diagonal(1);
    const long long boxed = count_box(diag, 2, 2, 2, CountVariant::nondeg3()).count;
    const int K = 256;
    CompensatedSum avg;
    for (int j = 0; j < K; ++j)
        avg.add(S_alpha(diag, static_cast<double>(j) / K, 2, 2, 2).real());
    CHECK(avg.value() / K == doctest::Approx(static_cast<double>(boxed)).epsilon(1e-10));

    const auto f = random_generic_form(1, 3, 860);
    const long long boxed2 = count_box(f, 1, 2, 1, CountVariant::nondeg3()).count;
    CompensatedSum avg2;
    for (int j = 0; j < K; ++j)
        avg2.add(S_alpha(f, static_cast<double>(j) / K, 1, 2, 1).real());
    CHECK(std::abs(avg2.value() / K - static_cast<double>(boxed2)) < 0.5);
}

TEST_CASE("oscillatory integral: exact anchors and route agreement") {
    const auto f = TrilinearForm::diagonal(1);
    QuadSpec qmc;
    qmc.mc.samples = 100000;
    qmc.mc.seed = 7;
    CHECK(I_beta(f, 0.0, qmc) == doctest::Approx(64.0).epsilon(1e-12));
    McEstimate plus = I_beta_est(f, 0.3, qmc), minus = I_beta_est(f, -0.3, qmc);
    CHECK(plus.value == minus.value);  // cosine kernel is even in beta
    CHECK(plus.stderr_ > 0.0);

    QuadSpec gauss;
    gauss.gauss = true;
    gauss.gauss_nodes = 14;
    CHECK(I_beta(f, 0.0, gauss) == doctest::Approx(64.0).epsilon(1e-12));
    const double g = I_beta(f, 0.3, gauss);
    CHECK(std::abs(g - plus.value) <= 5.0 * plus.stderr_ + 1e-3);
}

TEST_CASE("truncated singular integral grows toward its limit like 1/phi") {
    const auto f = TrilinearForm::diagonal(1);
    QuadSpec quad;
    quad.mc.samples = 200000;
    quad.mc.seed = 11;
    const auto est = J_of_phi_many(f, {4.0, 8.0, 16.0}, quad);
    const double d1 = est[1].value - est[0].value;
    const double d2 = est[2].value - est[1].value;
    CHECK(d1 > 0.0);
    CHECK(d2 > 0.0);
    // a c/phi tail makes consecutive octave gains halve
    CHECK(d2 / d1 > 0.25);
    CHECK(d2 / d1 < 0.75);
    CHECK(est[2].value > 160.0);
    CHECK(est[2].value < 185.0);
    CHECK(J_of_phi(f, 4.0, quad) == est[0].value);
}

TEST_CASE("singular series truncations") {
    const auto diag = TrilinearForm::diagonal(1);
    const auto t1 = singular_series_trunc(diag, 1);
    CHECK(t1.partial == mpq_class(1));
    CHECK(t1.terms.size() == 1);

    const auto t2 = singular_series_trunc(diag, 2);
    CHECK(t2.partial == mpq_class(25, 16));
    CHECK(t2.tail_estimate == doctest::Approx(2.0 * 9.0 / 16.0));

    const auto t6 = singular_series_trunc(diag, 6);
    mpq_class resum = 0;
    for (const auto& [q, a] : t6.terms) resum += a;
    CHECK(resum == t6.partial);
    CHECK(t6.terms[0].second == mpq_class(1));
}

TEST_CASE("pair counts near rational points") {
    const auto f = TrilinearForm::diagonal(1);
    CHECK(count_M3(f, 0.0, 2, 3, 0.1) == 25LL * 49LL);
    CHECK(count_M3(f, 0.77, 2, 2, 0.5) == 25LL * 25LL);  // every distance is <= 1/2

    // direct oracle at alpha = 1/3
    const double alpha = 1.0 / 3.0;
    long long direct = 0;
    iterate_box(2, 2, [&](const IntVec& x) {
        iterate_box(2, 2, [&](const IntVec& y) {
            const auto b = contract(f, BilinearKind::B, x, y);
            bool ok = true;
            for (Int c : b.values) {
                const double t = alpha * static_cast<double>(c);
                if (std::abs(t - std::nearbyint(t)) > 0.2) ok = false;
            }
            if (ok) ++direct;
        });
    });
    CHECK(count_M3(f, alpha, 2, 2, 0.2) == direct);

    // the other two contraction kinds against the same oracle shape
    const auto g = random_generic_form(1, 3, 870);
    for (auto kind : {BilinearKind::Bprime, BilinearKind::Bsecond}) {
        long long d2 = 0;
        iterate_box(2, 2, [&](const IntVec& u) {
            iterate_box(2, 1, [&](const IntVec& v) {
                const auto b = contract(g, kind, u, v);
                bool ok = true;
                for (Int c : b.values) {
                    const double t = 0.41 * static_cast<double>(c);
                    if (std::abs(t - std::nearbyint(t)) > 0.15) ok = false;
                }
                if (ok) ++d2;
            });
        });
        CHECK(count_M(g, kind, 0.41, 2, 1, 0.15) == d2);
    }
}

TEST_SUITE_END();
