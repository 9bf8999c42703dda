#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "manin/enumerate.hpp"
#include "manin/lattice.hpp"

using namespace manin;

namespace {

// Definition-chasing oracles: full boxes, no symmetry or hyperplane solving.

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

bool oracle_keeps(const TrilinearForm& f, const CountVariant& v, const IntVec& x, const IntVec& y,
                  const IntVec& z) {
    if (eval_form(f, x, y, z) != 0) return false;
    if (v.tag == CountTag::All) return true;
    if (contract(f, BilinearKind::B, x, y).is_zero()) return false;
    if (v.tag == CountTag::Nondeg3) return true;
    const int lambda = effective_lambda(v, f.n());
    if (!in_admissible(f, Slot::X, x, lambda)) return false;
    if (v.tag == CountTag::N1) return true;
    if (!in_admissible(f, Slot::Y, y, lambda)) return false;
    if (v.tag == CountTag::NPrime) return true;
    if (!in_admissible(f, Slot::Z, z, lambda)) return false;
    if (contract(f, BilinearKind::Bprime, x, z).is_zero()) return false;
    return !contract(f, BilinearKind::Bsecond, y, z).is_zero();
}

long long naive_box(const TrilinearForm& f, Int P1, Int P2, Int P3, const CountVariant& v) {
    long long total = 0;
    iterate_box(f.dim(), P1, [&](const IntVec& x) {
        iterate_box(f.dim(), P2, [&](const IntVec& y) {
            iterate_box(f.dim(), P3, [&](const IntVec& z) {
                if (oracle_keeps(f, v, x, y, z)) ++total;
            });
        });
    });
    return total;
}

long long naive_height(const TrilinearForm& f, Int B, bool primitive, const CountVariant& v) {
    long long total = 0;
    iterate_box(f.dim(), B, [&](const IntVec& x) {
        const Int l1 = max_abs(x);
        if (l1 == 0 || l1 > B) return;
        if (primitive && gcd_vec(x) != 1) return;
        iterate_box(f.dim(), B / l1, [&](const IntVec& y) {
            const Int l2 = max_abs(y);
            if (l2 == 0 || l1 * l2 > B) return;
            if (primitive && gcd_vec(y) != 1) return;
            iterate_box(f.dim(), B / (l1 * l2), [&](const IntVec& z) {
                const Int l3 = max_abs(z);
                if (l3 == 0 || l1 * l2 * l3 > B) return;
                if (primitive && gcd_vec(z) != 1) return;
                if (oracle_keeps(f, v, x, y, z)) ++total;
            });
        });
    });
    return total;
}

const std::vector<CountVariant> kAllVariants = {
    CountVariant::all(), CountVariant::nondeg3(), CountVariant::n1(), CountVariant::nprime(),
    CountVariant::u()};

}  // namespace

TEST_SUITE_BEGIN("enumerate");

TEST_CASE("half-space representatives cover the box by antipodes") {
    const auto reps = half_space_points(2, 2);
    CHECK(reps.size() == (25 - 1) / 2);
    std::set<IntVec> seen;
    for (const auto& v : reps) {
        seen.insert(v);
        IntVec neg(v.size());
        std::transform(v.begin(), v.end(), neg.begin(), std::negate<Int>());
        CHECK(!seen.count(neg));  // never both signs
        seen.insert(neg);
    }
    CHECK(seen.size() == 24);  // every nonzero point reached exactly once

    CHECK(half_space_points(3, 1).size() == (27 - 1) / 2);
    CHECK(half_space_points(2, 0).empty());
}

TEST_CASE("direct shell generation matches the filtered box") {
    for (int d = 1; d <= 4; ++d)
        for (Int l = 0; l <= 4; ++l) {
            std::vector<IntVec> filtered;
            for (auto& v : half_space_points(d, l))
                if (max_abs(v) == l) filtered.push_back(std::move(v));
            CHECK(half_space_shell(d, l) == filtered);  // same points, same order
            if (l >= 1) {
                CHECK(2 * static_cast<long long>(half_space_shell(d, l).size()) ==
                      shell_point_count(d, l));
            }
        }
    CHECK(half_space_shell(2, 0).empty());
    CHECK(half_space_shell(1, 3) == std::vector<IntVec>{{3}});
}

TEST_CASE("shell sizes and primitive shell sizes") {
    CHECK(shell_point_count(2, 0) == 1);
    CHECK(shell_point_count(2, 1) == 8);
    CHECK(shell_point_count(2, 2) == 16);
    CHECK(shell_point_count(3, 1) == 26);

    // brute-force gcd filter as the oracle
    for (int d = 2; d <= 3; ++d)
        for (Int l = 1; l <= 6; ++l) {
            long long cnt = 0, prim = 0;
            iterate_box(d, l, [&](const IntVec& v) {
                if (max_abs(v) != l) return;
                ++cnt;
                if (gcd_vec(v) == 1) ++prim;
            });
            CHECK(shell_point_count(d, l) == cnt);
            CHECK(shell_primitive_count(d, l) == prim);
        }
}

TEST_CASE("fiber counts on pinned lines") {
    const auto f = TrilinearForm::diagonal(1);
    // B((1,1),(1,1)) = (1,1): the antidiagonal z0 = -z1.
    CHECK(count_fiber_z(f, {1, 1}, {1, 1}, 5, CountVariant::all()) == 11);
    // B((0,1),(1,1)) = (0,1): z1 = 0, z0 free.
    CHECK(count_fiber_z(f, {0, 1}, {1, 1}, 7, CountVariant::all()) == 15);
    CHECK_THROWS_AS(count_fiber_z(f, {1, 0}, {0, 1}, 5, CountVariant::all()), std::domain_error);
    CHECK_THROWS_AS(count_fiber_z(f, {0, 0}, {1, 1}, 5, CountVariant::all()), std::domain_error);
}

TEST_CASE("fiber counts agree with the direct dot-product scan") {
    std::mt19937_64 gen(21);
    for (int n = 1; n <= 2; ++n) {
        const auto f = random_generic_form(n, 3, 500 + n);
        for (int t = 0; t < 12; ++t) {
            IntVec x(f.dim()), y(f.dim());
            BilinearVector b;
            do {
                for (auto& c : x) c = static_cast<Int>(gen() % 7) - 3;
                for (auto& c : y) c = static_cast<Int>(gen() % 7) - 3;
                b = contract(f, BilinearKind::B, x, y);
            } while (b.is_zero());
            const Int P3 = n == 1 ? 20 : 8;

            for (const auto& v : {CountVariant::all(), CountVariant::u()}) {
                long long naive = 0;
                iterate_box(f.dim(), P3, [&](const IntVec& z) {
                    i128 dot = 0;
                    for (int k = 0; k < f.dim(); ++k)
                        dot += static_cast<i128>(b.values[k]) * z[k];
                    if (dot != 0) return;
                    if (v.tag == CountTag::U) {
                        if (!in_admissible(f, Slot::Z, z, effective_lambda(v, n))) return;
                        if (contract(f, BilinearKind::Bprime, x, z).is_zero()) return;
                        if (contract(f, BilinearKind::Bsecond, y, z).is_zero()) return;
                    }
                    ++naive;
                });
                CHECK(count_fiber_z(f, x, y, P3, v) == naive);
            }
            // plain variant also matches the lattice module's counter
            CHECK(count_fiber_z(f, x, y, P3, CountVariant::nondeg3()) ==
                  count_hyperplane_points(b.values, P3));
        }
    }
}

TEST_CASE("box counts match the exhaustive triple loop") {
    const auto diag = TrilinearForm::diagonal(1);
    CHECK(count_box(diag, 1, 1, 1, CountVariant::nondeg3()).count ==
          naive_box(diag, 1, 1, 1, CountVariant::nondeg3()));

    std::mt19937_64 gen(22);
    for (int t = 0; t < 4; ++t) {
        const auto f = random_generic_form(1, 4, 600 + t);
        const Int P1 = 1 + static_cast<Int>(gen() % 3);
        const Int P2 = 1 + static_cast<Int>(gen() % 3);
        const Int P3 = 1 + static_cast<Int>(gen() % 3);
        for (const auto& v : kAllVariants)
            CHECK(count_box(f, P1, P2, P3, v).count == naive_box(f, P1, P2, P3, v));
    }

    const auto f2 = random_generic_form(2, 2, 640);
    for (const auto& v : kAllVariants)
        CHECK(count_box(f2, 1, 1, 1, v).count == naive_box(f2, 1, 1, 1, v));
}

TEST_CASE("box counts: degenerate bounds") {
    const auto f = TrilinearForm::diagonal(1);
    // P3 = 0 keeps exactly z = 0, which always solves, so the count is the
    // number of surviving (x, y) pairs.
    long long pairs = 0;
    iterate_box(2, 2, [&](const IntVec& x) {
        iterate_box(2, 3, [&](const IntVec& y) {
            if (!contract(f, BilinearKind::B, x, y).is_zero()) ++pairs;
        });
    });
    CHECK(count_box(f, 2, 3, 0, CountVariant::nondeg3()).count == pairs);

    CHECK(count_box(f, 0, 3, 3, CountVariant::nondeg3()).count == 0);
    CHECK(count_box(f, 3, 0, 3, CountVariant::nondeg3()).count == 0);
    // under All, x = 0 keeps the whole y and z slabs
    CHECK(count_box(f, 0, 1, 1, CountVariant::all()).count == 9 * 9);
    CHECK_THROWS_AS(count_box(f, -1, 1, 1, CountVariant::all()), std::invalid_argument);
}

TEST_CASE("variant nesting and sign symmetry") {
    std::mt19937_64 gen(23);
    const auto f = random_generic_form(1, 4, 700);
    long long prev = -1;
    // All >= Nondeg3 >= N1 >= NPrime >= U at equal bounds
    for (const auto& v : kAllVariants) {
        const long long c = count_box(f, 2, 2, 2, v).count;
        if (prev >= 0) CHECK(c <= prev);
        prev = c;
    }

    for (int t = 0; t < 20; ++t) {
        IntVec x(2), y(2);
        BilinearVector b;
        do {
            for (auto& c : x) c = static_cast<Int>(gen() % 9) - 4;
            for (auto& c : y) c = static_cast<Int>(gen() % 9) - 4;
            b = contract(f, BilinearKind::B, x, y);
        } while (b.is_zero());
        IntVec mx(2), my(2);
        std::transform(x.begin(), x.end(), mx.begin(), std::negate<Int>());
        std::transform(y.begin(), y.end(), my.begin(), std::negate<Int>());
        const auto u = CountVariant::u();
        const long long c = count_fiber_z(f, x, y, 6, u);
        CHECK(count_fiber_z(f, mx, y, 6, u) == c);
        CHECK(count_fiber_z(f, x, my, 6, u) == c);
        CHECK(count_fiber_z(f, mx, my, 6, u) == c);
    }
}

TEST_CASE("lambda handling") {
    CHECK(effective_lambda(CountVariant::u(), 2) == 2);       // default is n
    CHECK(effective_lambda(CountVariant::u(3), 2) == 3);      // n+1 allowed
    CHECK(effective_lambda(CountVariant::all(), 2) == 0);     // unused
    CHECK_THROWS_AS(effective_lambda(CountVariant::u(4), 2), std::invalid_argument);
    CHECK(variant_label(CountVariant::u(), 1) == "u:lambda=1");
    CHECK(variant_label(CountVariant::nondeg3(), 1) == "nondeg3");

    // Larger lambda keeps more points.
    const auto f = random_generic_form(2, 3, 710);
    const long long c1 = count_box(f, 1, 1, 1, CountVariant::u(1)).count;
    const long long c3 = count_box(f, 1, 1, 1, CountVariant::u(3)).count;
    CHECK(c1 <= c3);
}

TEST_CASE("shell telescoping against box counts") {
    const auto f = random_generic_form(1, 3, 720);
    for (const auto& v : {CountVariant::u(), CountVariant::u(2)}) {
        HeightCounter hc(f, v);
        long long sum = 0;
        for (Int l1 = 1; l1 <= 2; ++l1)
            for (Int l2 = 1; l2 <= 2; ++l2)
                for (Int l3 = 1; l3 <= 2; ++l3) sum += hc.shell(l1, l2, l3, false);
        CHECK(sum == count_box(f, 2, 2, 2, v).count);
    }

    // Nondeg3 boxes additionally hold the z = 0 fibers, which live in the
    // l3 = 0 shells.
    HeightCounter hc(f, CountVariant::nondeg3());
    long long sum = 0;
    for (Int l1 = 1; l1 <= 2; ++l1)
        for (Int l2 = 1; l2 <= 2; ++l2) {
            sum += h_function(f, l1, l2, 0, CountVariant::nondeg3());
            for (Int l3 = 1; l3 <= 2; ++l3) sum += hc.shell(l1, l2, l3, false);
        }
    CHECK(sum == count_box(f, 2, 2, 2, CountVariant::nondeg3()).count);
}

TEST_CASE("h on zero shells") {
    const auto f = TrilinearForm::diagonal(1);
    CHECK(h_function(f, 0, 1, 1) == 0);  // default variant U
    CHECK(h_function(f, 1, 0, 1) == 0);
    CHECK(h_function(f, 1, 1, 0) == 0);
    // All with x = 0: every (y, z) in the shells solves F = 0.
    CHECK(h_function(f, 0, 1, 2, CountVariant::all()) == 8 * 16);
    CHECK(h_function(f, 2, 1, 0, CountVariant::all()) == 16 * 8);

    // diagonal n=1 h(1,1,1) under U, by hand: exhaustive loop
    long long direct = 0;
    iterate_box(2, 1, [&](const IntVec& x) {
        if (max_abs(x) != 1) return;
        iterate_box(2, 1, [&](const IntVec& y) {
            if (max_abs(y) != 1) return;
            iterate_box(2, 1, [&](const IntVec& z) {
                if (max_abs(z) != 1) return;
                if (oracle_keeps(f, CountVariant::u(), x, y, z)) ++direct;
            });
        });
    });
    CHECK(h_function(f, 1, 1, 1) == direct);
}

TEST_CASE("height counts match the exhaustive oracle") {
    const auto diag = TrilinearForm::diagonal(1);
    for (Int B : {1, 2, 4, 6}) {
        CHECK(count_height(diag, B, false, CountVariant::u()).count ==
              naive_height(diag, B, false, CountVariant::u()));
        CHECK(count_height(diag, B, true, CountVariant::u()).count ==
              naive_height(diag, B, true, CountVariant::u()));
    }
    // B = 1: entries in {-1,0,1}, every nonzero vector is primitive.
    const auto f = random_generic_form(1, 4, 730);
    CHECK(count_height(f, 1, true, CountVariant::u()).count ==
          count_height(f, 1, false, CountVariant::u()).count);
    // monotone in B
    CHECK(count_height(diag, 10, false, CountVariant::u()).count <=
          count_height(diag, 20, false, CountVariant::u()).count);

    // other variants, one small sweep
    for (const auto& v : {CountVariant::nondeg3(), CountVariant::nprime()})
        CHECK(count_height(f, 3, false, v).count == naive_height(f, 3, false, v));
}

TEST_CASE("moebius inversion reproduces the primitive count") {
    const auto diag = TrilinearForm::diagonal(1);
    CHECK(moebius_primitive(diag, 1, CountVariant::u()) ==
          count_height(diag, 1, false, CountVariant::u()).count);
    CHECK(moebius_primitive(diag, 12, CountVariant::u()) ==
          count_height(diag, 12, true, CountVariant::u()).count);
    CHECK(moebius_primitive(diag, 30, CountVariant::u()) ==
          count_height(diag, 30, true, CountVariant::u()).count);

    for (int t = 0; t < 5; ++t) {
        const auto f = random_generic_form(1, 3, 740 + t);
        HeightCounter hc(f, CountVariant::u());
        CHECK(hc.moebius_sum(10) == hc.height_count(10, true));
    }
    const auto f2 = random_generic_form(2, 2, 750);
    HeightCounter hc2(f2, CountVariant::u());
    CHECK(hc2.moebius_sum(6) == hc2.height_count(6, true));
}

TEST_CASE("projective rescaling of the primitive count") {
    const auto diag = TrilinearForm::diagonal(1);
    const double direct = static_cast<double>(moebius_primitive(diag, 9, CountVariant::u()));
    CHECK(scaled_projective_count(diag, 9.0) == direct / 8.0);
    CHECK(scaled_projective_count(diag, 9.9) == direct / 8.0);  // floor(9.9) = 9

    const auto f2 = TrilinearForm::diagonal(2);
    const double d2 = static_cast<double>(moebius_primitive(f2, 3, CountVariant::u()));
    CHECK(scaled_projective_count(f2, 9.0) == d2 / 8.0);  // floor(9^(1/2)) = 3
    CHECK_THROWS_AS(scaled_projective_count(diag, 0.5), std::invalid_argument);
}

TEST_CASE("threaded counts are identical to serial ones") {
    const auto f = random_generic_form(1, 4, 760);
    const auto v = CountVariant::u();
    CHECK(count_box(f, 3, 3, 3, v, 1).count == count_box(f, 3, 3, 3, v, 4).count);
    CHECK(count_height(f, 8, true, v, 1).count == count_height(f, 8, true, v, 4).count);

    const auto rep = count_box(f, 2, 2, 2, v, 2);
    CHECK(rep.form_id == f.id());
    CHECK(rep.variant == "u:lambda=1");
    CHECK(rep.P1 == 2);
    CHECK(rep.B == -1);
    CHECK(rep.seconds >= 0.0);
}

TEST_SUITE_END();
