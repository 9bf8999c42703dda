#pragma once

#include <gmpxx.h>

#include <complex>
#include <utility>
#include <vector>

#include "manin/arith.hpp"
#include "manin/enumerate.hpp"
#include "manin/form.hpp"
#include "manin/qmc.hpp"

namespace manin {

// Rational point a/q on the unit circle together with the arc scale: the
// major arc around a/q is { alpha : |q alpha - a| <= q P^(2 theta - 1) }.
// The proportionality constant in the arc width is taken to be 1.
struct ArcSpec {
    Int a = 0;
    Int q = 1;
    double theta = 0.05;
    double P = 100.0;
};

void validate_arc(const ArcSpec& spec);  // gcd(a,q)=1, 0 <= a < q, theta in (0,1), P > 1

bool in_major_arc(double alpha, const ArcSpec& spec);

// Quadrature request for the oscillatory integrals: low-discrepancy sampling
// by default, optionally a tensor Gauss-Legendre rule (only sensible for
// n = 1, where the domain is 6-dimensional).
struct QuadSpec {
    QmcSpec mc{};
    bool gauss = false;
    int gauss_nodes = 12;
};

// Exponential sum over the box [-P1,P1]^{n+1} x ... with the inner z-sum in
// closed form (a product of Dirichlet kernels), so cost is one pair loop.
// The variant picks the (x, y) pairs that participate; U is rejected since
// its z-side filters are incompatible with the closed-form inner sum.
std::complex<double> S_alpha(const TrilinearForm& f, double alpha, Int P1, Int P2, Int P3,
                             const CountVariant& variant = CountVariant::nondeg3());

// Complete exponential sum sum_{x,y,z mod q} e((a/q) F). The z-sum collapses
// to q^{n+1} times the count of pairs with B(x,y) = 0 mod q, so the value is
// a nonnegative integer independent of a.
long long S_aq_exact(const TrilinearForm& f, Int a, Int q);
std::complex<double> S_aq(const TrilinearForm& f, Int a, Int q);

// A(q) = phi(q) q^(-2n-2) #{(x,y) mod q : B(x,y) = 0 mod q}, the q-th term
// of the singular series. Exact rational; multiplicative in q.
mpq_class A_of_q(const TrilinearForm& f, Int q);

// M(q) = #{(x,y,z) mod q : F = 0 mod q}, via the linear-congruence count
// q^n gcd(q, B_0, ..., B_n) per pair.
long long M_of_q(const TrilinearForm& f, Int q);

// Oscillatory integral of cos(2 pi beta F) over [-1,1]^{3n+3}.
McEstimate I_beta_est(const TrilinearForm& f, double beta, const QuadSpec& quad = {});
double I_beta(const TrilinearForm& f, double beta, const QuadSpec& quad = {});

// Truncated singular integral J(phi) = integral of sin(2 pi phi F)/(pi F)
// over the box, the F = 0 value being 2 phi. Equals the |beta| <= phi slice
// of the I integral. Several phi values share one point set, so differences
// between them carry correlated (mostly cancelling) sampling error.
std::vector<McEstimate> J_of_phi_many(const TrilinearForm& f, const std::vector<double>& phis,
                                      const QuadSpec& quad = {});
double J_of_phi(const TrilinearForm& f, double phi, const QuadSpec& quad = {});

struct SeriesTruncation {
    Int Q = 1;
    std::vector<std::pair<Int, mpq_class>> terms;  // (q, A(q)) for q <= Q
    mpq_class partial;                             // sum of the terms
    double tail_estimate = 0.0;                    // |A(Q)| * Q, a scale hint, not a bound
};

SeriesTruncation singular_series_trunc(const TrilinearForm& f, Int Q);

// Pairs in the box whose contraction components all sit within Hinv of an
// integer after scaling by alpha. kind B pairs (x,y), Bprime (x,z),
// Bsecond (y,z).
long long count_M(const TrilinearForm& f, BilinearKind kind, double alpha, Int Ha, Int Hb,
                  double Hinv);
long long count_M3(const TrilinearForm& f, double alpha, Int H1, Int H2, double Hinv);

}  // namespace manin
