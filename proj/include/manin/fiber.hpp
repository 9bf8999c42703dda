#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

#include "manin/arith.hpp"
#include "manin/densities.hpp"
#include "manin/form.hpp"
#include "manin/qmc.hpp"

namespace manin {

// Per-point analogues of the global densities: fix x and study the family of
// hyperplane sections B(x,y) . z = 0 as y varies. Every routine below rejects
// x outside the admissible locus (fiber kernel dimension >= lambda), because
// both the congruence series and the archimedean integral blow up on the
// degenerate set. lambda = 0 selects the default lambda = n.

// Complete sum over (b, b') mod q of e((a/q) F(x, b, b')) for gcd(a, q) = 1.
// The b'-sum collapses, so the value is
//   q^{n+1} #{b mod q : B(x,b) = 0 mod q},
// a nonnegative integer independent of a.
long long fiber_S_aq_exact(const TrilinearForm& f, const IntVec& x, Int a, Int q);

// Truncated congruence series for the section at x:
//   sum_{q <= Q} phi(q) q^{-n-1} #{b mod q : B(x,b) = 0 mod q}.
// Exact rational. At small n the full series need not converge (the diagonal
// form at x = (1,..,1) has terms phi(q)/q^2), so Q is a genuine parameter of
// the quantity, not just a convergence cutoff.
mpq_class fiber_series(const TrilinearForm& f, const IntVec& x, Int Q, int lambda = 0);

struct FiberJParams {
    QmcSpec mc{};
    double phi = 16.0;  // truncation height for the oscillatory route
};

// Archimedean fiber density J_x = integral over y in [-1,1]^{n+1} of
// Vol(slice by B(x,y)) / |B(x,y)|. The slice route integrates
// 2^{n+1} f_{B(x,y)}(0) in the n+1 y-variables; the oscillatory route
// integrates sin(2 pi phi F(x,v,w)) / (pi F) in 2n+2 variables and folds the
// phi-truncation gap, measured against a phi/2 companion on shared points,
// into the reported standard error. Both is not a valid choice here.
McEstimate fiber_J(const TrilinearForm& f, const IntVec& x,
                   ArchMethod method = ArchMethod::LerayFiber, const FiberJParams& params = {},
                   int lambda = 0);

struct FiberDensity {
    IntVec x;
    mpq_class series_trunc;  // fiber_series at the given Q
    McEstimate J_x{};
    Int Q = 1;
    double phi = 0.0;
};

FiberDensity fiber_density(const TrilinearForm& f, const IntVec& x, Int Q,
                           ArchMethod method = ArchMethod::LerayFiber,
                           const FiberJParams& params = {}, int lambda = 0);

// Predicted number of pairs (y, z) with |y| <= P2, |z| <= P3 on the section
// at x: fiber_series(Q) * J_x * P2^n P3^n, with J_x taken from the slice
// route.
double fiber_predict(const TrilinearForm& f, const IntVec& x, Int P2, Int P3, Int Q = 12,
                     const FiberJParams& params = {}, int lambda = 0);

// Exact count of pairs (y, z) in the box with F(x,y,z) = 0 and B(x,y) != 0.
// Summed over the admissible x in a box this reproduces the x-filtered box
// count exactly.
long long count_N_x(const TrilinearForm& f, const IntVec& x, Int P2, Int P3);

struct FiberSumReport {
    Int P1 = 0;
    Int Q = 1;
    double value = 0.0;                            // sum of the terms
    std::vector<std::pair<IntVec, double>> terms;  // (x, series * J_x) per admissible x
};

// Sum of fiber densities over the admissible x with 0 < |x| <= P1. Inadmissible
// lattice points are skipped, not an error.
FiberSumReport fiber_sum(const TrilinearForm& f, Int P1, Int Q, const FiberJParams& params = {},
                         int lambda = 0);

}  // namespace manin
