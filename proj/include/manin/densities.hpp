#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

#include "manin/arith.hpp"
#include "manin/expsums.hpp"
#include "manin/form.hpp"
#include "manin/qmc.hpp"

namespace manin {

// Solution density of F = 0 over Z/p^r, normalized so the sequence
// M(p^r)/p^{r(3n+2)} tends to the p-adic density.
struct LocalDensity {
    Int p = 2;
    std::vector<std::pair<int, mpq_class>> seq;  // (r, M(p^r)/p^{r(3n+2)})
    bool stabilized = false;                     // last two terms agree exactly
    mpq_class value;                             // last term
};

// Thrown when the residue loops would exceed the iteration budget; the
// terms computed so far ride along.
class SigmaPBudgetError : public BudgetError {
public:
    SigmaPBudgetError(const std::string& msg, LocalDensity partial)
        : BudgetError(msg), partial_(std::move(partial)) {}
    const LocalDensity& partial() const { return partial_; }

private:
    LocalDensity partial_;
};

// Default cap on pair-loop iterations p^{2r(n+1)} inside sigma_p.
inline constexpr long long kDefaultResidueBudget = 200'000'000;

LocalDensity sigma_p(const TrilinearForm& f, Int p, int r_max,
                     long long budget = kDefaultResidueBudget);

// Residue triples mod p^r with F = 0 mod p^r and none of x, y, z divisible
// by p as a vector. The z-count per pair is closed-form from the p-valuation
// of B(x,y).
long long N_star(const TrilinearForm& f, Int p, int r);

struct PrimitiveDensityRow {
    int r = 1;
    mpq_class primitive_ratio;  // N*(r) / p^{r(3n+2)}
    mpq_class target;           // (1 - p^{-n})^3 * M(p^r)/p^{r(3n+2)}
    mpq_class gap;              // |ratio - target|
};

struct PrimitiveDensityReport {
    Int p = 2;
    std::vector<PrimitiveDensityRow> rows;  // r = 1..r_max
    bool gaps_shrink = false;               // gap is nonincreasing in r
};

// Convergence of the primitive-point density toward (1 - p^{-n})^3 sigma_p;
// only the shrinking of the gap is asserted, not equality at finite r.
PrimitiveDensityReport check_primitive_density(const TrilinearForm& f, Int p, int r_max,
                                               long long budget = kDefaultResidueBudget);

enum class ArchMethod { LerayFiber, Sinc, Both };

struct ArchParams {
    QmcSpec mc{};
    double phi = 16.0;  // sinc cutoff
};

struct ArchDensity {
    McEstimate leray{};
    McEstimate sinc{};  // stderr includes the truncation term below
    double phi = 0.0;
    double sinc_tail = 0.0;  // |J(phi) - J(phi/2)|, the cutoff-doubling gain
    bool have_leray = false;
    bool have_sinc = false;
};

// Archimedean density by two independent routes. The Leray route integrates
// the exact fiber slice mass Vol(C_{x,y})/|B(x,y)|_2 over (x,y); the sinc
// route is the truncated singular integral J(phi), whose distance to the
// limit is dominated by the tail, so the reported uncertainty is
// sqrt(stderr^2 + tail^2) with the tail read off from the phi/2 companion
// estimate computed on the same points.
ArchDensity sigma_infinity(const TrilinearForm& f, ArchMethod method, const ArchParams& params = {});

// a(p) = (1 - 1/p)^3 (1 - p^{-n})^{-3}, the local factor relating the two
// Euler products.
mpq_class a_of_p(Int p, int n);

// tau_p = (1 - p^{-n})^3 sigma_p.
mpq_class tamagawa_p(const TrilinearForm& f, Int p, int r_max,
                     long long budget = kDefaultResidueBudget);

// tau_infinity = (n^3 / 8) sigma_infinity, with the estimator's uncertainty
// scaled along.
McEstimate tamagawa_inf(const TrilinearForm& f, ArchMethod method = ArchMethod::LerayFiber,
                        const ArchParams& params = {});

}  // namespace manin
