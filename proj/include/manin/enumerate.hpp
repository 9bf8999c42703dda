#pragma once

#include <map>
#include <string>
#include <vector>

#include "manin/arith.hpp"
#include "manin/form.hpp"

namespace manin {

// Which triples get counted. All keeps every solution of F = 0; the other
// tags add nondegeneracy and admissibility filters:
//   All      F(x,y,z) = 0 only
//   Nondeg3  adds B(x,y) != 0
//   N1       adds x admissible (kernel dim < lambda)
//   NPrime   adds x and y admissible, no z-side filter
//   U        adds z admissible plus B'(x,z) != 0 and B''(y,z) != 0
enum class CountTag { All, Nondeg3, N1, NPrime, U };

struct CountVariant {
    CountTag tag = CountTag::Nondeg3;
    int lambda = 0;  // 0 means "use n"; only read by N1 / NPrime / U

    static CountVariant all() { return {CountTag::All, 0}; }
    static CountVariant nondeg3() { return {CountTag::Nondeg3, 0}; }
    static CountVariant n1(int lambda = 0) { return {CountTag::N1, lambda}; }
    static CountVariant nprime(int lambda = 0) { return {CountTag::NPrime, lambda}; }
    static CountVariant u(int lambda = 0) { return {CountTag::U, lambda}; }
};

// Resolves the lambda default against the form dimension and validates the
// range 1..n+1. Returns 0 for tags that never consult lambda.
int effective_lambda(const CountVariant& v, int n);

// Label used in reports and CSV rows, e.g. "u:lambda=2".
std::string variant_label(const CountVariant& v, int n);

struct CountReport {
    std::string form_id;
    std::string variant;
    Int P1 = -1, P2 = -1, P3 = -1;  // -1 when the bound does not apply
    Int B = -1;
    long long count = 0;
    double seconds = 0.0;
};

// Number of z in [-P3, P3]^{n+1} with B(x,y) . z = 0, plus the z-side filters
// when the variant is U. Throws std::domain_error if B(x,y) is the zero
// vector (degenerate fiber; box counting handles those pairs separately).
long long count_fiber_z(const TrilinearForm& f, const IntVec& x, const IntVec& y, Int P3,
                        const CountVariant& variant);

// Solutions of F = 0 over the box [-P1,P1]^{n+1} x [-P2,P2]^{n+1} x
// [-P3,P3]^{n+1} under the variant's filters. Pairs with B(x,y) = 0 are
// dropped by every tag except All, which counts the full z slab for them.
CountReport count_box(const TrilinearForm& f, Int P1, Int P2, Int P3, const CountVariant& variant,
                      int threads = 1);

// Solutions with sup|x| * sup|y| * sup|z| <= B over nonzero vectors, grouped
// by sup-norm shells. primitive additionally requires gcd 1 in each block.
CountReport count_height(const TrilinearForm& f, Int B, bool primitive, const CountVariant& variant,
                         int threads = 1);

// Moebius-inverted primitive count: sum over k,l,m of mu(k)mu(l)mu(m) times
// the nonprimitive height count at floor(B/(klm)). Agrees with
// count_height(primitive=true) exactly.
long long moebius_primitive(const TrilinearForm& f, Int B, const CountVariant& variant,
                            int threads = 1);

// Shell count: triples with sup|x| = l1, sup|y| = l2, sup|z| = l3 exactly,
// under the variant's filters. Summing over l1 <= P1, l2 <= P2, l3 <= P3
// reproduces count_box.
long long h_function(const TrilinearForm& f, Int l1, Int l2, Int l3,
                     const CountVariant& variant = CountVariant::u(), int threads = 1);

// (1/8) * moebius_primitive(floor(B^{1/n})) with the U(lambda) filter: the
// anticanonical-height point count on the projective variety.
double scaled_projective_count(const TrilinearForm& f, double B, int lambda = 0, int threads = 1);

// Incremental shell-table engine behind the height counts. Scans each
// (l1, l2) shell pair once up to the largest z range requested so far and
// buckets fiber points by sup|z| and primitivity; height sums, Moebius sums
// and single-shell queries all read the same table.
class HeightCounter {
public:
    HeightCounter(TrilinearForm f, CountVariant variant, int threads = 1);

    // h on one shell (all l_i >= 1).
    long long shell(Int l1, Int l2, Int l3, bool primitive);
    // Sum over shells with l1*l2*l3 <= B.
    long long height_count(Int B, bool primitive);
    // The Moebius triple sum over nonprimitive height counts.
    long long moebius_sum(Int B);

    const TrilinearForm& form() const { return form_; }
    const CountVariant& variant() const { return variant_; }

private:
    struct PairBlock {
        Int covered = 0;                                 // z scanned for sup|z| <= covered
        std::vector<std::pair<long long, long long>> rows;  // l3 -> (count, primitive count)
    };

    // Small shells come from the cache; large ones are generated into buf so
    // the table's memory stays flat when bounds reach into the thousands.
    const std::vector<IntVec>& shell_source(Int l, std::vector<IntVec>& buf);
    void ensure_pair(Int l1, Int l2, Int l3max);

    TrilinearForm form_;
    CountVariant variant_;
    int lambda_;
    int threads_;
    std::map<Int, std::vector<IntVec>> shells_;           // half-space reps by sup-norm
    std::map<std::pair<Int, Int>, PairBlock> table_;
};

// Vectors in [-P, P]^d whose first nonzero coordinate is positive: one
// representative per antipodal pair of nonzero points.
std::vector<IntVec> half_space_points(int d, Int P);

// The boundary shell of the above: same half space, sup-norm exactly l.
// Generated directly, so the cost is the output size, not (2l+1)^d.
std::vector<IntVec> half_space_shell(int d, Int l);

// Points with sup-norm exactly l, and how many of them are primitive.
long long shell_point_count(int d, Int l);
long long shell_primitive_count(int d, Int l);

}  // namespace manin
