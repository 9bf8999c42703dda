#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manin/arith.hpp"

namespace manin {

// Which bilinear family a contraction produces:
//   B       pairs (x, y), components indexed by the z-index k
//   Bprime  pairs (x, z), components indexed by the y-index j
//   Bsecond pairs (y, z), components indexed by the x-index i
enum class BilinearKind { B, Bprime, Bsecond };

// Variable block of a point being held fixed.
enum class Slot { X = 0, Y = 1, Z = 2 };

const char* to_string(BilinearKind k);
const char* to_string(Slot s);

struct SparseCoeff {
    int i = 0, j = 0, k = 0;
    Int a = 0;
};

// Integer trilinear form sum_{i,j,k} a_{ijk} x_i y_j z_k on three blocks of
// n+1 variables each. Coefficients are stored densely.
class TrilinearForm {
public:
    TrilinearForm(int n, std::vector<Int> dense);
    TrilinearForm(int n, const std::vector<SparseCoeff>& coeffs);

    static TrilinearForm diagonal(int n);  // x_0 y_0 z_0 + ... + x_n y_n z_n

    int n() const { return n_; }
    int dim() const { return n_ + 1; }
    Int coeff(int i, int j, int k) const { return a_[index(i, j, k)]; }
    const std::vector<Int>& dense() const { return a_; }
    std::vector<SparseCoeff> sparse() const;

    // Stable content hash (FNV-1a over the canonical sparse serialization).
    std::string id() const;

    bool operator==(const TrilinearForm& o) const { return n_ == o.n_ && a_ == o.a_; }

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dim() + j) * dim() + k;
    }
    int n_;
    std::vector<Int> a_;
};

// Exact value of the form; throws OverflowError instead of wrapping.
Int eval_form(const TrilinearForm& f, const IntVec& x, const IntVec& y, const IntVec& z);
double eval_form_real(const TrilinearForm& f, const double* x, const double* y, const double* z);

struct BilinearVector {
    BilinearKind kind = BilinearKind::B;
    IntVec values;

    bool is_zero() const { return is_zero_vec(values); }
    Int sup_norm() const { return max_abs(values); }
};

// contract(f, B, x, y)      -> (B_k(x,y))_k
// contract(f, Bprime, x, z) -> (B'_j(x,z))_j
// contract(f, Bsecond, y, z)-> (B''_i(y,z))_i
BilinearVector contract(const TrilinearForm& f, BilinearKind kind, const IntVec& u, const IntVec& v);
// Allocation-free variant for hot loops: writes the d components into out.
void contract_into(const TrilinearForm& f, BilinearKind kind, const IntVec& u, const IntVec& v,
                   IntVec& out);
void contract_real(const TrilinearForm& f, BilinearKind kind, const double* u, const double* v,
                   double* out);

// Matrix of the linear map obtained by plugging u into the given slot.
// Rows/columns are indexed by the earlier/later remaining slot (x < y < z).
std::vector<IntVec> contraction_matrix(const TrilinearForm& f, Slot fixed, const IntVec& u);

// Rank over Q by fraction-free (Bareiss) elimination; exact for any input.
int rank_exact(std::vector<IntVec> m);

// Dimension of the solution space of the linear system cut out by fixing u:
// (n+1) - rank of the contraction matrix. The kernels taken in either of the
// two remaining variable blocks have equal dimension (transpose ranks agree).
int fiber_kernel_dim(const TrilinearForm& f, Slot fixed, const IntVec& u);

// True iff the fiber kernel dimension at u is < lambda (so u's fibers are as
// nondegenerate as requested). Requires 1 <= lambda <= n+1.
bool in_admissible(const TrilinearForm& f, Slot slot, const IntVec& u, int lambda);

struct GenericityReport {
    bool pass = false;                                // all three slots have a witness
    std::array<bool, 3> slot_ok{false, false, false};
    std::array<std::optional<IntVec>, 3> witness;     // point with trivial fiber kernel
    int trials = 0;
    std::uint64_t seed = 0;
};

// Randomized witness search: for each slot, look for a point whose contraction
// matrix is nonsingular. Deterministic for a given seed.
GenericityReport check_genericity(const TrilinearForm& f, std::uint64_t seed, int trials = 200,
                                  Int coord_bound = 3);

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Uniform coefficients in [-bound, bound], retried until genericity holds.
TrilinearForm random_generic_form(int n, Int bound, std::uint64_t seed, int max_attempts = 64);

}  // namespace manin
