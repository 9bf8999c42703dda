#include "manin/form.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <random>
#include <sstream>

namespace manin {

const char* to_string(BilinearKind k) {
    switch (k) {
        case BilinearKind::B: return "B";
        case BilinearKind::Bprime: return "Bprime";
        case BilinearKind::Bsecond: return "Bsecond";
    }
    return "?";
}

const char* to_string(Slot s) {
    switch (s) {
        case Slot::X: return "x";
        case Slot::Y: return "y";
        case Slot::Z: return "z";
    }
    return "?";
}

TrilinearForm::TrilinearForm(int n, std::vector<Int> dense) : n_(n), a_(std::move(dense)) {
    if (n < 1) throw std::invalid_argument("TrilinearForm: n must be >= 1");
    const std::size_t want = static_cast<std::size_t>(dim()) * dim() * dim();
    if (a_.size() != want)
        throw std::invalid_argument("TrilinearForm: expected " + std::to_string(want) +
                                    " dense coefficients, got " + std::to_string(a_.size()));
}

TrilinearForm::TrilinearForm(int n, const std::vector<SparseCoeff>& coeffs)
    : n_(n), a_() {
    if (n < 1) throw std::invalid_argument("TrilinearForm: n must be >= 1");
    a_.assign(static_cast<std::size_t>(dim()) * dim() * dim(), 0);
    std::vector<bool> seen(a_.size(), false);
    for (const auto& c : coeffs) {
        if (c.i < 0 || c.i > n || c.j < 0 || c.j > n || c.k < 0 || c.k > n)
            throw std::invalid_argument("TrilinearForm: coefficient index (" + std::to_string(c.i) +
                                        "," + std::to_string(c.j) + "," + std::to_string(c.k) +
                                        ") out of range for n=" + std::to_string(n));
        const std::size_t at = index(c.i, c.j, c.k);
        if (seen[at])
            throw std::invalid_argument("TrilinearForm: duplicate coefficient entry (" +
                                        std::to_string(c.i) + "," + std::to_string(c.j) + "," +
                                        std::to_string(c.k) + ")");
        seen[at] = true;
        a_[at] = c.a;
    }
}

TrilinearForm TrilinearForm::diagonal(int n) {
    std::vector<SparseCoeff> cs;
    for (int i = 0; i <= n; ++i) cs.push_back({i, i, i, 1});
    return TrilinearForm(n, cs);
}

std::vector<SparseCoeff> TrilinearForm::sparse() const {
    std::vector<SparseCoeff> out;
    for (int i = 0; i <= n_; ++i)
        for (int j = 0; j <= n_; ++j)
            for (int k = 0; k <= n_; ++k)
                if (coeff(i, j, k) != 0) out.push_back({i, j, k, coeff(i, j, k)});
    return out;
}

std::string TrilinearForm::id() const {
    std::ostringstream os;
    os << "n=" << n_ << ";";
    for (const auto& c : sparse()) os << c.i << "," << c.j << "," << c.k << ":" << c.a << ";";
    const std::string s = os.str();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream hex;
    hex << std::hex;
    hex.width(16);
    hex.fill('0');
    hex << h;
    return hex.str();
}

static void check_dim(const TrilinearForm& f, const IntVec& v, const char* name) {
    if (static_cast<int>(v.size()) != f.dim())
        throw std::invalid_argument(std::string("expected ") + name + " to have " +
                                    std::to_string(f.dim()) + " coordinates, got " +
                                    std::to_string(v.size()));
}

Int eval_form(const TrilinearForm& f, const IntVec& x, const IntVec& y, const IntVec& z) {
    check_dim(f, x, "x");
    check_dim(f, y, "y");
    check_dim(f, z, "z");
    const int d = f.dim();
    i128 total = 0;
    for (int i = 0; i < d; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < d; ++j) {
            if (y[j] == 0) continue;
            const i128 xy = mul_checked(x[i], y[j]);
            for (int k = 0; k < d; ++k) {
                const Int a = f.coeff(i, j, k);
                if (a == 0 || z[k] == 0) continue;
                total = add_checked(total, mul_checked(mul_checked(xy, z[k]), a));
            }
        }
    }
    return narrow_i128(total, "eval_form overflow");
}

double eval_form_real(const TrilinearForm& f, const double* x, const double* y, const double* z) {
    const int d = f.dim();
    double total = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double xy = x[i] * y[j];
            for (int k = 0; k < d; ++k) {
                const Int a = f.coeff(i, j, k);
                if (a != 0) total += static_cast<double>(a) * xy * z[k];
            }
        }
    return total;
}

void contract_into(const TrilinearForm& f, BilinearKind kind, const IntVec& u, const IntVec& v,
                   IntVec& out) {
    check_dim(f, u, "u");
    check_dim(f, v, "v");
    const int d = f.dim();
    out.assign(static_cast<std::size_t>(d), 0);
    for (int r = 0; r < d; ++r) {
        i128 acc = 0;
        for (int s = 0; s < d; ++s)
            for (int t = 0; t < d; ++t) {
                Int a = 0;
                switch (kind) {
                    case BilinearKind::B: a = f.coeff(s, t, r); break;        // u=x, v=y
                    case BilinearKind::Bprime: a = f.coeff(s, r, t); break;   // u=x, v=z
                    case BilinearKind::Bsecond: a = f.coeff(r, s, t); break;  // u=y, v=z
                }
                if (a == 0 || u[s] == 0 || v[t] == 0) continue;
                acc = add_checked(acc, mul_checked(mul_checked(u[s], v[t]), a));
            }
        out[static_cast<std::size_t>(r)] = narrow_i128(acc, "contract overflow");
    }
}

BilinearVector contract(const TrilinearForm& f, BilinearKind kind, const IntVec& u,
                        const IntVec& v) {
    BilinearVector out;
    out.kind = kind;
    contract_into(f, kind, u, v, out.values);
    return out;
}

void contract_real(const TrilinearForm& f, BilinearKind kind, const double* u, const double* v,
                   double* out) {
    const int d = f.dim();
    for (int r = 0; r < d; ++r) {
        double acc = 0.0;
        for (int s = 0; s < d; ++s)
            for (int t = 0; t < d; ++t) {
                Int a = 0;
                switch (kind) {
                    case BilinearKind::B: a = f.coeff(s, t, r); break;
                    case BilinearKind::Bprime: a = f.coeff(s, r, t); break;
                    case BilinearKind::Bsecond: a = f.coeff(r, s, t); break;
                }
                if (a != 0) acc += static_cast<double>(a) * u[s] * v[t];
            }
        out[r] = acc;
    }
}

std::vector<IntVec> contraction_matrix(const TrilinearForm& f, Slot fixed, const IntVec& u) {
    check_dim(f, u, "u");
    const int d = f.dim();
    std::vector<IntVec> m(d, IntVec(d, 0));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            i128 acc = 0;
            for (int s = 0; s < d; ++s) {
                Int a = 0;
                switch (fixed) {
                    case Slot::X: a = f.coeff(s, r, c); break;  // rows y, cols z
                    case Slot::Y: a = f.coeff(r, s, c); break;  // rows x, cols z
                    case Slot::Z: a = f.coeff(r, c, s); break;  // rows x, cols y
                }
                if (a == 0 || u[s] == 0) continue;
                acc = add_checked(acc, mul_checked(u[s], a));
            }
            m[r][c] = narrow_i128(acc, "contraction_matrix overflow");
        }
    return m;
}

namespace {

// Bareiss over 128-bit integers; throws OverflowError if intermediates blow up.
int rank_bareiss_i128(std::vector<std::vector<i128>>& m) {
    const int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    i128 prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        const i128 p = m[rank][col];
        for (int r = rank + 1; r < rows; ++r) {
            for (int c = col + 1; c < cols; ++c) {
                i128 t = mul_checked(p, m[r][c]);
                t -= mul_checked(m[r][col], m[rank][c]);
                m[r][c] = t / prev;  // exact division (Bareiss invariant)
            }
            m[r][col] = 0;
        }
        prev = p;
        ++rank;
    }
    return rank;
}

int rank_gmp(const std::vector<IntVec>& in) {
    const int rows = static_cast<int>(in.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(in[0].size());
    std::vector<std::vector<mpz_class>> m(rows, std::vector<mpz_class>(cols));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m[r][c] = static_cast<long>(in[r][c]);
    int rank = 0;
    mpz_class prev = 1;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        const mpz_class p = m[rank][col];
        for (int r = rank + 1; r < rows; ++r) {
            for (int c = col + 1; c < cols; ++c) {
                mpz_class t = p * m[r][c] - m[r][col] * m[rank][c];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m[r][c] = t;
            }
            m[r][col] = 0;
        }
        prev = p;
        ++rank;
    }
    return rank;
}

}  // namespace

int rank_exact(std::vector<IntVec> in) {
    try {
        std::vector<std::vector<i128>> m(in.size());
        for (std::size_t r = 0; r < in.size(); ++r)
            m[r].assign(in[r].begin(), in[r].end());
        return rank_bareiss_i128(m);
    } catch (const OverflowError&) {
        return rank_gmp(in);
    }
}

int fiber_kernel_dim(const TrilinearForm& f, Slot fixed, const IntVec& u) {
    return f.dim() - rank_exact(contraction_matrix(f, fixed, u));
}

bool in_admissible(const TrilinearForm& f, Slot slot, const IntVec& u, int lambda) {
    if (lambda < 1 || lambda > f.dim())
        throw std::invalid_argument("in_admissible: lambda must be in [1, n+1]");
    return fiber_kernel_dim(f, slot, u) < lambda;
}

namespace {

Int bounded_draw(std::mt19937_64& gen, Int lo, Int hi) {
    // Implementation-defined distributions are avoided so seeded runs are
    // reproducible across platforms.
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Int>(gen() % span);
}

}  // namespace

GenericityReport check_genericity(const TrilinearForm& f, std::uint64_t seed, int trials,
                                  Int coord_bound) {
    if (trials < 1) throw std::invalid_argument("check_genericity: trials must be >= 1");
    if (coord_bound < 1) throw std::invalid_argument("check_genericity: coord_bound must be >= 1");
    GenericityReport rep;
    rep.seed = seed;
    rep.trials = trials;
    std::mt19937_64 gen(seed);
    const int d = f.dim();
    for (int s = 0; s < 3; ++s) {
        const Slot slot = static_cast<Slot>(s);
        for (int t = 0; t < trials && !rep.slot_ok[s]; ++t) {
            IntVec u(d);
            for (int c = 0; c < d; ++c) u[c] = bounded_draw(gen, -coord_bound, coord_bound);
            if (is_zero_vec(u)) continue;
            if (fiber_kernel_dim(f, slot, u) == 0) {
                rep.slot_ok[s] = true;
                rep.witness[s] = u;
            }
        }
    }
    rep.pass = rep.slot_ok[0] && rep.slot_ok[1] && rep.slot_ok[2];
    return rep;
}

TrilinearForm random_generic_form(int n, Int bound, std::uint64_t seed, int max_attempts) {
    if (n < 1) throw std::invalid_argument("random_generic_form: n must be >= 1");
    if (bound < 1) throw std::invalid_argument("random_generic_form: bound must be >= 1");
    std::mt19937_64 gen(seed);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const int d = n + 1;
        std::vector<Int> dense(static_cast<std::size_t>(d) * d * d);
        bool nonzero = false;
        for (auto& a : dense) {
            a = bounded_draw(gen, -bound, bound);
            nonzero = nonzero || a != 0;
        }
        if (!nonzero) continue;
        TrilinearForm f(n, std::move(dense));
        if (check_genericity(f, gen()).pass) return f;
    }
    throw GenerationError("random_generic_form: no generic form found in " +
                          std::to_string(max_attempts) + " attempts");
}

}  // namespace manin
