#include "manin/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "manin/piecewise.hpp"

namespace manin {

HyperplaneLattice lattice_det(const IntVec& b) {
    if (is_zero_vec(b)) throw std::invalid_argument("lattice_det: zero vector");
    HyperplaneLattice out;
    out.bvec = b;
    out.gcd = gcd_vec(b);
    mpz_class norm_sq = 0;
    for (Int v : b) norm_sq += mpz_class(static_cast<long>(v)) * static_cast<long>(v);
    out.det_sq = mpq_class(norm_sq, mpz_class(static_cast<long>(out.gcd)) *
                                        static_cast<long>(out.gcd));
    out.det_sq.canonicalize();
    out.det = std::sqrt(out.det_sq.get_d());
    return out;
}

std::vector<IntVec> kernel_basis(const IntVec& b) {
    if (is_zero_vec(b)) throw std::invalid_argument("kernel_basis: zero vector");
    const int d = static_cast<int>(b.size());
    // Column operations driving b to g * e_pivot, mirrored on U (so U stays
    // unimodular and tracks the coordinate change).
    std::vector<mpz_class> v(d);
    for (int i = 0; i < d; ++i) v[i] = static_cast<long>(b[i]);
    std::vector<std::vector<mpz_class>> U(d, std::vector<mpz_class>(d, 0));
    for (int i = 0; i < d; ++i) U[i][i] = 1;

    const auto col_addmul = [&](int dst, int src, const mpz_class& q) {
        v[dst] += q * v[src];
        for (int r = 0; r < d; ++r) U[r][dst] += q * U[r][src];
    };
    const auto col_swap = [&](int a, int c) {
        std::swap(v[a], v[c]);
        for (int r = 0; r < d; ++r) std::swap(U[r][a], U[r][c]);
    };

    // Repeatedly reduce the entry of largest absolute value by the smallest
    // nonzero one until a single nonzero entry remains.
    while (true) {
        int smallest = -1;
        int nonzero = 0;
        for (int i = 0; i < d; ++i)
            if (v[i] != 0) {
                ++nonzero;
                if (smallest < 0 || abs(v[i]) < abs(v[smallest])) smallest = i;
            }
        if (nonzero <= 1) break;
        for (int i = 0; i < d; ++i) {
            if (i == smallest || v[i] == 0) continue;
            mpz_class q = v[i] / v[smallest];  // C++ truncation; remainder stays small
            if (q != 0) col_addmul(i, smallest, -q);
        }
    }
    int pivot = 0;
    while (pivot < d && v[pivot] == 0) ++pivot;
    if (pivot != 0) col_swap(0, pivot);

    std::vector<IntVec> basis;
    for (int c = 1; c < d; ++c) {
        IntVec col(d);
        for (int r = 0; r < d; ++r) {
            if (!U[r][c].fits_slong_p()) throw OverflowError("kernel_basis: entry overflow");
            col[r] = U[r][c].get_si();
        }
        basis.push_back(std::move(col));
    }
    return basis;
}

mpz_class gram_determinant(const std::vector<IntVec>& basis) {
    const int m = static_cast<int>(basis.size());
    std::vector<std::vector<mpz_class>> g(m, std::vector<mpz_class>(m, 0));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            mpz_class acc = 0;
            for (std::size_t i = 0; i < basis[r].size(); ++i)
                acc += mpz_class(static_cast<long>(basis[r][i])) *
                       static_cast<long>(basis[c][i]);
            g[r][c] = acc;
        }
    // Bareiss determinant.
    mpz_class prev = 1;
    int sign = 1;
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        for (int r = col; r < m; ++r)
            if (g[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != col) {
            std::swap(g[piv], g[col]);
            sign = -sign;
        }
        for (int r = col + 1; r < m; ++r) {
            for (int c = col + 1; c < m; ++c) {
                mpz_class t = g[col][col] * g[r][c] - g[r][col] * g[col][c];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                g[r][c] = t;
            }
            g[r][col] = 0;
        }
        prev = g[col][col];
    }
    return sign * g[m - 1][m - 1];
}

SliceVolume slice_volume(const IntVec& b, VolumeMethod method, std::uint64_t samples,
                         std::uint64_t seed) {
    if (is_zero_vec(b)) throw std::invalid_argument("slice_volume: zero vector");
    const int d = static_cast<int>(b.size());
    SliceVolume out;
    out.method = method;
    if (method == VolumeMethod::Exact) {
        std::vector<mpq_class> cs;
        for (Int v : b)
            if (v != 0) cs.emplace_back(static_cast<long>(abs64(v)));
        const mpq_class f0 = density_at_zero(cs);
        mpz_class norm_sq = 0;
        for (Int v : b) norm_sq += mpz_class(static_cast<long>(v)) * static_cast<long>(v);
        mpq_class scaled = f0;
        for (int k = 0; k < d; ++k) scaled *= 2;
        out.value_sq = mpq_class(norm_sq) * scaled * scaled;
        out.value_sq.canonicalize();
        out.value = std::sqrt(norm_sq.get_d()) * scaled.get_d();
        return out;
    }
    if (samples < 1000) throw std::invalid_argument("slice_volume: need at least 1000 samples");
    // Graph sampling: pick the largest coordinate as dependent; the slice is
    // the graph z_k* = -sum_others b_k z_k / b_k* over the free cube, kept
    // where the dependent coordinate stays inside [-1,1]. Surface scaling
    // factor |b|_2 / |b_k*|.
    int kstar = 0;
    for (int k = 1; k < d; ++k)
        if (abs64(b[k]) > abs64(b[kstar])) kstar = k;
    double norm = 0.0;
    for (Int v : b) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    const double scale = norm / static_cast<double>(abs64(b[kstar]));
    std::mt19937_64 gen(seed);
    const auto unit = [&]() { return static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0; };
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
            if (k == kstar) continue;
            s += static_cast<double>(b[k]) * unit();
        }
        const double zk = -s / static_cast<double>(b[kstar]);
        if (std::abs(zk) <= 1.0) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double cube = std::pow(2.0, d - 1);
    out.value = p * cube * scale;
    out.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) * cube * scale;
    out.samples = samples;
    return out;
}

double slice_volume_real(const std::vector<double>& b) {
    std::vector<double> cs;
    double norm_sq = 0.0;
    for (double v : b) {
        norm_sq += v * v;
        const double a = std::abs(v);
        if (a > 0.0) cs.push_back(a);
    }
    if (cs.empty()) throw std::invalid_argument("slice_volume_real: zero vector");
    double scaled = density_at_zero_real(cs);
    for (std::size_t k = 0; k < b.size(); ++k) scaled *= 2.0;
    return std::sqrt(norm_sq) * scaled;
}

namespace {

void hyperplane_scan(const IntVec& b, const std::vector<int>& free_idx, std::size_t depth,
                     Int P3, Int bstar, i128 partial, long long& count) {
    if (depth == free_idx.size()) {
        if (partial % bstar != 0) return;
        const i128 zk = -partial / bstar;
        if (zk >= -P3 && zk <= P3) ++count;
        return;
    }
    const Int bk = b[free_idx[depth]];
    i128 s = partial + static_cast<i128>(bk) * -P3;
    for (Int t = -P3; t <= P3; ++t, s += bk)
        hyperplane_scan(b, free_idx, depth + 1, P3, bstar, s, count);
}

}  // namespace

long long count_hyperplane_points(const IntVec& b, Int P3) {
    if (is_zero_vec(b)) throw std::invalid_argument("count_hyperplane_points: zero vector");
    if (P3 < 0) throw std::invalid_argument("count_hyperplane_points: P3 must be >= 0");
    const int d = static_cast<int>(b.size());
    int kstar = 0;
    for (int k = 1; k < d; ++k)
        if (abs64(b[k]) > abs64(b[kstar])) kstar = k;
    std::vector<int> free_idx;
    for (int k = 0; k < d; ++k)
        if (k != kstar) free_idx.push_back(k);
    long long count = 0;
    hyperplane_scan(b, free_idx, 0, P3, b[kstar], 0, count);
    return count;
}

double predict_fiber(const IntVec& b, Int P3) {
    if (is_zero_vec(b)) throw std::invalid_argument("predict_fiber: zero vector");
    if (P3 < 1) throw std::invalid_argument("predict_fiber: P3 must be >= 1");
    const int d = static_cast<int>(b.size());
    std::vector<mpq_class> cs;
    for (Int v : b)
        if (v != 0) cs.emplace_back(static_cast<long>(abs64(v)));
    // Vol / det = gcd(b) * f(0) * 2^d: the norms cancel, so the ratio is
    // rational and needs no square roots.
    mpq_class ratio = density_at_zero(cs) * static_cast<long>(gcd_vec(b));
    for (int k = 0; k < d; ++k) ratio *= 2;
    double out = ratio.get_d();
    for (int k = 0; k < d - 1; ++k) out *= static_cast<double>(P3);
    return out;
}

}  // namespace manin
