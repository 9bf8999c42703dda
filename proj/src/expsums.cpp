#include "manin/expsums.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace manin {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Dirichlet kernel: sum over |m| <= P of e(t m) = sin((2P+1) pi t)/sin(pi t),
// extended by its limit 2P+1 at integer t. Even and 1-periodic.
double dirichlet(double t, Int P) {
    const double delta = t - std::nearbyint(t);
    if (std::abs(delta) < 1e-12) return static_cast<double>(2 * P + 1);
    return std::sin((2 * P + 1) * kPi * delta) / std::sin(kPi * delta);
}

// Odometer over [0, q)^d residue vectors.
bool next_residue(IntVec& v, Int q) {
    for (auto& c : v) {
        if (++c < q) return true;
        c = 0;
    }
    return false;
}

// Visits every residue pair (x, y) mod q and hands fn the reduced contraction
// vector b = B(x, y) mod q. The x-dependent half of the contraction is
// hoisted out of the y loop.
template <class Fn>
void for_residue_pairs(const TrilinearForm& f, Int q, Fn&& fn) {
    const int d = f.dim();
    IntVec x(d, 0), y(d, 0), b(d, 0);
    std::vector<Int> cx(static_cast<std::size_t>(d) * d, 0);  // cx[j*d+k] = sum_i a_ijk x_i mod q
    do {
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                Int s = 0;
                for (int i = 0; i < d; ++i) s += mod_pos(f.coeff(i, j, k), q) * x[i];
                cx[static_cast<std::size_t>(j) * d + k] = s % q;
            }
        std::fill(y.begin(), y.end(), 0);
        do {
            for (int k = 0; k < d; ++k) {
                Int s = 0;
                for (int j = 0; j < d; ++j) s += cx[static_cast<std::size_t>(j) * d + k] * y[j];
                b[k] = s % q;
            }
            fn(static_cast<const IntVec&>(b));
        } while (next_residue(y, q));
    } while (next_residue(x, q));
}

long long zero_pair_count(const TrilinearForm& f, Int q) {
    long long cnt = 0;
    for_residue_pairs(f, q, [&](const IntVec& b) {
        if (is_zero_vec(b)) ++cnt;
    });
    return cnt;
}

long long ipow_ll(Int base, int exp) {
    i128 r = 1;
    for (int e = 0; e < exp; ++e) r = mul_checked(r, static_cast<i128>(base));
    return narrow_i128(r);
}

double dist_to_int(double t) { return std::abs(t - std::nearbyint(t)); }

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_m.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(m, 0.0);
    weights.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

// Tensor Gauss-Legendre integral of each fn over [-1,1]^dim.
std::vector<double> tensor_gauss(int dim, int m,
                                 const std::vector<std::function<double(const double*)>>& fns) {
    std::vector<double> nodes, weights;
    gauss_legendre(m, nodes, weights);
    std::vector<CompensatedSum> acc(fns.size());
    std::vector<double> pt(dim, 0.0);
    std::vector<int> idx(dim, 0);
    while (true) {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            pt[k] = nodes[idx[k]];
            w *= weights[idx[k]];
        }
        for (std::size_t i = 0; i < fns.size(); ++i) acc[i].add(w * fns[i](pt.data()));
        int k = 0;
        while (k < dim && ++idx[k] == m) idx[k++] = 0;
        if (k == dim) break;
    }
    std::vector<double> out(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i) out[i] = acc[i].value();
    return out;
}

// Runs the requested quadrature on integrands given over [-1,1]^{3n+3};
// the QMC route maps the unit cube and scales by the box volume.
std::vector<McEstimate> box_integrals(const TrilinearForm& f,
                                      const std::vector<std::function<double(double)>>& of_F,
                                      const QuadSpec& quad) {
    const int dim = 3 * f.dim();
    std::vector<std::function<double(const double*)>> fns;
    fns.reserve(of_F.size());
    for (const auto& g : of_F)
        fns.push_back([&f, &g, dim](const double* t) {
            double u[3 * 5];  // n <= 4 in practice; assert below
            for (int k = 0; k < dim; ++k) u[k] = 2.0 * t[k] - 1.0;
            const int d = dim / 3;
            return g(eval_form_real(f, u, u + d, u + 2 * d));
        });
    if (f.dim() > 5) throw std::invalid_argument("oscillatory integrals support n <= 4");

    if (quad.gauss) {
        std::vector<std::function<double(const double*)>> direct;
        direct.reserve(of_F.size());
        for (const auto& g : of_F)
            direct.push_back([&f, &g, dim](const double* u) {
                const int d = dim / 3;
                return g(eval_form_real(f, u, u + d, u + 2 * d));
            });
        const auto vals = tensor_gauss(dim, quad.gauss_nodes, direct);
        std::vector<McEstimate> out(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) out[i] = {vals[i], 0.0};
        return out;
    }

    auto ests = qmc_integrate_many(dim, quad.mc, fns);
    const double vol = std::ldexp(1.0, dim);  // 2^dim
    for (auto& e : ests) {
        e.value *= vol;
        e.stderr_ *= vol;
    }
    return ests;
}

}  // namespace

void validate_arc(const ArcSpec& spec) {
    if (spec.q < 1) throw std::invalid_argument("arc: q must be >= 1");
    if (spec.a < 0 || spec.a >= spec.q)
        throw std::invalid_argument("arc: need 0 <= a < q");
    if (std::gcd(static_cast<long long>(spec.a), static_cast<long long>(spec.q)) != 1)
        throw std::invalid_argument("arc: a and q must be coprime");
    if (!(spec.theta > 0.0 && spec.theta < 1.0))
        throw std::invalid_argument("arc: theta must lie in (0, 1)");
    if (!(spec.P > 1.0)) throw std::invalid_argument("arc: P must exceed 1");
}

bool in_major_arc(double alpha, const ArcSpec& spec) {
    validate_arc(spec);
    const double width = static_cast<double>(spec.q) * std::pow(spec.P, -1.0 + 2.0 * spec.theta);
    return std::abs(spec.q * alpha - spec.a) <= width;
}

std::complex<double> S_alpha(const TrilinearForm& f, double alpha, Int P1, Int P2, Int P3,
                             const CountVariant& variant) {
    if (P1 < 0 || P2 < 0 || P3 < 0) throw std::invalid_argument("S_alpha: bounds must be >= 0");
    if (variant.tag == CountTag::U)
        throw std::invalid_argument(
            "S_alpha: the U variant filters z, which the closed-form inner sum cannot express");
    const int d = f.dim();
    const int lambda = effective_lambda(variant, f.n());
    const auto xs = half_space_points(d, P1);
    const auto ys = half_space_points(d, P2);

    std::vector<char> y_ok(ys.size(), 1);
    if (variant.tag == CountTag::NPrime)
        for (std::size_t i = 0; i < ys.size(); ++i)
            y_ok[i] = in_admissible(f, Slot::Y, ys[i], lambda) ? 1 : 0;

    CompensatedSum total;
    const double slab = std::pow(2.0 * static_cast<double>(P3) + 1.0, d);
    if (variant.tag == CountTag::All) {
        // x = 0 row: B vanishes and each Dirichlet factor is maximal.
        total.add(std::pow(2.0 * static_cast<double>(P2) + 1.0, d) * slab);
    }
    for (const auto& x : xs) {
        const bool x_adm = variant.tag == CountTag::N1 || variant.tag == CountTag::NPrime
                               ? in_admissible(f, Slot::X, x, lambda)
                               : true;
        if (!x_adm) continue;
        CompensatedSum row;
        // y = 0 for this x and its mirror (All only).
        if (variant.tag == CountTag::All) row.add(slab);
        for (std::size_t iy = 0; iy < ys.size(); ++iy) {
            if (!y_ok[iy]) continue;
            const auto b = contract(f, BilinearKind::B, x, ys[iy]);
            if (b.is_zero()) {
                if (variant.tag == CountTag::All) row.add(2.0 * slab);
                continue;
            }
            double prod = 1.0;
            for (int k = 0; k < d; ++k) prod *= dirichlet(alpha * static_cast<double>(b.values[k]), P3);
            row.add(2.0 * prod);  // y and -y give the same even kernel product
        }
        total.add(2.0 * row.value());  // same for x and -x
    }
    return {total.value(), 0.0};
}

long long S_aq_exact(const TrilinearForm& f, Int a, Int q) {
    if (q < 1) throw std::invalid_argument("S_aq: q must be >= 1");
    if (std::gcd(static_cast<long long>(mod_pos(a, q)), static_cast<long long>(q)) != 1)
        throw std::invalid_argument("S_aq: a and q must be coprime");
    // The z-sum vanishes unless B(x,y) = 0 mod q, where it contributes
    // q^{n+1}; the a-dependence cancels entirely.
    return narrow_i128(mul_checked(static_cast<i128>(ipow_ll(q, f.dim())),
                                   static_cast<i128>(zero_pair_count(f, q))));
}

std::complex<double> S_aq(const TrilinearForm& f, Int a, Int q) {
    return {static_cast<double>(S_aq_exact(f, a, q)), 0.0};
}

mpq_class A_of_q(const TrilinearForm& f, Int q) {
    if (q < 1) throw std::invalid_argument("A_of_q: q must be >= 1");
    if (q == 1) return 1;
    mpz_class denom = 1;
    for (int e = 0; e < 2 * f.dim(); ++e) denom *= q;
    mpq_class r(mpz_class(euler_phi(q)) * static_cast<long>(zero_pair_count(f, q)), denom);
    r.canonicalize();
    return r;
}

long long M_of_q(const TrilinearForm& f, Int q) {
    if (q < 1) throw std::invalid_argument("M_of_q: q must be >= 1");
    // For fixed (x, y) the congruence B . z = 0 mod q has
    // q^n gcd(q, B_0, ..., B_n) solutions.
    i128 sum = 0;
    for_residue_pairs(f, q, [&](const IntVec& b) {
        Int g = q;
        for (Int c : b) g = gcd64(g, c);
        sum += g;
    });
    return narrow_i128(mul_checked(static_cast<i128>(ipow_ll(q, f.n())), sum));
}

McEstimate I_beta_est(const TrilinearForm& f, double beta, const QuadSpec& quad) {
    const auto out = box_integrals(
        f, {[beta](double F) { return std::cos(2.0 * kPi * beta * F); }}, quad);
    return out[0];
}

double I_beta(const TrilinearForm& f, double beta, const QuadSpec& quad) {
    return I_beta_est(f, beta, quad).value;
}

std::vector<McEstimate> J_of_phi_many(const TrilinearForm& f, const std::vector<double>& phis,
                                      const QuadSpec& quad) {
    std::vector<std::function<double(double)>> kernels;
    kernels.reserve(phis.size());
    for (double phi : phis)
        kernels.push_back([phi](double F) {
            const double t = kPi * F;
            if (std::abs(t) < 1e-9) return 2.0 * phi;  // removable singularity
            return std::sin(2.0 * phi * t) / t;
        });
    return box_integrals(f, kernels, quad);
}

double J_of_phi(const TrilinearForm& f, double phi, const QuadSpec& quad) {
    return J_of_phi_many(f, {phi}, quad)[0].value;
}

SeriesTruncation singular_series_trunc(const TrilinearForm& f, Int Q) {
    if (Q < 1) throw std::invalid_argument("singular_series_trunc: Q must be >= 1");
    SeriesTruncation out;
    out.Q = Q;
    out.partial = 0;
    for (Int q = 1; q <= Q; ++q) {
        mpq_class a = A_of_q(f, q);
        out.partial += a;
        out.terms.emplace_back(q, std::move(a));
    }
    out.tail_estimate = std::abs(out.terms.back().second.get_d()) * static_cast<double>(Q);
    return out;
}

long long count_M(const TrilinearForm& f, BilinearKind kind, double alpha, Int Ha, Int Hb,
                  double Hinv) {
    if (Ha < 0 || Hb < 0) throw std::invalid_argument("count_M: bounds must be >= 0");
    if (Hinv < 0) throw std::invalid_argument("count_M: Hinv must be >= 0");
    const int d = f.dim();
    long long count = 0;
    IntVec u(d, -Ha);
    // plain odometer over both boxes; the counting functions are only used
    // at survey scale
    const auto scan_v = [&](const IntVec& uu) {
        IntVec v(d, -Hb);
        while (true) {
            const auto b = contract(f, kind, uu, v);
            bool ok = true;
            for (int k = 0; k < d && ok; ++k)
                ok = dist_to_int(alpha * static_cast<double>(b.values[k])) <= Hinv;
            if (ok) ++count;
            int k = 0;
            while (k < d && v[k] == Hb) v[k++] = -Hb;
            if (k == d) return;
            ++v[k];
        }
    };
    while (true) {
        scan_v(u);
        int k = 0;
        while (k < d && u[k] == Ha) u[k++] = -Ha;
        if (k == d) break;
        ++u[k];
    }
    return count;
}

long long count_M3(const TrilinearForm& f, double alpha, Int H1, Int H2, double Hinv) {
    return count_M(f, BilinearKind::B, alpha, H1, H2, Hinv);
}

}  // namespace manin
