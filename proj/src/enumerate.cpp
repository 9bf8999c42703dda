#include "manin/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

namespace manin {
namespace {

bool filters_x(CountTag t) { return t == CountTag::N1 || t == CountTag::NPrime || t == CountTag::U; }
bool filters_y(CountTag t) { return t == CountTag::NPrime || t == CountTag::U; }
bool filters_z(CountTag t) { return t == CountTag::U; }

long long power_ll(Int base, int exp) {
    i128 r = 1;
    for (int e = 0; e < exp; ++e) r = mul_checked(r, static_cast<i128>(base));
    return narrow_i128(r);
}

// Calls fn(z) for every z in [-L, L]^d on the hyperplane b.z = 0. The
// coordinate with the largest |b_k| is solved for; the rest are enumerated.
template <class Fn>
void scan_hyperplane(const IntVec& b, Int L, Fn&& fn) {
    const int d = static_cast<int>(b.size());
    int kstar = 0;
    for (int k = 1; k < d; ++k)
        if (abs64(b[k]) > abs64(b[kstar])) kstar = k;
    const Int bstar = b[kstar];
    std::vector<int> free_idx;
    for (int k = 0; k < d; ++k)
        if (k != kstar) free_idx.push_back(k);

    IntVec z(d, 0);
    auto rec = [&](auto&& self, std::size_t depth, i128 partial) -> void {
        if (depth == free_idx.size()) {
            if (partial % bstar != 0) return;
            const i128 zk = -partial / bstar;
            if (zk < -L || zk > L) return;
            z[kstar] = static_cast<Int>(zk);
            fn(static_cast<const IntVec&>(z));
            return;
        }
        const int k = free_idx[depth];
        i128 s = partial + static_cast<i128>(b[k]) * -L;
        for (Int t = -L; t <= L; ++t, s += b[k]) {
            z[k] = t;
            self(self, depth + 1, s);
        }
    };
    if (L >= 0) rec(rec, 0, 0);
}

// z-side admissibility and nondegeneracy for the U variant.
bool z_passes(const TrilinearForm& f, const IntVec& x, const IntVec& y, const IntVec& z,
              int lambda) {
    if (!in_admissible(f, Slot::Z, z, lambda)) return false;
    if (contract(f, BilinearKind::Bprime, x, z).is_zero()) return false;
    return !contract(f, BilinearKind::Bsecond, y, z).is_zero();
}

void gen_half_space(int d, Int P, int pos, bool leading_zero, IntVec& v, std::vector<IntVec>& out) {
    if (pos == d) {
        if (!leading_zero) out.push_back(v);
        return;
    }
    const Int lo = leading_zero ? 0 : -P;  // first nonzero coordinate must be > 0
    for (Int t = lo; t <= P; ++t) {
        v[pos] = t;
        gen_half_space(d, P, pos + 1, leading_zero && t == 0, v, out);
    }
}

// Splits [0, n) into contiguous chunks, runs body(begin, end) on each, and
// adds the exact partial sums in chunk order.
long long parallel_sum(std::size_t n, int threads,
                       const std::function<long long(std::size_t, std::size_t)>& body) {
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (nt == 1) return body(0, n);
    std::vector<long long> partial(nt, 0);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = n * t / nt, hi = n * (t + 1) / nt;
        pool.emplace_back([&partial, &body, t, lo, hi] { partial[t] = body(lo, hi); });
    }
    for (auto& th : pool) th.join();
    i128 total = 0;
    for (long long p : partial) total = add_checked(total, static_cast<i128>(p));
    return narrow_i128(total);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Pairs (x, y) on exact shells surviving the variant's x/y filters and the
// B(x,y) != 0 condition; used for shell queries with l3 = 0.
long long filtered_pair_count(const TrilinearForm& f, Int l1, Int l2, const CountVariant& v) {
    const int lambda = effective_lambda(v, f.n());
    i128 total = 0;
    std::vector<IntVec> xs, ys;
    {
        IntVec buf(f.dim(), 0);
        gen_half_space(f.dim(), l1, 0, true, buf, xs);
        gen_half_space(f.dim(), l2, 0, true, buf, ys);
    }
    auto on_shell = [](const IntVec& u, Int l) { return max_abs(u) == l; };
    for (const auto& x : xs) {
        if (!on_shell(x, l1)) continue;
        if (filters_x(v.tag) && !in_admissible(f, Slot::X, x, lambda)) continue;
        for (const auto& y : ys) {
            if (!on_shell(y, l2)) continue;
            if (filters_y(v.tag) && !in_admissible(f, Slot::Y, y, lambda)) continue;
            if (contract(f, BilinearKind::B, x, y).is_zero()) continue;
            total += 4;
        }
    }
    return narrow_i128(total);
}

}  // namespace

int effective_lambda(const CountVariant& v, int n) {
    if (!filters_x(v.tag) && !filters_z(v.tag)) return 0;
    const int l = v.lambda == 0 ? n : v.lambda;
    if (l < 1 || l > n + 1)
        throw std::invalid_argument("count variant: lambda must lie in [1, n+1]");
    return l;
}

std::string variant_label(const CountVariant& v, int n) {
    switch (v.tag) {
        case CountTag::All: return "all";
        case CountTag::Nondeg3: return "nondeg3";
        case CountTag::N1: return "n1:lambda=" + std::to_string(effective_lambda(v, n));
        case CountTag::NPrime: return "nprime:lambda=" + std::to_string(effective_lambda(v, n));
        case CountTag::U: return "u:lambda=" + std::to_string(effective_lambda(v, n));
    }
    return "?";
}

std::vector<IntVec> half_space_points(int d, Int P) {
    std::vector<IntVec> out;
    if (P < 0) return out;
    IntVec v(static_cast<std::size_t>(d), 0);
    gen_half_space(d, P, 0, true, v, out);
    return out;
}

namespace {

// Same traversal as gen_half_space restricted to sup-norm l: once the last
// free position is reached without a coordinate at the boundary, only the
// two boundary values remain, so interior points are never visited.
void gen_half_space_shell(int d, Int l, int pos, bool leading_zero, bool touched, IntVec& v,
                          std::vector<IntVec>& out) {
    if (pos == d) {
        if (!leading_zero && touched) out.push_back(v);
        return;
    }
    const Int lo = leading_zero ? 0 : -l;
    if (!touched && pos == d - 1) {
        for (Int t : {-l, l})
            if (t >= lo) {
                v[pos] = t;
                gen_half_space_shell(d, l, pos + 1, leading_zero && t == 0, true, v, out);
            }
        return;
    }
    for (Int t = lo; t <= l; ++t) {
        v[pos] = t;
        gen_half_space_shell(d, l, pos + 1, leading_zero && t == 0, touched || t == -l || t == l,
                             v, out);
    }
}

}  // namespace

std::vector<IntVec> half_space_shell(int d, Int l) {
    std::vector<IntVec> out;
    if (l < 1) return out;  // the l = 0 shell is the origin, which has no representative
    IntVec v(static_cast<std::size_t>(d), 0);
    gen_half_space_shell(d, l, 0, true, false, v, out);
    return out;
}

long long shell_point_count(int d, Int l) {
    if (l < 0) return 0;
    if (l == 0) return 1;
    return power_ll(2 * l + 1, d) - power_ll(2 * l - 1, d);
}

long long shell_primitive_count(int d, Int l) {
    if (l <= 0) return 0;
    // Every vector of sup-norm l and content g is g times a primitive vector
    // of sup-norm l/g, so invert the divisor sum.
    const auto mu = moebius_table(l);
    long long total = 0;
    for (Int g = 1; g <= l; ++g)
        if (l % g == 0 && mu[g] != 0) total += mu[g] * shell_point_count(d, l / g);
    return total;
}

long long count_fiber_z(const TrilinearForm& f, const IntVec& x, const IntVec& y, Int P3,
                        const CountVariant& variant) {
    if (P3 < 0) throw std::invalid_argument("count_fiber_z: P3 must be >= 0");
    const auto b = contract(f, BilinearKind::B, x, y);
    if (b.is_zero()) throw std::domain_error("count_fiber_z: degenerate fiber, B(x,y) = 0");
    const int lambda = effective_lambda(variant, f.n());
    long long cnt = 0;
    if (filters_z(variant.tag)) {
        scan_hyperplane(b.values, P3, [&](const IntVec& z) {
            if (z_passes(f, x, y, z, lambda)) ++cnt;
        });
    } else {
        scan_hyperplane(b.values, P3, [&](const IntVec&) { ++cnt; });
    }
    return cnt;
}

CountReport count_box(const TrilinearForm& f, Int P1, Int P2, Int P3, const CountVariant& variant,
                      int threads) {
    if (P1 < 0 || P2 < 0 || P3 < 0)
        throw std::invalid_argument("count_box: bounds must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();
    const int d = f.dim();
    const int lambda = effective_lambda(variant, f.n());
    const long long slab = power_ll(2 * P3 + 1, d);

    const auto xs = half_space_points(d, P1);
    const auto ys = half_space_points(d, P2);

    // y-side admissibility is reused across every x, so decide it once.
    std::vector<char> y_ok(ys.size(), 1);
    if (filters_y(variant.tag))
        for (std::size_t i = 0; i < ys.size(); ++i)
            y_ok[i] = in_admissible(f, Slot::Y, ys[i], lambda) ? 1 : 0;

    i128 total = 0;
    if (variant.tag == CountTag::All) {
        // x = 0 row and y = 0 column: B vanishes, every z solves F = 0.
        total += mul_checked(static_cast<i128>(power_ll(2 * P2 + 1, d)), static_cast<i128>(slab));
        total += mul_checked(static_cast<i128>(2 * xs.size()), static_cast<i128>(slab));
    }

    const long long paired = parallel_sum(xs.size(), threads, [&](std::size_t lo, std::size_t hi) {
        i128 local = 0;
        for (std::size_t ix = lo; ix < hi; ++ix) {
            const IntVec& x = xs[ix];
            if (filters_x(variant.tag) && !in_admissible(f, Slot::X, x, lambda)) continue;
            for (std::size_t iy = 0; iy < ys.size(); ++iy) {
                if (!y_ok[iy]) continue;
                const IntVec& y = ys[iy];
                const auto b = contract(f, BilinearKind::B, x, y);
                if (b.is_zero()) {
                    if (variant.tag == CountTag::All) local += 4 * static_cast<i128>(slab);
                    continue;
                }
                long long cnt = 0;
                if (filters_z(variant.tag)) {
                    scan_hyperplane(b.values, P3, [&](const IntVec& z) {
                        if (z_passes(f, x, y, z, lambda)) ++cnt;
                    });
                } else {
                    scan_hyperplane(b.values, P3, [&](const IntVec&) { ++cnt; });
                }
                local += 4 * static_cast<i128>(cnt);
            }
        }
        return narrow_i128(local);
    });

    CountReport rep;
    rep.form_id = f.id();
    rep.variant = variant_label(variant, f.n());
    rep.P1 = P1;
    rep.P2 = P2;
    rep.P3 = P3;
    rep.count = narrow_i128(add_checked(total, static_cast<i128>(paired)));
    rep.seconds = seconds_since(t0);
    return rep;
}

HeightCounter::HeightCounter(TrilinearForm f, CountVariant variant, int threads)
    : form_(std::move(f)),
      variant_(variant),
      lambda_(effective_lambda(variant, form_.n())),
      threads_(std::max(1, threads)) {}

const std::vector<IntVec>& HeightCounter::shell_source(Int l, std::vector<IntVec>& buf) {
    // Shells grow linearly with l, so caching them all would swamp memory on
    // hyperbolic sweeps with P in the thousands; small ones are the hot case.
    constexpr Int kCacheMax = 64;
    if (l > kCacheMax) {
        buf = half_space_shell(form_.dim(), l);
        return buf;
    }
    auto it = shells_.find(l);
    if (it != shells_.end()) return it->second;
    return shells_.emplace(l, half_space_shell(form_.dim(), l)).first->second;
}

void HeightCounter::ensure_pair(Int l1, Int l2, Int l3max) {
    auto& block = table_[{l1, l2}];
    if (block.covered >= l3max) return;

    std::vector<IntVec> xbuf, ybuf;
    const auto& xs = shell_source(l1, xbuf);
    const auto& ys = shell_source(l2, ybuf);
    std::vector<char> y_ok(ys.size(), 1);
    if (filters_y(variant_.tag))
        for (std::size_t i = 0; i < ys.size(); ++i)
            y_ok[i] = in_admissible(form_, Slot::Y, ys[i], lambda_) ? 1 : 0;
    std::vector<char> y_prim(ys.size(), 0);
    for (std::size_t i = 0; i < ys.size(); ++i) y_prim[i] = gcd_vec(ys[i]) == 1 ? 1 : 0;

    const std::size_t nrows = static_cast<std::size_t>(l3max) + 1;
    const int nt = std::max<int>(1, std::min<std::size_t>(threads_, xs.size()));
    std::vector<std::vector<std::pair<long long, long long>>> local(
        nt, std::vector<std::pair<long long, long long>>(nrows, {0, 0}));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = xs.size() * t / nt, hi = xs.size() * (t + 1) / nt;
        pool.emplace_back([&, t, lo, hi] {
            auto& rows = local[t];
            IntVec b;
            for (std::size_t ix = lo; ix < hi; ++ix) {
                const IntVec& x = xs[ix];
                if (filters_x(variant_.tag) && !in_admissible(form_, Slot::X, x, lambda_)) continue;
                const bool x_prim = gcd_vec(x) == 1;
                for (std::size_t iy = 0; iy < ys.size(); ++iy) {
                    if (!y_ok[iy]) continue;
                    const IntVec& y = ys[iy];
                    contract_into(form_, BilinearKind::B, x, y, b);
                    if (is_zero_vec(b)) {
                        if (variant_.tag == CountTag::All) {
                            for (Int l3 = 1; l3 <= l3max; ++l3) {
                                rows[l3].first += 4 * shell_point_count(form_.dim(), l3);
                                if (x_prim && y_prim[iy])
                                    rows[l3].second += 4 * shell_primitive_count(form_.dim(), l3);
                            }
                        }
                        continue;
                    }
                    const bool pair_prim = x_prim && y_prim[iy];
                    scan_hyperplane(b, l3max, [&](const IntVec& z) {
                        const Int l3 = max_abs(z);
                        if (l3 == 0) return;  // shells hold nonzero vectors only
                        if (filters_z(variant_.tag) && !z_passes(form_, x, y, z, lambda_)) return;
                        rows[l3].first += 4;
                        if (pair_prim && gcd_vec(z) == 1) rows[l3].second += 4;
                    });
                }
            }
        });
    }
    for (auto& th : pool) th.join();

    block.rows.assign(nrows, {0, 0});
    for (const auto& rows : local)
        for (std::size_t i = 0; i < nrows; ++i) {
            block.rows[i].first += rows[i].first;
            block.rows[i].second += rows[i].second;
        }
    block.covered = l3max;
}

long long HeightCounter::shell(Int l1, Int l2, Int l3, bool primitive) {
    if (l1 < 1 || l2 < 1 || l3 < 1)
        throw std::invalid_argument("HeightCounter::shell: shell indices must be >= 1");
    ensure_pair(l1, l2, l3);
    const auto& row = table_[{l1, l2}].rows[static_cast<std::size_t>(l3)];
    return primitive ? row.second : row.first;
}

long long HeightCounter::height_count(Int B, bool primitive) {
    if (B < 1) return 0;
    i128 total = 0;
    for (Int l1 = 1; l1 <= B; ++l1)
        for (Int l2 = 1; l1 * l2 <= B; ++l2) {
            const Int l3max = B / (l1 * l2);
            ensure_pair(l1, l2, l3max);
            const auto& rows = table_[{l1, l2}].rows;
            for (Int l3 = 1; l3 <= l3max; ++l3) {
                const auto& row = rows[static_cast<std::size_t>(l3)];
                total = add_checked(total, static_cast<i128>(primitive ? row.second : row.first));
            }
        }
    return narrow_i128(total);
}

long long HeightCounter::moebius_sum(Int B) {
    if (B < 1) return 0;
    const auto mu = moebius_table(B);
    i128 total = 0;
    for (Int k = 1; k <= B; ++k) {
        if (mu[k] == 0) continue;
        for (Int l = 1; k * l <= B; ++l) {
            if (mu[l] == 0) continue;
            for (Int m = 1; k * l * m <= B; ++m) {
                if (mu[m] == 0) continue;
                const long long inner = height_count(B / (k * l * m), false);
                total = add_checked(total, static_cast<i128>(mu[k] * mu[l] * mu[m]) * inner);
            }
        }
    }
    return narrow_i128(total);
}

CountReport count_height(const TrilinearForm& f, Int B, bool primitive, const CountVariant& variant,
                         int threads) {
    if (B < 1) throw std::invalid_argument("count_height: B must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    HeightCounter hc(f, variant, threads);
    CountReport rep;
    rep.form_id = f.id();
    rep.variant = variant_label(variant, f.n());
    rep.B = B;
    rep.count = hc.height_count(B, primitive);
    rep.seconds = seconds_since(t0);
    return rep;
}

long long moebius_primitive(const TrilinearForm& f, Int B, const CountVariant& variant,
                            int threads) {
    if (B < 1) throw std::invalid_argument("moebius_primitive: B must be >= 1");
    HeightCounter hc(f, variant, threads);
    return hc.moebius_sum(B);
}

long long h_function(const TrilinearForm& f, Int l1, Int l2, Int l3, const CountVariant& variant,
                     int threads) {
    if (l1 < 0 || l2 < 0 || l3 < 0)
        throw std::invalid_argument("h_function: shell indices must be >= 0");
    if (l1 == 0 || l2 == 0 || l3 == 0) {
        // A zero shell pins the corresponding vector to 0. U rejects zero
        // vectors outright (full kernel, vanishing contractions).
        if (variant.tag == CountTag::U) return 0;
        const int d = f.dim();
        if (l1 == 0 || l2 == 0) {
            // x = 0 or y = 0 makes B vanish: only All keeps these, and then
            // every z works.
            if (variant.tag != CountTag::All) return 0;
            const long long a = shell_point_count(d, l1) * shell_point_count(d, l2);
            return narrow_i128(mul_checked(static_cast<i128>(a),
                                           static_cast<i128>(shell_point_count(d, l3))));
        }
        // l3 = 0: z = 0 always solves F = 0, so this counts surviving pairs.
        if (variant.tag == CountTag::All)
            return shell_point_count(d, l1) * shell_point_count(d, l2);
        return filtered_pair_count(f, l1, l2, variant);
    }
    HeightCounter hc(f, variant, threads);
    return hc.shell(l1, l2, l3, false);
}

double scaled_projective_count(const TrilinearForm& f, double B, int lambda, int threads) {
    if (B < 1.0) throw std::invalid_argument("scaled_projective_count: B must be >= 1");
    const int n = f.n();
    // floor(B^{1/n}) with a float-safe adjustment.
    Int r = static_cast<Int>(std::floor(std::pow(B, 1.0 / n)));
    if (r < 1) r = 1;
    while (std::pow(static_cast<double>(r + 1), n) <= B) ++r;
    while (r > 1 && std::pow(static_cast<double>(r), n) > B) --r;
    return 0.125 * static_cast<double>(moebius_primitive(f, r, CountVariant::u(lambda), threads));
}

}  // namespace manin
