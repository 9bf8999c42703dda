#include "manin/bb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace manin {
namespace {

double rel_dev(double a, double b) {
    const double denom = std::max(std::fabs(a), std::fabs(b));
    if (denom == 0.0) return 0.0;
    return std::fabs(a - b) / denom;
}

// Solves the 3x3 system m x = r in place by Gaussian elimination.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> r) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::fabs(m[row][col]) > std::fabs(m[piv][col])) piv = row;
        if (std::fabs(m[piv][col]) < 1e-12)
            throw std::runtime_error("fit_leading: singular normal equations");
        std::swap(m[col], m[piv]);
        std::swap(r[col], r[piv]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
            r[row] -= f * r[col];
        }
    }
    std::array<double, 3> x{};
    for (int col = 2; col >= 0; --col) {
        double s = r[col];
        for (int k = col + 1; k < 3; ++k) s -= m[col][k] * x[k];
        x[col] = s / m[col][col];
    }
    return x;
}

}  // namespace

void validate_bb(const BBParams& p) {
    const bool finite = std::isfinite(p.beta) && std::isfinite(p.C) && std::isfinite(p.D) &&
                        std::isfinite(p.alpha) && std::isfinite(p.delta);
    if (!finite) throw std::invalid_argument("bb params: all fields must be finite");
    if (p.beta <= 0.0) throw std::invalid_argument("bb params: beta must be > 0");
    if (p.alpha <= 0.0 || p.alpha > 1.0)
        throw std::invalid_argument("bb params: alpha must lie in (0, 1]");
    if (p.delta <= 0.0) throw std::invalid_argument("bb params: delta must be > 0");
}

long long sum_hyperbolic(const TripleFn& h, Int P) {
    i128 total = 0;
    for (Int l = 1; l <= P; ++l)
        for (Int m = 1; l * m <= P; ++m)
            for (Int n = P / (l * m); n >= 1; --n)
                total = add_checked(total, static_cast<i128>(h(l, m, n)));
    return narrow_i128(total);
}

ShellFunction::ShellFunction(TrilinearForm f, CountVariant variant, int threads)
    : counter_(std::move(f), variant, threads) {}

long long ShellFunction::operator()(Int l, Int m, Int n) {
    const auto key = std::make_tuple(l, m, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const long long v = counter_.shell(l, m, n, false);
    cache_.emplace(key, v);
    return v;
}

FitResult fit_leading(const TripleFn& h, const std::vector<Int>& P_list, double beta) {
    if (P_list.size() < 3)
        throw std::invalid_argument("fit_leading: need at least three sample sizes");
    for (std::size_t i = 0; i < P_list.size(); ++i) {
        if (P_list[i] < 1) throw std::invalid_argument("fit_leading: P must be >= 1");
        if (i > 0 && P_list[i] <= P_list[i - 1])
            throw std::invalid_argument("fit_leading: P values must increase");
    }
    if (!(beta > 0.0)) throw std::invalid_argument("fit_leading: beta must be > 0");

    FitResult out;
    out.beta = beta;
    out.points.reserve(P_list.size());
    std::array<std::array<double, 3>, 3> mtm{};
    std::array<double, 3> mty{};
    for (Int P : P_list) {
        FitPoint pt;
        pt.P = P;
        pt.S = sum_hyperbolic(h, P);
        pt.scaled = static_cast<double>(pt.S) / std::pow(static_cast<double>(P), beta);
        const double lg = std::log(static_cast<double>(P));
        const std::array<double, 3> row{lg * lg, lg, 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) mtm[i][j] += row[i] * row[j];
            mty[i] += row[i] * pt.scaled;
        }
        out.points.push_back(pt);
    }
    const auto coeff = solve3(mtm, mty);
    out.a = coeff[0];
    out.b = coeff[1];
    out.c = coeff[2];
    out.C_hat = 2.0 * out.a / (beta * beta);

    double ss = 0.0;
    for (auto& pt : out.points) {
        const double lg = std::log(static_cast<double>(pt.P));
        pt.fitted = out.a * lg * lg + out.b * lg + out.c;
        const double r = pt.scaled - pt.fitted;
        ss += r * r;
    }
    out.rms_residual = std::sqrt(ss / static_cast<double>(out.points.size()));
    return out;
}

BBConditionReport spot_check_conditions(const TripleFn& h, const BBParams& params, Int budget) {
    validate_bb(params);
    if (budget < 2) throw std::invalid_argument("spot_check_conditions: budget must be >= 2");
    BBConditionReport rep;
    rep.params = params;
    rep.window_narrow = std::max<Int>(1, budget / 2);
    rep.window_wide = budget;
    const double beta = params.beta;

    auto double_axis = [&](Int l, Int W) {
        i128 s = 0;
        for (Int m = 1; m <= W; ++m)
            for (Int n = 1; n <= W; ++n) s = add_checked(s, static_cast<i128>(h(l, m, n)));
        return static_cast<double>(s) / std::pow(static_cast<double>(W), 2.0 * beta);
    };
    auto single_axis = [&](Int l, Int m, Int W) {
        i128 s = 0;
        for (Int n = 1; n <= W; ++n) s = add_checked(s, static_cast<i128>(h(l, m, n)));
        return static_cast<double>(s) / std::pow(static_cast<double>(W), beta);
    };

    for (Int l = 1; l <= 2; ++l) {
        TwoWindowRow row;
        row.l = l;
        row.narrow = double_axis(l, rep.window_narrow);
        row.wide = double_axis(l, rep.window_wide);
        row.rel_dev = rel_dev(row.narrow, row.wide);
        rep.c1.push_back(row);
    }
    for (Int l = 1; l <= 2; ++l)
        for (Int m = 1; m <= 2; ++m) {
            TwoWindowRow row;
            row.l = l;
            row.m = m;
            row.narrow = single_axis(l, m, rep.window_narrow);
            row.wide = single_axis(l, m, rep.window_wide);
            row.rel_dev = rel_dev(row.narrow, row.wide);
            rep.c3.push_back(row);
        }

    rep.L = budget;
    i128 box = 0;
    for (Int l = 1; l <= budget; ++l)
        for (Int m = 1; m <= budget; ++m)
            for (Int n = 1; n <= budget; ++n) box = add_checked(box, static_cast<i128>(h(l, m, n)));
    rep.box_scaled =
        static_cast<double>(box) / std::pow(static_cast<double>(budget), 3.0 * beta);
    return rep;
}

BBConditionReport spot_check_conditions(const TrilinearForm& f, const BBParams& params, Int budget,
                                        int threads) {
    ShellFunction sf(f, CountVariant::u(), threads);
    return spot_check_conditions([&sf](Int l, Int m, Int n) { return sf(l, m, n); }, params,
                                 budget);
}

}  // namespace manin
