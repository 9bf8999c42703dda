#include "manin/assemble.hpp"

#include <cmath>
#include <stdexcept>

#include "manin/enumerate.hpp"
#include "manin/expsums.hpp"

namespace manin {
namespace {

std::vector<Int> primes_up_to(Int pmax) {
    std::vector<Int> ps;
    for (Int p = 2; p <= pmax; ++p) {
        bool prime = p > 1;
        for (Int d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
        if (prime) ps.push_back(p);
    }
    return ps;
}

// Largest residue depth whose pair loop p^{2r(n+1)} stays within budget,
// but at least 1; sigma_p itself enforces the budget for that floor.
int depth_for(Int p, int n, long long budget) {
    int r = 1;
    double cost = std::pow(static_cast<double>(p), 2.0 * (n + 1));
    while (cost * std::pow(static_cast<double>(p), 2.0 * (n + 1)) <=
           static_cast<double>(budget))
        cost *= std::pow(static_cast<double>(p), 2.0 * (n + 1)), ++r;
    return r;
}

mpq_class one_minus_p_pow_cubed(Int p, int n) {
    mpz_class pn;
    mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n));
    mpq_class a(pn - 1, pn);
    a.canonicalize();
    return a * a * a;
}

double log2_sq(Int B) {
    const double lg = std::log(static_cast<double>(B));
    return lg * lg;
}

}  // namespace

mpq_class alpha_V(int n) {
    if (n < 1) throw std::invalid_argument("alpha_V: n must be >= 1");
    const long n3 = static_cast<long>(n) * n * n;
    mpq_class a(1, 2 * n3);
    a.canonicalize();
    return a;
}

long long beta_V() { return 1; }

PredictionReport assemble(const TrilinearForm& f, Int pmax, double phi, std::uint64_t samples,
                          Int Q, long long budget, std::uint64_t seed) {
    if (pmax < 2) throw std::invalid_argument("assemble: pmax must be >= 2");
    if (!(phi > 0.0)) throw std::invalid_argument("assemble: phi must be > 0");
    if (samples < 1) throw std::invalid_argument("assemble: samples must be >= 1");
    if (Q < 1) throw std::invalid_argument("assemble: Q must be >= 1");

    PredictionReport rep;
    rep.form_id = f.id();
    rep.n = f.n();
    rep.pmax = pmax;
    rep.Q = Q;
    rep.phi = phi;
    rep.samples = samples;
    rep.seed = seed;

    mpq_class prod_sigma = 1, prod_tau = 1, prod_af = 1;
    for (Int p : primes_up_to(pmax)) {
        LocalFactor lf;
        lf.p = p;
        lf.r = depth_for(p, f.n(), budget);
        const auto ld = sigma_p(f, p, lf.r, budget);
        lf.stabilized = ld.stabilized;
        lf.sigma_p = ld.value;
        const mpq_class af = one_minus_p_pow_cubed(p, f.n());
        lf.tau_p = af * ld.value;
        prod_sigma *= lf.sigma_p;
        prod_tau *= lf.tau_p;
        prod_af *= af;
        rep.local.push_back(std::move(lf));
    }
    rep.sigma_finite = prod_sigma;
    rep.tamagawa_finite = prod_tau;
    rep.series_trunc = singular_series_trunc(f, Q).partial;
    const mpq_class series_gap = rep.series_trunc - prod_sigma;
    rep.series_vs_euler = std::fabs(series_gap.get_d()) / std::fabs(prod_sigma.get_d());

    ArchParams ap;
    ap.mc.samples = samples;
    ap.mc.seed = seed;
    ap.phi = phi;
    const auto arch = sigma_infinity(f, ArchMethod::LerayFiber, ap);
    rep.J = arch.leray;

    rep.sigma = prod_sigma.get_d() * rep.J.value;
    rep.sigma_prime = rep.sigma * prod_af.get_d();
    rep.alphaV = alpha_V(f.n());
    rep.betaV = beta_V();

    const double n3 = static_cast<double>(f.n()) * f.n() * f.n();
    const double tau_inf = n3 / 8.0 * rep.J.value;
    double tau_H = tau_inf;
    for (const auto& lf : rep.local) tau_H *= lf.tau_p.get_d();
    rep.tau_H = tau_H;
    rep.C_V = rep.alphaV.get_d() * static_cast<double>(rep.betaV) * tau_H;

    // Same constant assembled the other way round; disagreement beyond float
    // bookkeeping means a factor went missing somewhere.
    const double rhs = (1.0 / 16.0) * rep.J.value * prod_tau.get_d();
    rep.identity_residual = std::fabs(rep.C_V - rhs) / std::max(std::fabs(rhs), 1e-300);
    if (rep.identity_residual > 1e-12)
        throw std::logic_error("assemble: leading-constant decomposition identity violated");
    return rep;
}

PredictionReport compare_counts(const TrilinearForm& f, const std::vector<Int>& B_list,
                                PredictionReport report, int threads) {
    const int n = f.n();
    for (Int B : B_list) {
        if (B < 1) throw std::invalid_argument("compare_counts: B must be >= 1");
        CountComparison cc;
        cc.B = B;
        cc.observed_height = count_height(f, B, false, CountVariant::u(), threads).count;
        cc.observed_projective = scaled_projective_count(f, static_cast<double>(B), 0, threads);
        cc.predicted_affine = 0.5 * n * n * report.sigma *
                              std::pow(static_cast<double>(B), n) * log2_sq(B);
        cc.predicted_projective = report.C_V * static_cast<double>(B) * log2_sq(B);
        cc.ratio_affine =
            cc.predicted_affine > 0.0 ? static_cast<double>(cc.observed_height) /
                                            cc.predicted_affine
                                      : 0.0;
        cc.ratio_projective = cc.predicted_projective > 0.0
                                  ? cc.observed_projective / cc.predicted_projective
                                  : 0.0;
        report.comparisons.push_back(cc);
    }
    return report;
}

ordered_json prediction_to_json(const PredictionReport& r) {
    ordered_json local = ordered_json::array();
    for (const auto& lf : r.local)
        local.push_back(ordered_json{{"p", lf.p},
                                     {"r", lf.r},
                                     {"stabilized", lf.stabilized},
                                     {"sigma_p", rational_to_json(lf.sigma_p)},
                                     {"tau_p", rational_to_json(lf.tau_p)}});
    ordered_json comps = ordered_json::array();
    for (const auto& c : r.comparisons)
        comps.push_back(ordered_json{{"B", c.B},
                                     {"observed_height", c.observed_height},
                                     {"observed_projective", c.observed_projective},
                                     {"predicted_affine", c.predicted_affine},
                                     {"predicted_projective", c.predicted_projective},
                                     {"ratio_affine", c.ratio_affine},
                                     {"ratio_projective", c.ratio_projective}});
    return ordered_json{{"form_id", r.form_id},
                        {"n", r.n},
                        {"pmax", r.pmax},
                        {"Q", r.Q},
                        {"phi", r.phi},
                        {"samples", r.samples},
                        {"seed", r.seed},
                        {"local", std::move(local)},
                        {"sigma_finite", rational_to_json(r.sigma_finite)},
                        {"tamagawa_finite", rational_to_json(r.tamagawa_finite)},
                        {"series_trunc", rational_to_json(r.series_trunc)},
                        {"series_vs_euler", r.series_vs_euler},
                        {"J", ordered_json{{"value", r.J.value}, {"stderr", r.J.stderr_}}},
                        {"sigma", r.sigma},
                        {"sigma_prime", r.sigma_prime},
                        {"alpha_V", rational_to_json(r.alphaV)},
                        {"beta_V", r.betaV},
                        {"tau_H", r.tau_H},
                        {"C_V", r.C_V},
                        {"identity_residual", r.identity_residual},
                        {"comparisons", std::move(comps)}};
}

PredictionReport prediction_from_json(const ordered_json& j) {
    PredictionReport r;
    r.form_id = j.at("form_id").get<std::string>();
    r.n = j.at("n").get<int>();
    r.pmax = j.at("pmax").get<Int>();
    r.Q = j.at("Q").get<Int>();
    r.phi = j.at("phi").get<double>();
    r.samples = j.at("samples").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("local")) {
        LocalFactor lf;
        lf.p = e.at("p").get<Int>();
        lf.r = e.at("r").get<int>();
        lf.stabilized = e.at("stabilized").get<bool>();
        lf.sigma_p = rational_from_json(e.at("sigma_p"));
        lf.tau_p = rational_from_json(e.at("tau_p"));
        r.local.push_back(std::move(lf));
    }
    r.sigma_finite = rational_from_json(j.at("sigma_finite"));
    r.tamagawa_finite = rational_from_json(j.at("tamagawa_finite"));
    r.series_trunc = rational_from_json(j.at("series_trunc"));
    r.series_vs_euler = j.at("series_vs_euler").get<double>();
    r.J.value = j.at("J").at("value").get<double>();
    r.J.stderr_ = j.at("J").at("stderr").get<double>();
    r.sigma = j.at("sigma").get<double>();
    r.sigma_prime = j.at("sigma_prime").get<double>();
    r.alphaV = rational_from_json(j.at("alpha_V"));
    r.betaV = j.at("beta_V").get<long long>();
    r.tau_H = j.at("tau_H").get<double>();
    r.C_V = j.at("C_V").get<double>();
    r.identity_residual = j.at("identity_residual").get<double>();
    for (const auto& e : j.at("comparisons")) {
        CountComparison c;
        c.B = e.at("B").get<Int>();
        c.observed_height = e.at("observed_height").get<long long>();
        c.observed_projective = e.at("observed_projective").get<double>();
        c.predicted_affine = e.at("predicted_affine").get<double>();
        c.predicted_projective = e.at("predicted_projective").get<double>();
        c.ratio_affine = e.at("ratio_affine").get<double>();
        c.ratio_projective = e.at("ratio_projective").get<double>();
        r.comparisons.push_back(c);
    }
    return r;
}

}  // namespace manin
