#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "manin/assemble.hpp"
#include "manin/bb.hpp"
#include "manin/densities.hpp"
#include "manin/enumerate.hpp"
#include "manin/expsums.hpp"
#include "manin/fiber.hpp"
#include "manin/form.hpp"
#include "manin/json_io.hpp"
#include "manin/lattice.hpp"

using namespace manin;

namespace {

int default_threads() {
    if (const char* env = std::getenv("MANIN_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

IntVec parse_vec(const std::string& s) {
    IntVec v;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t used = 0;
        try {
            v.push_back(std::stoll(s.substr(pos), &used));
        } catch (const std::exception&) {
            throw std::invalid_argument("vector literal \"" + s + "\": expected integers");
        }
        pos += used;
        if (pos == s.size()) break;
        if (s[pos] != ',')
            throw std::invalid_argument("vector literal \"" + s + "\": expected ','");
        ++pos;
    }
    if (v.empty()) throw std::invalid_argument("empty vector literal");
    return v;
}

CountVariant parse_variant(const std::string& name, int lambda) {
    if (name == "all") return CountVariant::all();
    if (name == "nondeg3") return CountVariant::nondeg3();
    if (name == "n1") return CountVariant::n1(lambda);
    if (name == "nprime") return CountVariant::nprime(lambda);
    if (name == "u") return CountVariant::u(lambda);
    throw std::invalid_argument("unknown variant \"" + name +
                                "\" (expected all|nondeg3|n1|nprime|u)");
}

void emit(const ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream o(out_path);
    if (!o) throw std::invalid_argument("cannot open output file: " + out_path);
    o << j.dump(2) << "\n";
}

ordered_json report_json(const CountReport& r) {
    return ordered_json{{"form_id", r.form_id}, {"variant", r.variant}, {"P1", r.P1},
                        {"P2", r.P2},           {"P3", r.P3},           {"B", r.B},
                        {"count", r.count},     {"seconds", r.seconds}};
}

void append_csv(const std::string& path, const CountReport& r) {
    namespace fs = std::filesystem;
    const bool header = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream o(path, std::ios::app);
    if (!o) throw std::invalid_argument("cannot open csv file: " + path);
    if (header) o << "form_id,variant,P1,P2,P3,B,count,seconds\n";
    o << r.form_id << ',' << r.variant << ',' << r.P1 << ',' << r.P2 << ',' << r.P3 << ','
      << r.B << ',' << r.count << ',' << r.seconds << '\n';
}

ordered_json mc_json(const McEstimate& e) {
    return ordered_json{{"value", e.value}, {"stderr", e.stderr_}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"counting toolkit for trilinear hypersurfaces"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random generic form");
    int gen_n = 1;
    Int gen_bound = 3;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "block dimension minus one")->required();
    gen->add_option("--bound", gen_bound, "coefficient bound");
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--out", gen_out, "output path (default stdout)");
    gen->callback([&] {
        const auto f = random_generic_form(gen_n, gen_bound, gen_seed);
        emit(form_to_json(f), gen_out);
    });

    // count
    auto* count = app.add_subcommand("count", "exact point counts");
    std::string cnt_form, cnt_mode, cnt_variant = "u", cnt_csv, cnt_out;
    Int cnt_P1 = 0, cnt_P2 = 0, cnt_P3 = 0, cnt_B = 1, cnt_l1 = 0, cnt_l2 = 0, cnt_l3 = 0;
    int cnt_lambda = 0, cnt_threads = default_threads();
    bool cnt_primitive = false;
    count->add_option("--form", cnt_form, "form file")->required();
    count->add_option("--mode", cnt_mode, "box|height|shell")->required();
    count->add_option("--P1", cnt_P1);
    count->add_option("--P2", cnt_P2);
    count->add_option("--P3", cnt_P3);
    count->add_option("--B", cnt_B, "height bound");
    count->add_flag("--primitive", cnt_primitive, "count primitive triples (height mode)");
    count->add_option("--l1", cnt_l1);
    count->add_option("--l2", cnt_l2);
    count->add_option("--l3", cnt_l3);
    count->add_option("--variant", cnt_variant, "all|nondeg3|n1|nprime|u");
    count->add_option("--lambda", cnt_lambda, "admissibility threshold (0 = default n)");
    count->add_option("--threads", cnt_threads, "worker count");
    count->add_option("--csv", cnt_csv, "append a CSV row (box and height modes)");
    count->add_option("--out", cnt_out, "output path (default stdout)");
    count->callback([&] {
        const auto f = load_form_file(cnt_form);
        const auto variant = parse_variant(cnt_variant, cnt_lambda);
        if (cnt_mode == "box" || cnt_mode == "height") {
            const CountReport rep =
                cnt_mode == "box"
                    ? count_box(f, cnt_P1, cnt_P2, cnt_P3, variant, cnt_threads)
                    : count_height(f, cnt_B, cnt_primitive, variant, cnt_threads);
            if (!cnt_csv.empty()) append_csv(cnt_csv, rep);
            emit(report_json(rep), cnt_out);
        } else if (cnt_mode == "shell") {
            if (!cnt_csv.empty())
                throw std::invalid_argument("shell mode does not write CSV rows");
            const auto t0 = std::chrono::steady_clock::now();
            const long long c = h_function(f, cnt_l1, cnt_l2, cnt_l3, variant, cnt_threads);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            emit(ordered_json{{"form_id", f.id()},
                              {"variant", variant_label(variant, f.n())},
                              {"l1", cnt_l1},
                              {"l2", cnt_l2},
                              {"l3", cnt_l3},
                              {"count", c},
                              {"seconds", secs}},
                 cnt_out);
        } else {
            throw std::invalid_argument("unknown mode \"" + cnt_mode +
                                        "\" (expected box|height|shell)");
        }
    });

    // fiber
    auto* fiber = app.add_subcommand("fiber", "one hyperplane section: lattice data and counts");
    std::string fib_form, fib_x, fib_y, fib_out;
    Int fib_P3 = 100;
    fiber->add_option("--form", fib_form)->required();
    fiber->add_option("--x", fib_x, "comma-separated x")->required();
    fiber->add_option("--y", fib_y, "comma-separated y")->required();
    fiber->add_option("--P3", fib_P3);
    fiber->add_option("--out", fib_out);
    fiber->callback([&] {
        const auto f = load_form_file(fib_form);
        const auto x = parse_vec(fib_x), y = parse_vec(fib_y);
        const auto b = contract(f, BilinearKind::B, x, y);
        if (b.is_zero()) throw std::domain_error("degenerate pair: B(x,y) = 0");
        const auto lat = lattice_det(b.values);
        const auto vol = slice_volume(b.values);
        emit(ordered_json{{"x", x},
                          {"y", y},
                          {"bvec", b.values},
                          {"gcd", lat.gcd},
                          {"det_sq", rational_to_json(lat.det_sq)},
                          {"det", lat.det},
                          {"volume", vol.value},
                          {"volume_sq", rational_to_json(vol.value_sq)},
                          {"predicted", predict_fiber(b.values, fib_P3)},
                          {"exact", count_hyperplane_points(b.values, fib_P3)},
                          {"P3", fib_P3}},
             fib_out);
    });

    // series
    auto* series = app.add_subcommand("series", "truncated singular series");
    std::string ser_form, ser_out;
    Int ser_Q = 12;
    series->add_option("--form", ser_form)->required();
    series->add_option("--Q", ser_Q)->required();
    series->add_option("--out", ser_out);
    series->callback([&] {
        const auto f = load_form_file(ser_form);
        const auto tr = singular_series_trunc(f, ser_Q);
        ordered_json terms = ordered_json::array();
        for (const auto& [q, a] : tr.terms)
            terms.push_back(ordered_json{{"q", q}, {"A", rational_to_json(a)}});
        emit(ordered_json{{"form_id", f.id()},
                          {"Q", tr.Q},
                          {"terms", std::move(terms)},
                          {"partial", rational_to_json(tr.partial)},
                          {"tail_estimate", tr.tail_estimate}},
             ser_out);
    });

    // osc
    auto* osc = app.add_subcommand("osc", "oscillatory integrals");
    std::string osc_form, osc_out;
    double osc_phi = 0.0, osc_beta = 0.0;
    bool osc_have_beta = false;
    std::uint64_t osc_samples = 1'000'000, osc_seed = 1;
    osc->add_option("--form", osc_form)->required();
    osc->add_option("--phi", osc_phi, "truncation height for the kernel integral");
    auto* beta_opt = osc->add_option("--beta", osc_beta, "frequency for the plain integral");
    osc->add_option("--samples", osc_samples);
    osc->add_option("--seed", osc_seed);
    osc->add_option("--out", osc_out);
    osc->callback([&] {
        osc_have_beta = beta_opt->count() > 0;
        const auto f = load_form_file(osc_form);
        QuadSpec quad;
        quad.mc.samples = osc_samples;
        quad.mc.seed = osc_seed;
        if (osc_have_beta) {
            const auto est = I_beta_est(f, osc_beta, quad);
            emit(ordered_json{{"form_id", f.id()},
                              {"kind", "I"},
                              {"beta", osc_beta},
                              {"estimate", mc_json(est)},
                              {"samples", osc_samples},
                              {"seed", osc_seed}},
                 osc_out);
            return;
        }
        if (!(osc_phi > 0.0))
            throw std::invalid_argument("osc: provide --phi > 0 or --beta");
        const auto ests = J_of_phi_many(f, {osc_phi, osc_phi / 2.0}, quad);
        emit(ordered_json{{"form_id", f.id()},
                          {"kind", "J"},
                          {"phi", osc_phi},
                          {"estimate", mc_json(ests[0])},
                          {"half_phi_estimate", mc_json(ests[1])},
                          {"samples", osc_samples},
                          {"seed", osc_seed}},
             osc_out);
    });

    // arcs
    auto* arcs = app.add_subcommand("arcs", "major-arc membership");
    double arc_alpha = 0.0, arc_theta = 0.05, arc_P = 100.0;
    Int arc_q = 1, arc_a = 0;
    std::string arc_out;
    arcs->add_option("--alpha", arc_alpha)->required();
    arcs->add_option("--q", arc_q)->required();
    arcs->add_option("--a", arc_a)->required();
    arcs->add_option("--theta", arc_theta);
    arcs->add_option("--P", arc_P);
    arcs->add_option("--out", arc_out);
    arcs->callback([&] {
        ArcSpec spec;
        spec.a = arc_a;
        spec.q = arc_q;
        spec.theta = arc_theta;
        spec.P = arc_P;
        validate_arc(spec);
        emit(ordered_json{{"alpha", arc_alpha},
                          {"a", spec.a},
                          {"q", spec.q},
                          {"theta", spec.theta},
                          {"P", spec.P},
                          {"q_bound_constant", 1},
                          {"width", spec.q * std::pow(spec.P, 2.0 * spec.theta - 1.0)},
                          {"in_arc", in_major_arc(arc_alpha, spec)}},
             arc_out);
    });

    // sigma-p
    auto* sp = app.add_subcommand("sigma-p", "p-adic density by residue counting");
    std::string sp_form, sp_out;
    Int sp_p = 2;
    int sp_rmax = 2;
    long long sp_budget = kDefaultResidueBudget;
    sp->add_option("--form", sp_form)->required();
    sp->add_option("--p", sp_p)->required();
    sp->add_option("--rmax", sp_rmax);
    sp->add_option("--budget", sp_budget, "residue-pair budget");
    sp->add_option("--out", sp_out);
    sp->callback([&] {
        const auto f = load_form_file(sp_form);
        const auto ld = sigma_p(f, sp_p, sp_rmax, sp_budget);
        ordered_json seq = ordered_json::array();
        for (const auto& [r, v] : ld.seq)
            seq.push_back(ordered_json{{"r", r}, {"value", rational_to_json(v)}});
        emit(ordered_json{{"form_id", f.id()},
                          {"p", ld.p},
                          {"rmax", sp_rmax},
                          {"seq", std::move(seq)},
                          {"stabilized", ld.stabilized},
                          {"value", rational_to_json(ld.value)}},
             sp_out);
    });

    // sigma-inf
    auto* si = app.add_subcommand("sigma-inf", "archimedean density");
    std::string si_form, si_method = "leray", si_out;
    double si_phi = 16.0;
    std::uint64_t si_samples = 1'000'000, si_seed = 1;
    si->add_option("--form", si_form)->required();
    si->add_option("--method", si_method, "leray|sinc|both");
    si->add_option("--phi", si_phi);
    si->add_option("--samples", si_samples);
    si->add_option("--seed", si_seed);
    si->add_option("--out", si_out);
    si->callback([&] {
        const auto f = load_form_file(si_form);
        ArchMethod m;
        if (si_method == "leray")
            m = ArchMethod::LerayFiber;
        else if (si_method == "sinc")
            m = ArchMethod::Sinc;
        else if (si_method == "both")
            m = ArchMethod::Both;
        else
            throw std::invalid_argument("unknown method \"" + si_method +
                                        "\" (expected leray|sinc|both)");
        ArchParams ap;
        ap.mc.samples = si_samples;
        ap.mc.seed = si_seed;
        ap.phi = si_phi;
        const auto d = sigma_infinity(f, m, ap);
        ordered_json out{{"form_id", f.id()},
                         {"method", si_method},
                         {"phi", si_phi},
                         {"samples", si_samples},
                         {"seed", si_seed}};
        if (d.have_leray) out["leray"] = mc_json(d.leray);
        if (d.have_sinc) {
            out["sinc"] = mc_json(d.sinc);
            out["sinc_tail"] = d.sinc_tail;
        }
        emit(out, si_out);
    });

    // fiber-density
    auto* fd = app.add_subcommand("fiber-density", "per-point congruence series and integral");
    std::string fd_form, fd_x, fd_method = "leray", fd_out;
    Int fd_Q = 12;
    double fd_phi = 16.0;
    int fd_lambda = 0;
    std::uint64_t fd_samples = 200'000, fd_seed = 1;
    fd->add_option("--form", fd_form)->required();
    fd->add_option("--x", fd_x)->required();
    fd->add_option("--Q", fd_Q);
    fd->add_option("--phi", fd_phi);
    fd->add_option("--method", fd_method, "leray|sinc");
    fd->add_option("--lambda", fd_lambda);
    fd->add_option("--samples", fd_samples);
    fd->add_option("--seed", fd_seed);
    fd->add_option("--out", fd_out);
    fd->callback([&] {
        const auto f = load_form_file(fd_form);
        const auto x = parse_vec(fd_x);
        ArchMethod m;
        if (fd_method == "leray")
            m = ArchMethod::LerayFiber;
        else if (fd_method == "sinc")
            m = ArchMethod::Sinc;
        else
            throw std::invalid_argument("unknown method \"" + fd_method +
                                        "\" (expected leray|sinc)");
        FiberJParams p;
        p.mc.samples = fd_samples;
        p.mc.seed = fd_seed;
        p.phi = fd_phi;
        const auto d = fiber_density(f, x, fd_Q, m, p, fd_lambda);
        emit(ordered_json{{"form_id", f.id()},
                          {"x", d.x},
                          {"Q", d.Q},
                          {"method", fd_method},
                          {"series", rational_to_json(d.series_trunc)},
                          {"J", mc_json(d.J_x)},
                          {"phi", d.phi},
                          {"samples", fd_samples},
                          {"seed", fd_seed}},
             fd_out);
    });

    // bb-sum
    auto* bb = app.add_subcommand("bb-sum", "hyperbolic shell sums and leading-constant fit");
    std::string bb_form, bb_fit, bb_out;
    Int bb_P = 16, bb_spot = 0;
    double bb_beta = 0.0;
    int bb_threads = default_threads(), bb_lambda = 0;
    bb->add_option("--form", bb_form)->required();
    bb->add_option("--P", bb_P)->required();
    bb->add_option("--fit", bb_fit, "comma-separated P list for the fit");
    bb->add_option("--beta", bb_beta, "growth exponent (default n)");
    bb->add_option("--spot", bb_spot, "window budget for condition spot checks");
    bb->add_option("--lambda", bb_lambda);
    bb->add_option("--threads", bb_threads);
    bb->add_option("--out", bb_out);
    bb->callback([&] {
        const auto f = load_form_file(bb_form);
        const double beta = bb_beta > 0.0 ? bb_beta : static_cast<double>(f.n());
        ShellFunction sf(f, CountVariant::u(bb_lambda), bb_threads);
        const TripleFn h = [&sf](Int l, Int m, Int n) { return sf(l, m, n); };
        ordered_json out{{"form_id", f.id()},
                         {"P", bb_P},
                         {"beta", beta},
                         {"sum", sum_hyperbolic(h, bb_P)}};
        if (!bb_fit.empty()) {
            const auto Ps = parse_vec(bb_fit);
            const auto fit = fit_leading(h, Ps, beta);
            ordered_json pts = ordered_json::array();
            for (const auto& pt : fit.points)
                pts.push_back(ordered_json{{"P", pt.P},
                                           {"S", pt.S},
                                           {"scaled", pt.scaled},
                                           {"fitted", pt.fitted}});
            out["fit"] = ordered_json{{"C_hat", fit.C_hat},
                                      {"a", fit.a},
                                      {"b", fit.b},
                                      {"c", fit.c},
                                      {"rms_residual", fit.rms_residual},
                                      {"points", std::move(pts)}};
        }
        if (bb_spot > 0) {
            BBParams params;
            params.beta = beta;
            const auto rep = spot_check_conditions(h, params, bb_spot);
            ordered_json c1 = ordered_json::array(), c3 = ordered_json::array();
            for (const auto& r : rep.c1)
                c1.push_back(ordered_json{{"l", r.l},
                                          {"narrow", r.narrow},
                                          {"wide", r.wide},
                                          {"rel_dev", r.rel_dev}});
            for (const auto& r : rep.c3)
                c3.push_back(ordered_json{{"l", r.l},
                                          {"m", r.m},
                                          {"narrow", r.narrow},
                                          {"wide", r.wide},
                                          {"rel_dev", r.rel_dev}});
            out["spot"] = ordered_json{{"window_narrow", rep.window_narrow},
                                       {"window_wide", rep.window_wide},
                                       {"c1", std::move(c1)},
                                       {"c3", std::move(c3)},
                                       {"box_scaled", rep.box_scaled}};
        }
        emit(out, bb_out);
    });

    // predict / compare share the assembly knobs.
    std::string pr_form, pr_out, cp_form, cp_B, cp_out;
    Int pr_pmax = 7, pr_Q = 12, cp_pmax = 7, cp_Q = 12;
    double pr_phi = 16.0, cp_phi = 16.0;
    std::uint64_t pr_samples = 1'000'000, pr_seed = 1, cp_samples = 200'000, cp_seed = 1;
    long long pr_budget = kDefaultResidueBudget, cp_budget = kDefaultResidueBudget;
    int cp_threads = default_threads();

    auto* predict = app.add_subcommand("predict", "assemble the leading constant");
    predict->add_option("--form", pr_form)->required();
    predict->add_option("--pmax", pr_pmax);
    predict->add_option("--phi", pr_phi);
    predict->add_option("--samples", pr_samples);
    predict->add_option("--seed", pr_seed);
    predict->add_option("--Q", pr_Q);
    predict->add_option("--budget", pr_budget);
    predict->add_option("--out", pr_out);
    predict->callback([&] {
        const auto f = load_form_file(pr_form);
        auto rep = assemble(f, pr_pmax, pr_phi, pr_samples, pr_Q, pr_budget, pr_seed);
        emit(prediction_to_json(rep), pr_out);
    });

    auto* compare = app.add_subcommand("compare", "prediction vs exact counts");
    compare->add_option("--form", cp_form)->required();
    compare->add_option("--B", cp_B, "comma-separated height bounds")->required();
    compare->add_option("--pmax", cp_pmax);
    compare->add_option("--phi", cp_phi);
    compare->add_option("--samples", cp_samples);
    compare->add_option("--seed", cp_seed);
    compare->add_option("--Q", cp_Q);
    compare->add_option("--budget", cp_budget);
    compare->add_option("--threads", cp_threads);
    compare->add_option("--out", cp_out);
    compare->callback([&] {
        const auto f = load_form_file(cp_form);
        auto rep = assemble(f, cp_pmax, cp_phi, cp_samples, cp_Q, cp_budget, cp_seed);
        rep = compare_counts(f, parse_vec(cp_B), std::move(rep), cp_threads);
        emit(prediction_to_json(rep), cp_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
