#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "manin/densities.hpp"
#include "manin/form.hpp"
#include "manin/json_io.hpp"
#include "manin/qmc.hpp"

namespace manin {

// The geometric constants of the family: Picard rank 3 (so the count carries
// log^2), alpha = 1/(2 n^3), beta = 1.

mpq_class alpha_V(int n);  // exact 1/(2 n^3)
long long beta_V();        // 1

struct LocalFactor {
    Int p = 0;
    int r = 0;             // residue depth actually used
    bool stabilized = false;
    mpq_class sigma_p = 0;
    mpq_class tau_p = 0;   // (1 - p^{-n})^3 sigma_p
};

struct CountComparison {
    Int B = 0;
    long long observed_height = 0;     // exact box-height count, all integer points
    double observed_projective = 0.0;  // sign- and scaling-normalized count
    double predicted_affine = 0.0;     // (1/2) n^2 sigma B^n log^2 B
    double predicted_projective = 0.0; // C_V B log^2 B
    double ratio_affine = 0.0;
    double ratio_projective = 0.0;
};

struct PredictionReport {
    std::string form_id;
    int n = 1;
    Int pmax = 0;
    Int Q = 0;
    double phi = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;

    std::vector<LocalFactor> local;
    mpq_class sigma_finite = 1;    // product of the sigma_p
    mpq_class tamagawa_finite = 1; // product of the tau_p
    mpq_class series_trunc = 1;    // same quantity as a Dirichlet-series truncation
    double series_vs_euler = 0.0;  // relative gap between the two finite routes

    McEstimate J{};                // archimedean density
    double sigma = 0.0;            // sigma_finite * J
    double sigma_prime = 0.0;      // sigma * prod (1 - p^{-n})^3

    mpq_class alphaV = 0;
    long long betaV = 1;
    double tau_H = 0.0;            // (n^3/8) J * prod tau_p
    double C_V = 0.0;              // alphaV * betaV * tau_H
    double identity_residual = 0.0;

    std::vector<CountComparison> comparisons;
};

// Builds the full prediction: local densities for p <= pmax (residue depth
// chosen per prime to fit the budget), the archimedean integral, and both
// decompositions of the leading constant. The two routes
//   alphaV * betaV * tau_inf * prod tau_p   and   (1/16) sigma_prime
// agree by algebra once truncations match; a relative residual above 1e-12
// raises logic_error since it can only come from broken bookkeeping.
PredictionReport assemble(const TrilinearForm& f, Int pmax, double phi, std::uint64_t samples,
                          Int Q, long long budget = kDefaultResidueBudget,
                          std::uint64_t seed = 1);

// Appends exact-count comparisons at each B in both normalizations. Ratios
// are data, not assertions; nothing is claimed about their limit.
PredictionReport compare_counts(const TrilinearForm& f, const std::vector<Int>& B_list,
                                PredictionReport report, int threads = 1);

ordered_json prediction_to_json(const PredictionReport& r);
PredictionReport prediction_from_json(const ordered_json& j);

}  // namespace manin
