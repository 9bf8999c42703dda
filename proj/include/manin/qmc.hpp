#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "manin/arith.hpp"

namespace manin {

struct QmcSpec {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int batches = 8;
};

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Randomized quasi-Monte Carlo over [0,1)^dim: Halton points with one
// Cranley-Patterson shift per batch. The batch means are independent, so
// their spread gives an honest standard error for the combined estimate.
// Deterministic for a fixed spec. `f` receives one point per call.
McEstimate qmc_integrate(int dim, const QmcSpec& spec,
                         const std::function<double(const double*)>& f);

// Same pass, several integrands sharing the points (cheaper than repeating).
std::vector<McEstimate> qmc_integrate_many(
    int dim, const QmcSpec& spec,
    const std::vector<std::function<double(const double*)>>& fs);

}  // namespace manin
