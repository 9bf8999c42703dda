#pragma once

#include <gmpxx.h>

#include <vector>

#include "manin/arith.hpp"

namespace manin {

// Compactly supported piecewise polynomial with rational breakpoints.
// pieces[i] holds the coefficients (constant term first) valid on
// [breaks[i], breaks[i+1]); the function is 0 outside [breaks.front(),
// breaks.back()].
struct PiecewisePoly {
    std::vector<mpq_class> breaks;
    std::vector<std::vector<mpq_class>> pieces;

    mpq_class eval(const mpq_class& x) const;
};

// Density of c*U for U uniform on [-1,1]: the constant 1/(2c) on [-c, c].
PiecewisePoly uniform_density(const mpq_class& c);

// Density of S + c*U for S with density f and independent U uniform on
// [-1,1]: g(x) = (F(x+c) - F(x-c)) / (2c) with F the CDF of f. Exact.
PiecewisePoly convolve_uniform(const PiecewisePoly& f, const mpq_class& c);

// Density at 0 of sum_k c_k U_k, U_k iid uniform on [-1,1]; all c_k > 0.
// Computed by repeated exact convolution.
mpq_class density_at_zero(const std::vector<mpq_class>& cs);

// Same quantity from the closed-form box-spline expansion (floating point);
// used on the sampling fast path and as an independent route in tests.
double density_at_zero_real(const std::vector<double>& cs);

}  // namespace manin
