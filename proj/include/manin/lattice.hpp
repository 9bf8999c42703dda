#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "manin/arith.hpp"
#include "manin/qmc.hpp"

namespace manin {

// Lattice of integer points on the hyperplane b.z = 0. Its determinant
// satisfies det^2 = (sum b_k^2) / gcd(b)^2, held exactly.
struct HyperplaneLattice {
    IntVec bvec;
    Int gcd = 0;
    mpq_class det_sq;
    double det = 0.0;
};

HyperplaneLattice lattice_det(const IntVec& b);

// Basis of the saturated kernel lattice Z^d intersect {b.z = 0}: d-1 integer
// vectors produced by unimodular column reduction of b. The Gram determinant
// of the result equals det_sq exactly.
std::vector<IntVec> kernel_basis(const IntVec& b);

mpz_class gram_determinant(const std::vector<IntVec>& basis);

enum class VolumeMethod { Exact, MonteCarlo };

struct SliceVolume {
    double value = 0.0;
    VolumeMethod method = VolumeMethod::Exact;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
    // Exact route only: value^2 as a rational (the value itself carries a
    // square-root of an integer).
    mpq_class value_sq;
};

// n-volume of the central hyperplane slice [-1,1]^d intersect {b.z = 0}.
// Exact route: |b|_2 * f(0) * 2^d with f the density of sum b_k U_k,
// U_k iid uniform on [-1,1], by exact piecewise-polynomial convolution
// (zero coefficients skipped; each contributes a free factor 2 already
// accounted for by 2^d). Monte-Carlo route: graph sampling over the free
// coordinates with a reported standard error; needs samples >= 1000.
SliceVolume slice_volume(const IntVec& b, VolumeMethod method = VolumeMethod::Exact,
                         std::uint64_t samples = 0, std::uint64_t seed = 1);

// Fast floating-point slice volume for real coefficient vectors (sampling
// paths); uses the closed-form box-spline density.
double slice_volume_real(const std::vector<double>& b);

// Predicted number of lattice points on the slice of the P3-cube:
// Vol(slice) / det * P3^n, computed exactly as gcd(b) * f(0) * 2^d * P3^n.
double predict_fiber(const IntVec& b, Int P3);

// Exact number of z in [-P3, P3]^d with b.z = 0: solve for the coordinate
// with the largest |b_k|, enumerate the rest, check integrality and range.
long long count_hyperplane_points(const IntVec& b, Int P3);

}  // namespace manin
