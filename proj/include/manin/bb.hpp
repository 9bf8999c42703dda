#pragma once

#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "manin/arith.hpp"
#include "manin/enumerate.hpp"
#include "manin/form.hpp"

namespace manin {

// Parameter tuple for the hyperbolic summation method: the growth exponent
// beta, leading and secondary constants C and D, and the exponents alpha,
// delta controlling the error terms. Only beta enters the computations here;
// the rest travel with reports.
struct BBParams {
    double beta = 1.0;
    double C = 0.0;
    double D = 0.0;
    double alpha = 1.0;
    double delta = 1.0;
};

void validate_bb(const BBParams& p);  // finite, beta > 0, alpha in (0,1], delta > 0

using TripleFn = std::function<long long(Int, Int, Int)>;

// Exact sum of h over l*m*n <= P using divisor-ordered loops. The innermost
// index runs downward so that callers backed by incremental shell tables see
// their largest argument first.
long long sum_hyperbolic(const TripleFn& h, Int P);

// Caching adapter from a form's shell counts to a triple function. Safe to
// share across several sums; pass by reference into lambdas.
class ShellFunction {
public:
    explicit ShellFunction(TrilinearForm f, CountVariant variant = CountVariant::u(),
                           int threads = 1);
    long long operator()(Int l, Int m, Int n);

private:
    HeightCounter counter_;
    std::map<std::tuple<Int, Int, Int>, long long> cache_;
};

struct FitPoint {
    Int P = 0;
    long long S = 0;     // exact hyperbolic sum at P
    double scaled = 0.0; // S / P^beta
    double fitted = 0.0; // model value at P
};

struct FitResult {
    double beta = 1.0;
    double a = 0.0, b = 0.0, c = 0.0;  // coefficients of log^2 P, log P, 1
    double C_hat = 0.0;                // 2a / beta^2
    double rms_residual = 0.0;         // on the scaled values
    std::vector<FitPoint> points;
};

// Least-squares fit of S(P)/P^beta against a log^2 P + b log P + c. The model
// keeps all three coefficients because the subleading log term is far from
// negligible at accessible P; the leading constant is read off as 2a/beta^2.
FitResult fit_leading(const TripleFn& h, const std::vector<Int>& P_list, double beta = 1.0);

struct TwoWindowRow {
    Int l = 0, m = 0;      // m unused (0) in the c1 table
    double narrow = 0.0;   // value from the smaller window
    double wide = 0.0;     // value from the larger window
    double rel_dev = 0.0;  // |narrow - wide| / max(|narrow|, |wide|)
};

struct BBConditionReport {
    BBParams params;
    Int window_narrow = 0, window_wide = 0;
    std::vector<TwoWindowRow> c1;  // c1(l): double-axis partial sums / (MN)^beta
    std::vector<TwoWindowRow> c3;  // c3(l,m): single-axis partial sums / N^beta
    Int L = 0;                     // edge of the full box
    double box_scaled = 0.0;       // full-box sum / (L^3)^beta
};

// Empirical tabulation of the summation-method conditions: each c-function is
// evaluated over two nested windows and the relative deviation is reported.
// Nothing is asserted here; the implied constants are unspecified, so this is
// a diagnostic, not a theorem check.
BBConditionReport spot_check_conditions(const TripleFn& h, const BBParams& params, Int budget);
BBConditionReport spot_check_conditions(const TrilinearForm& f, const BBParams& params, Int budget,
                                        int threads = 1);

}  // namespace manin
