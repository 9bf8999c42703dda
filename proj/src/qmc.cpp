#include "manin/qmc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace manin {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (i) {
        x += static_cast<double>(i % base) * f;
        i /= base;
        f *= inv;
    }
    return x;
}

}  // namespace

std::vector<McEstimate> qmc_integrate_many(
    int dim, const QmcSpec& spec,
    const std::vector<std::function<double(const double*)>>& fs) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("qmc_integrate: dim must be in [1,20]");
    if (spec.batches < 2) throw std::invalid_argument("qmc_integrate: need at least 2 batches");
    if (spec.samples < static_cast<std::uint64_t>(spec.batches))
        throw std::invalid_argument("qmc_integrate: fewer samples than batches");
    const std::uint64_t per_batch = spec.samples / spec.batches;
    std::mt19937_64 gen(spec.seed);
    std::vector<std::vector<double>> batch_means(fs.size());
    std::vector<double> point(dim), shift(dim);
    for (int b = 0; b < spec.batches; ++b) {
        for (int d = 0; d < dim; ++d)
            shift[d] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        std::vector<CompensatedSum> sums(fs.size());
        for (std::uint64_t i = 1; i <= per_batch; ++i) {
            for (int d = 0; d < dim; ++d) {
                double u = radical_inverse(i, kPrimes[d]) + shift[d];
                if (u >= 1.0) u -= 1.0;
                point[d] = u;
            }
            for (std::size_t fi = 0; fi < fs.size(); ++fi) sums[fi].add(fs[fi](point.data()));
        }
        for (std::size_t fi = 0; fi < fs.size(); ++fi)
            batch_means[fi].push_back(sums[fi].value() / static_cast<double>(per_batch));
    }
    std::vector<McEstimate> out(fs.size());
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        CompensatedSum m;
        for (double v : batch_means[fi]) m.add(v);
        const double mean = m.value() / spec.batches;
        CompensatedSum var;
        for (double v : batch_means[fi]) var.add((v - mean) * (v - mean));
        const double sd = std::sqrt(var.value() / (spec.batches - 1));
        out[fi] = {mean, sd / std::sqrt(static_cast<double>(spec.batches))};
    }
    return out;
}

McEstimate qmc_integrate(int dim, const QmcSpec& spec,
                         const std::function<double(const double*)>& f) {
    return qmc_integrate_many(dim, spec, {f})[0];
}

}  // namespace manin
