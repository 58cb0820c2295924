#include <cmath>

#include "kernels_impl.hpp"

namespace toposcore::simd::detail {
namespace {

void binarize(const float* in, std::size_t n, float threshold, std::uint8_t* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] >= threshold ? 1 : 0;
}

OverlapCounts overlap(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    OverlapCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        c.intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        c.union_ += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return c;
}

double sum(const float* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(x[i]);
    return s;
}

double sum_sq_dev(const float* x, std::size_t n, double mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(x[i]) - mean;
        s += d * d;
    }
    return s;
}

void affine_clamp(const float* x, std::size_t n, float shift, float scale, float lo, float hi, float* out) {
    for (std::size_t i = 0; i < n; ++i) {
        float t = (x[i] - shift) * scale;
        t = t < lo ? lo : t;
        out[i] = t > hi ? hi : t;
    }
}

double entropy_sum(const float* p, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = p[i];
        const double b = 1.0 - a;
        double h = 0.0;
        if (a > 0.0) h -= a * std::log(a);
        if (b > 0.0) h -= b * std::log(b);
        s += h;
    }
    return s;
}

bool any_within(const double* xs, const double* ys, const double* zs, std::size_t n,
                double qx, double qy, double qz, double r2) {
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        const double dz = zs[i] - qz;
        if (dx * dx + dy * dy + dz * dz <= r2) return true;
    }
    return false;
}

std::uint64_t count_nonzero(const std::uint8_t* a, std::size_t n) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += a[i] != 0;
    return c;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        Isa::scalar, binarize, overlap, sum, sum_sq_dev, affine_clamp, entropy_sum, any_within, count_nonzero,
    };
    return table;
}

}  // namespace toposcore::simd::detail
