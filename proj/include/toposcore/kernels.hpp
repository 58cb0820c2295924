#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference variant and,
// on x86-64, an AVX2 variant; `kernels()` picks one at first use based on the
// running CPU. Integer and elementwise kernels are bit-identical across
// variants, reductions over floats agree to rounding (summation order differs).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace toposcore::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct OverlapCounts {
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
};

struct KernelTable {
    Isa isa;

    // out[i] = in[i] >= threshold
    void (*binarize)(const float* in, std::size_t n, float threshold, std::uint8_t* out);

    // popcounts of a&b and a|b over 0/1 bytes
    OverlapCounts (*overlap)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

    // sum of x[i] accumulated in double
    double (*sum)(const float* x, std::size_t n);

    // sum of (x[i] - mean)^2 accumulated in double
    double (*sum_sq_dev)(const float* x, std::size_t n, double mean);

    // out[i] = clamp((x[i] - shift) * scale, lo, hi) evaluated in float
    void (*affine_clamp)(const float* x, std::size_t n, float shift, float scale, float lo, float hi, float* out);

    // sum of -p ln p - (1-p) ln(1-p), 0 ln 0 := 0
    double (*entropy_sum)(const float* p, std::size_t n);

    // true iff some (xs[i], ys[i], zs[i]) lies within squared distance r2 of q
    bool (*any_within)(const double* xs, const double* ys, const double* zs, std::size_t n,
                       double qx, double qy, double qz, double r2);

    // count of foreground bytes
    std::uint64_t (*count_nonzero)(const std::uint8_t* a, std::size_t n);
};

bool isa_supported(Isa isa) noexcept;

/// Variants usable on this machine, scalar first.
std::vector<Isa> supported_isas();

const KernelTable& kernels(Isa isa);

/// Best supported variant, chosen once.
const KernelTable& kernels();

}  // namespace toposcore::simd
