// Compiled with -mavx2 (no FMA, so products are rounded exactly as in the
// scalar variant). Only reached after a runtime CPU check.

#include "kernels_impl.hpp"

#if defined(TOPOSCORE_HAVE_AVX2)

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstring>

namespace toposcore::simd::detail {
namespace {

// 8-bit compare mask -> eight 0/1 bytes.
constexpr std::array<std::uint64_t, 256> make_mask_bytes() {
    std::array<std::uint64_t, 256> t{};
    for (unsigned m = 0; m < 256; ++m) {
        std::uint64_t v = 0;
        for (unsigned b = 0; b < 8; ++b)
            if (m & (1u << b)) v |= std::uint64_t{1} << (8 * b);
        t[m] = v;
    }
    return t;
}
constexpr auto kMaskBytes = make_mask_bytes();

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline std::uint64_t hsum_epi64(__m256i v) {
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

// Natural log for positive normal floats (cephes-style range reduction and
// minimax polynomial, ~1 ulp). Callers mask out zeros.
inline __m256 log_ps(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 half = _mm256_set1_ps(0.5f);
    x = _mm256_max_ps(x, _mm256_castsi256_ps(_mm256_set1_epi32(0x00800000)));

    __m256i exp_bits = _mm256_srli_epi32(_mm256_castps_si256(x), 23);
    x = _mm256_and_ps(x, _mm256_castsi256_ps(_mm256_set1_epi32(~0x7f800000)));
    x = _mm256_or_ps(x, half);
    exp_bits = _mm256_sub_epi32(exp_bits, _mm256_set1_epi32(0x7f));
    __m256 e = _mm256_add_ps(_mm256_cvtepi32_ps(exp_bits), one);

    const __m256 below = _mm256_cmp_ps(x, _mm256_set1_ps(0.707106781186547524f), _CMP_LT_OQ);
    const __m256 tmp = _mm256_and_ps(x, below);
    x = _mm256_sub_ps(x, one);
    e = _mm256_sub_ps(e, _mm256_and_ps(one, below));
    x = _mm256_add_ps(x, tmp);

    const __m256 z = _mm256_mul_ps(x, x);
    __m256 y = _mm256_set1_ps(7.0376836292E-2f);
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(-1.1514610310E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(1.1676998740E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(-1.2420140846E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(1.4249322787E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(-1.6668057665E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(2.0000714765E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(-2.4999993993E-1f));
    y = _mm256_add_ps(_mm256_mul_ps(y, x), _mm256_set1_ps(3.3333331174E-1f));
    y = _mm256_mul_ps(_mm256_mul_ps(y, x), z);
    y = _mm256_add_ps(y, _mm256_mul_ps(e, _mm256_set1_ps(-2.12194440e-4f)));
    y = _mm256_sub_ps(y, _mm256_mul_ps(z, half));
    x = _mm256_add_ps(x, y);
    return _mm256_add_ps(x, _mm256_mul_ps(e, _mm256_set1_ps(0.693359375f)));
}

// p * ln p with the p == 0 lanes forced to 0.
inline __m256 xlogx(__m256 p) {
    const __m256 positive = _mm256_cmp_ps(p, _mm256_setzero_ps(), _CMP_GT_OQ);
    return _mm256_and_ps(_mm256_mul_ps(p, log_ps(p)), positive);
}

void binarize(const float* in, std::size_t n, float threshold, std::uint8_t* out) {
    const __m256 t = _mm256_set1_ps(threshold);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 ge = _mm256_cmp_ps(_mm256_loadu_ps(in + i), t, _CMP_GE_OQ);
        const std::uint64_t bytes = kMaskBytes[static_cast<unsigned>(_mm256_movemask_ps(ge))];
        std::memcpy(out + i, &bytes, sizeof bytes);
    }
    for (; i < n; ++i) out[i] = in[i] >= threshold ? 1 : 0;
}

OverlapCounts overlap(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc_and = zero, acc_or = zero;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc_and = _mm256_add_epi64(acc_and, _mm256_sad_epu8(_mm256_and_si256(va, vb), zero));
        acc_or = _mm256_add_epi64(acc_or, _mm256_sad_epu8(_mm256_or_si256(va, vb), zero));
    }
    OverlapCounts c{hsum_epi64(acc_and), hsum_epi64(acc_or)};
    for (; i < n; ++i) {
        c.intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        c.union_ += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return c;
}

double sum(const float* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += static_cast<double>(x[i]);
    return s;
}

double sum_sq_dev(const float* x, std::size_t n, double mean) {
    const __m256d m = _mm256_set1_pd(mean);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(v)), m);
        const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)), m);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = static_cast<double>(x[i]) - mean;
        s += d * d;
    }
    return s;
}

void affine_clamp(const float* x, std::size_t n, float shift, float scale, float lo, float hi, float* out) {
    const __m256 vs = _mm256_set1_ps(shift), vk = _mm256_set1_ps(scale);
    const __m256 vlo = _mm256_set1_ps(lo), vhi = _mm256_set1_ps(hi);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 t = _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(x + i), vs), vk);
        // max/min return the second operand on NaN, so NaN passes through as in the scalar path
        t = _mm256_max_ps(vlo, t);
        t = _mm256_min_ps(vhi, t);
        _mm256_storeu_ps(out + i, t);
    }
    for (; i < n; ++i) {
        float t = (x[i] - shift) * scale;
        t = t < lo ? lo : t;
        out[i] = t > hi ? hi : t;
    }
}

double entropy_sum(const float* p, std::size_t n) {
    const __m256 one = _mm256_set1_ps(1.0f);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 a = _mm256_loadu_ps(p + i);
        const __m256 b = _mm256_sub_ps(one, a);
        const __m256 h = _mm256_sub_ps(_mm256_setzero_ps(), _mm256_add_ps(xlogx(a), xlogx(b)));
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(h)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(h, 1)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
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
    const __m256d vx = _mm256_set1_pd(qx), vy = _mm256_set1_pd(qy), vz = _mm256_set1_pd(qz);
    const __m256d vr = _mm256_set1_pd(r2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vz);
        const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                         _mm256_mul_pd(dz, dz));
        if (_mm256_movemask_pd(_mm256_cmp_pd(d2, vr, _CMP_LE_OQ)) != 0) return true;
    }
    for (; i < n; ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        const double dz = zs[i] - qz;
        if (dx * dx + dy * dy + dz * dz <= r2) return true;
    }
    return false;
}

std::uint64_t count_nonzero(const std::uint8_t* a, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t c = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const auto zero_lanes = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
        c += 32u - static_cast<unsigned>(__builtin_popcount(zero_lanes));
    }
    for (; i < n; ++i) c += a[i] != 0;
    return c;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{
        Isa::avx2, binarize, overlap, sum, sum_sq_dev, affine_clamp, entropy_sum, any_within, count_nonzero,
    };
    return &table;
}

}  // namespace toposcore::simd::detail

#else

namespace toposcore::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace toposcore::simd::detail

#endif
