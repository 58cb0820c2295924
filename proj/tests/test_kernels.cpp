#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "toposcore/kernels.hpp"

using namespace toposcore::simd;

namespace {

// Sizes around the vector widths to exercise every tail length.
const std::vector<std::size_t> kSizes{0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 257, 4099};

std::vector<float> random_unit(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<std::uint8_t> random_mask(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> v(n);
    for (auto& x : v) x = static_cast<std::uint8_t>(rng() % 3 == 0);
    return v;
}

class KernelEquivalence : public ::testing::TestWithParam<Isa> {
protected:
    const KernelTable& ref = kernels(Isa::scalar);
    const KernelTable& k = kernels(GetParam());
};

}  // namespace

TEST(KernelDispatch, ScalarAlwaysAvailable) {
    const auto isas = supported_isas();
    ASSERT_FALSE(isas.empty());
    EXPECT_EQ(isas.front(), Isa::scalar);
    EXPECT_TRUE(isa_supported(Isa::scalar));
    EXPECT_TRUE(isa_supported(kernels().isa));
}

TEST_P(KernelEquivalence, BinarizeIsBitExact) {
    for (std::size_t n : kSizes) {
        auto in = random_unit(n, n + 1);
        if (n > 4) in[3] = 0.5f;  // exact tie
        std::vector<std::uint8_t> a(n), b(n);
        ref.binarize(in.data(), n, 0.5f, a.data());
        k.binarize(in.data(), n, 0.5f, b.data());
        EXPECT_EQ(a, b) << "n=" << n;
    }
}

TEST_P(KernelEquivalence, OverlapAndCountAreExact) {
    for (std::size_t n : kSizes) {
        const auto a = random_mask(n, 2 * n + 1);
        const auto b = random_mask(n, 2 * n + 2);
        const auto r = ref.overlap(a.data(), b.data(), n);
        const auto s = k.overlap(a.data(), b.data(), n);
        EXPECT_EQ(r.intersection, s.intersection) << "n=" << n;
        EXPECT_EQ(r.union_, s.union_) << "n=" << n;
        EXPECT_EQ(ref.count_nonzero(a.data(), n), k.count_nonzero(a.data(), n)) << "n=" << n;
    }
}

TEST_P(KernelEquivalence, LargeOverlapDoesNotOverflowLanes) {
    // more than 255 * 32 set bytes forces the accumulators past a byte lane
    const std::size_t n = 100000;
    std::vector<std::uint8_t> ones(n, 1);
    EXPECT_EQ(k.overlap(ones.data(), ones.data(), n).intersection, n);
    EXPECT_EQ(k.count_nonzero(ones.data(), n), n);
}

TEST_P(KernelEquivalence, AffineClampIsBitExact) {
    for (std::size_t n : kSizes) {
        auto in = random_unit(n, 3 * n + 1);
        for (auto& x : in) x = x * 20.0f - 10.0f;
        if (n > 2) in[1] = std::numeric_limits<float>::quiet_NaN();
        std::vector<float> a(n), b(n);
        ref.affine_clamp(in.data(), n, 0.25f, 0.7f, -3.0f, 3.0f, a.data());
        k.affine_clamp(in.data(), n, 0.25f, 0.7f, -3.0f, 3.0f, b.data());
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isnan(a[i])) EXPECT_TRUE(std::isnan(b[i]));
            else EXPECT_EQ(a[i], b[i]) << "n=" << n << " i=" << i;
        }
    }
}

TEST_P(KernelEquivalence, ReductionsAgreeToRounding) {
    for (std::size_t n : kSizes) {
        const auto in = random_unit(n, 5 * n + 1);
        const double s_ref = ref.sum(in.data(), n);
        EXPECT_NEAR(s_ref, k.sum(in.data(), n), 1e-9 * (1.0 + s_ref));
        const double mean = n ? s_ref / static_cast<double>(n) : 0.0;
        const double d_ref = ref.sum_sq_dev(in.data(), n, mean);
        EXPECT_NEAR(d_ref, k.sum_sq_dev(in.data(), n, mean), 1e-9 * (1.0 + d_ref));
    }
}

TEST_P(KernelEquivalence, EntropyAgreesClosely) {
    for (std::size_t n : kSizes) {
        auto in = random_unit(n, 7 * n + 1);
        if (n > 3) {
            in[0] = 0.0f;
            in[1] = 1.0f;
            in[2] = 1e-30f;
        }
        const double e_ref = ref.entropy_sum(in.data(), n);
        EXPECT_NEAR(e_ref, k.entropy_sum(in.data(), n), 1e-6 * (1.0 + e_ref)) << "n=" << n;
    }
}

TEST_P(KernelEquivalence, AnyWithinIsExactIncludingBoundary) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coord(-6, 6);
    for (std::size_t n : kSizes) {
        if (n > 300) continue;
        std::vector<double> xs(n), ys(n), zs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = coord(rng);
            ys[i] = coord(rng);
            zs[i] = coord(rng);
        }
        for (int q = 0; q < 50; ++q) {
            const double qx = coord(rng), qy = coord(rng), qz = coord(rng);
            // integer coordinates make d^2 == r^2 ties common
            for (double r2 : {0.0, 1.0, 2.0, 9.0, 25.0}) {
                EXPECT_EQ(ref.any_within(xs.data(), ys.data(), zs.data(), n, qx, qy, qz, r2),
                          k.any_within(xs.data(), ys.data(), zs.data(), n, qx, qy, qz, r2));
            }
        }
    }
}

TEST(KernelReference, EntropyOfHalf) {
    const std::vector<float> half(10, 0.5f);
    EXPECT_NEAR(kernels(Isa::scalar).entropy_sum(half.data(), half.size()), 10.0 * std::log(2.0), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(AllIsas, KernelEquivalence, ::testing::ValuesIn(supported_isas()),
                         [](const auto& info) { return std::string(isa_name(info.param)); });
