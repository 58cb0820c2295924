#include "kernels_impl.hpp"

#include "toposcore/error.hpp"

namespace toposcore::simd {

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

std::vector<Isa> supported_isas() {
    std::vector<Isa> out{Isa::scalar};
    if (isa_supported(Isa::avx2)) out.push_back(Isa::avx2);
    return out;
}

const KernelTable& kernels(Isa isa) {
    if (!isa_supported(isa))
        throw Error(Errc::invalid_argument, std::string("kernel variant not available: ") + std::string(isa_name(isa)));
    return isa == Isa::avx2 ? *detail::avx2_table() : detail::scalar_table();
}

const KernelTable& kernels() {
    static const KernelTable& best = isa_supported(Isa::avx2) ? *detail::avx2_table() : detail::scalar_table();
    return best;
}

}  // namespace toposcore::simd
