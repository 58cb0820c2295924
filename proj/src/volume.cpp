#include "toposcore/volume.hpp"

#include <cmath>
#include <string>

#include "toposcore/error.hpp"
#include "toposcore/kernels.hpp"

namespace toposcore {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::io: return "io";
        case Errc::malformed_header: return "malformed-header";
        case Errc::size_mismatch: return "size-mismatch";
        case Errc::bad_dtype: return "bad-dtype";
        case Errc::bad_binary_value: return "bad-binary-value";
        case Errc::zero_variance: return "zero-variance";
        case Errc::dimension_mismatch: return "dimension-mismatch";
        case Errc::out_of_range: return "out-of-range";
        case Errc::malformed_skeleton: return "malformed-skeleton";
        case Errc::dangling_index: return "dangling-index";
        case Errc::self_edge: return "self-edge";
        case Errc::duplicate_edge: return "duplicate-edge";
        case Errc::empty_feature: return "empty-feature";
        case Errc::geometry_does_not_fit: return "geometry-does-not-fit";
        case Errc::corruption_impossible: return "corruption-impossible";
    }
    return "unknown";
}

const char* dtype_name(DType t) noexcept { return t == DType::u8 ? "u8" : "f32"; }

namespace {

void check_geometry(const Dims& d, const Spacing& s, std::size_t data_len) {
    if (d.nx == 0 || d.ny == 0 || d.nz == 0)
        throw Error(Errc::invalid_argument, "volume dims must be positive");
    if (!(s.x > 0 && s.y > 0 && s.z > 0) || !std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
        throw Error(Errc::invalid_argument, "volume spacing must be positive and finite");
    if (data_len != d.count())
        throw Error(Errc::size_mismatch, "data length " + std::to_string(data_len) + " != nx*ny*nz = " +
                                             std::to_string(d.count()));
}

void require_probability(const Volume& v, const char* op) {
    if (v.dtype() != DType::f32) throw Error(Errc::bad_dtype, std::string(op) + " expects an f32 volume");
    for (float p : v.f32())
        if (!(p >= 0.0f && p <= 1.0f))
            throw Error(Errc::out_of_range, std::string(op) + ": probability outside [0,1]");
}

}  // namespace

Volume Volume::binary(Dims dims, std::vector<std::uint8_t> data, Spacing spacing) {
    check_geometry(dims, spacing, data.size());
    for (auto b : data)
        if (b > 1) throw Error(Errc::bad_binary_value, "binary volume holds value " + std::to_string(b));
    return Volume(dims, spacing, std::move(data));
}

Volume Volume::zeros_binary(Dims dims, Spacing spacing) {
    return binary(dims, std::vector<std::uint8_t>(dims.count(), 0), spacing);
}

Volume Volume::real(Dims dims, std::vector<float> data, Spacing spacing) {
    check_geometry(dims, spacing, data.size());
    return Volume(dims, spacing, std::move(data));
}

std::span<const std::uint8_t> Volume::u8() const {
    if (const auto* p = std::get_if<std::vector<std::uint8_t>>(&data_)) return *p;
    throw Error(Errc::bad_dtype, "expected a u8 volume");
}

std::span<std::uint8_t> Volume::u8_mut() {
    if (auto* p = std::get_if<std::vector<std::uint8_t>>(&data_)) return *p;
    throw Error(Errc::bad_dtype, "expected a u8 volume");
}

std::span<const float> Volume::f32() const {
    if (const auto* p = std::get_if<std::vector<float>>(&data_)) return *p;
    throw Error(Errc::bad_dtype, "expected an f32 volume");
}

std::size_t Volume::count_foreground() const {
    const auto d = u8();
    return static_cast<std::size_t>(simd::kernels().count_nonzero(d.data(), d.size()));
}

Volume standardize(const Volume& v) {
    const auto x = v.f32();
    const auto& k = simd::kernels();
    const double n = static_cast<double>(x.size());
    const double mean = k.sum(x.data(), x.size()) / n;
    const double var = k.sum_sq_dev(x.data(), x.size(), mean) / n;
    const double sd = std::sqrt(var);
    if (!(sd > 0.0) || !std::isfinite(sd)) throw Error(Errc::zero_variance, "standardize: input has zero variance");

    std::vector<float> out(x.size());
    k.affine_clamp(x.data(), x.size(), static_cast<float>(mean), static_cast<float>(1.0 / sd), -3.0f, 3.0f,
                   out.data());
    return Volume::real(v.dims(), std::move(out), v.spacing());
}

Volume binarize(const Volume& prob, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(Errc::invalid_argument, "binarize: threshold must lie in [0,1]");
    const auto p = prob.f32();
    std::vector<std::uint8_t> out(p.size());
    simd::kernels().binarize(p.data(), p.size(), static_cast<float>(threshold), out.data());
    return Volume::binary(prob.dims(), std::move(out), prob.spacing());
}

double voxel_iou(const Volume& gt, const Volume& pred) {
    if (gt.dims() != pred.dims()) throw Error(Errc::dimension_mismatch, "voxel_iou: dims differ");
    const auto a = gt.u8();
    const auto b = pred.u8();
    const auto c = simd::kernels().overlap(a.data(), b.data(), a.size());
    if (c.union_ == 0) return 1.0;
    return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

double mean_entropy(const Volume& prob) {
    require_probability(prob, "mean_entropy");
    const auto p = prob.f32();
    return simd::kernels().entropy_sum(p.data(), p.size()) / static_cast<double>(p.size());
}

}  // namespace toposcore
