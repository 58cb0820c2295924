#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace toposcore {

enum class DType { u8, f32 };

const char* dtype_name(DType t) noexcept;

struct Dims {
    std::size_t nx = 0, ny = 0, nz = 0;

    std::size_t count() const noexcept { return nx * ny * nz; }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
        return x + nx * (y + ny * z);
    }
    friend bool operator==(const Dims&, const Dims&) = default;
};

struct Spacing {
    double x = 1.0, y = 1.0, z = 1.0;
    friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// Dense 3D scalar grid, x-fastest. A u8 volume is a binary mask holding only
/// 0/1; an f32 volume is a probability map or an intensity image (range is
/// checked by the operations that need [0,1]).
class Volume {
public:
    Volume() = default;

    static Volume binary(Dims dims, std::vector<std::uint8_t> data, Spacing spacing = {});
    static Volume zeros_binary(Dims dims, Spacing spacing = {});
    static Volume real(Dims dims, std::vector<float> data, Spacing spacing = {});

    DType dtype() const noexcept { return std::holds_alternative<std::vector<float>>(data_) ? DType::f32 : DType::u8; }
    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return dims_.count(); }

    std::span<const std::uint8_t> u8() const;
    std::span<std::uint8_t> u8_mut();
    std::span<const float> f32() const;

    /// Foreground voxel count of a binary volume.
    std::size_t count_foreground() const;

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    Volume(Dims d, Spacing s, std::variant<std::vector<std::uint8_t>, std::vector<float>> data)
        : dims_(d), spacing_(s), data_(std::move(data)) {}

    Dims dims_{};
    Spacing spacing_{};
    std::variant<std::vector<std::uint8_t>, std::vector<float>> data_;
};

// segvol I/O: <name>.json header next to a little-endian raw payload.
Volume load_volume(const std::filesystem::path& header_path);
void save_volume(const Volume& v, const std::filesystem::path& header_path);

/// Zero mean / unit population std, then clamp to [-3, 3]. Statistics are not
/// recomputed after clipping.
Volume standardize(const Volume& v);

/// voxel = 1 iff p >= threshold.
Volume binarize(const Volume& prob, double threshold);

/// |gt & pred| / |gt | pred|; 1 when both masks are empty.
double voxel_iou(const Volume& gt, const Volume& pred);

/// Mean binary entropy in nats with 0 ln 0 := 0.
double mean_entropy(const Volume& prob);

}  // namespace toposcore
