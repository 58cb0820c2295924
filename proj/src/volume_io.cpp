#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "toposcore/error.hpp"
#include "toposcore/volume.hpp"

namespace toposcore {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "segvol I/O assumes a little-endian host");

namespace {

std::vector<char> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + p.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::io, "read failed: " + p.string());
    return bytes;
}

void write_bytes(const fs::path& p, const void* data, std::size_t n) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open for writing: " + p.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw Error(Errc::io, "write failed: " + p.string());
}

std::size_t positive_dim(const json& j) {
    if (!j.is_number_integer() || j.get<long long>() <= 0)
        throw Error(Errc::malformed_header, "dims entries must be positive integers");
    return j.get<std::size_t>();
}

}  // namespace

Volume load_volume(const fs::path& header_path) {
    const auto text = read_bytes(header_path);
    json h;
    try {
        h = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_header, header_path.string() + ": " + e.what());
    }
    if (!h.is_object()) throw Error(Errc::malformed_header, "header must be a JSON object");
    if (!h.contains("dims") || !h["dims"].is_array() || h["dims"].size() != 3)
        throw Error(Errc::malformed_header, "header needs dims: [nx, ny, nz]");
    if (!h.contains("dtype") || !h["dtype"].is_string()) throw Error(Errc::malformed_header, "header needs dtype");
    if (!h.contains("data") || !h["data"].is_string()) throw Error(Errc::malformed_header, "header needs data");

    const Dims dims{positive_dim(h["dims"][0]), positive_dim(h["dims"][1]), positive_dim(h["dims"][2])};
    Spacing spacing;
    if (h.contains("spacing")) {
        const auto& s = h["spacing"];
        if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() || !s[2].is_number())
            throw Error(Errc::malformed_header, "spacing must be [sx, sy, sz]");
        spacing = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
        if (!(spacing.x > 0 && spacing.y > 0 && spacing.z > 0))
            throw Error(Errc::malformed_header, "spacing must be positive");
    }

    const auto dtype = h["dtype"].get<std::string>();
    std::size_t elem = 0;
    if (dtype == "u8") elem = 1;
    else if (dtype == "f32") elem = 4;
    else throw Error(Errc::bad_dtype, "unsupported dtype '" + dtype + "'");

    const fs::path raw = header_path.parent_path() / h["data"].get<std::string>();
    const auto payload = read_bytes(raw);
    if (payload.size() != dims.count() * elem)
        throw Error(Errc::size_mismatch, raw.string() + " holds " + std::to_string(payload.size()) +
                                             " bytes, header implies " + std::to_string(dims.count() * elem));

    if (elem == 1) {
        std::vector<std::uint8_t> data(payload.size());
        std::memcpy(data.data(), payload.data(), payload.size());
        return Volume::binary(dims, std::move(data), spacing);
    }
    std::vector<float> data(dims.count());
    std::memcpy(data.data(), payload.data(), payload.size());
    return Volume::real(dims, std::move(data), spacing);
}

void save_volume(const Volume& v, const fs::path& header_path) {
    const fs::path raw_name = header_path.stem().string() + ".raw";
    const auto& d = v.dims();
    const auto& s = v.spacing();
    json h;
    h["dims"] = {d.nx, d.ny, d.nz};
    h["dtype"] = dtype_name(v.dtype());
    h["spacing"] = {s.x, s.y, s.z};
    h["data"] = raw_name.string();

    const fs::path raw = header_path.parent_path() / raw_name;
    if (v.dtype() == DType::u8) {
        const auto b = v.u8();
        write_bytes(raw, b.data(), b.size());
    } else {
        const auto f = v.f32();
        write_bytes(raw, f.data(), f.size() * sizeof(float));
    }
    const auto text = h.dump(2) + "\n";
    write_bytes(header_path, text.data(), text.size());
}

}  // namespace toposcore
