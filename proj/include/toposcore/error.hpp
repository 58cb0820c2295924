#pragma once

#include <stdexcept>
#include <string>

namespace toposcore {

enum class Errc {
    invalid_argument,
    io,
    malformed_header,
    size_mismatch,
    bad_dtype,
    bad_binary_value,
    zero_variance,
    dimension_mismatch,
    out_of_range,
    malformed_skeleton,
    dangling_index,
    self_edge,
    duplicate_edge,
    empty_feature,
    geometry_does_not_fit,
    corruption_impossible,
};

const char* errc_name(Errc code) noexcept;

/// Every failure raised by the library. `code()` lets callers (the CLI in
/// particular) tell I/O failures apart from rejected input.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }
    bool is_io() const noexcept { return code_ == Errc::io; }

private:
    Errc code_;
};

}  // namespace toposcore
