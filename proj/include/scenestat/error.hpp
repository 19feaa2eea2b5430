#pragma once

#include <stdexcept>
#include <string>

namespace scenestat {

enum class ErrorCode {
    // pixbuf
    unsupported_format,
    maxval_too_large,
    truncated_payload,
    malformed_header,
    out_of_bounds,
    // sequence
    missing_key,
    invalid_value,
    // stats
    not_normalized,
    // features
    frame_too_small,
    // reproject
    insufficient_matches,
    degenerate_configuration,
    non_invertible,
    // report / synth / io
    empty_sequence,
    all_missing,
    invalid_script,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace scenestat
