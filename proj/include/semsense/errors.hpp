#pragma once

#include <stdexcept>
#include <string>

namespace semsense {

enum class Errc {
    invalid_argument,
    invalid_scene,
    empty_scene,
    invalid_config,
    invalid_index,
    degenerate_fit,
    quadrature_failure,
    empty_class,
    schema_mismatch,
    degenerate_coefficients,
};

inline const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::invalid_scene: return "invalid-scene";
        case Errc::empty_scene: return "empty-scene";
        case Errc::invalid_config: return "invalid-config";
        case Errc::invalid_index: return "invalid-index";
        case Errc::degenerate_fit: return "degenerate-fit";
        case Errc::quadrature_failure: return "quadrature-failure";
        case Errc::empty_class: return "empty-class";
        case Errc::schema_mismatch: return "schema-mismatch";
        case Errc::degenerate_coefficients: return "degenerate-coefficients";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace semsense
