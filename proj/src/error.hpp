#pragma once

#include <stdexcept>
#include <string>

namespace gdyn {

// Error categories. Codes map onto process exit codes at the CLI boundary:
// validation -> 1, numerical -> 2, verification -> 3.
enum class errc {
    invalid_argument,
    non_finite,
    degenerate_spectrum,
    singular_overlap,
    gap_collapse,
    pole_collision,
    quadrature_nonconverged,
    truncation_error,
    regulator_too_small,
    grid_mismatch,
    empty_window,
    step_too_large,
    io_error,
    verification_failed,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

    // Exit-code class of this error (1 validation, 2 numerical, 3 verification).
    int exit_class() const {
        switch (code_) {
            case errc::invalid_argument:
            case errc::io_error: return 1;
            case errc::verification_failed: return 3;
            default: return 2;
        }
    }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gdyn
