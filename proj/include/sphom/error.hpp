#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sphom {

enum class errc {
    not_torsion_free,
    rank_deficient,
    bad_shape,
    bad_dimension,
    zero_coordinate,
    singular_randomizer,
    degenerate_system,
    degenerate_lifting,
    genericity_exhausted,
    singular_exponent,
    zero_rhs,
    degenerate_kernel,
    refinement_failure,
    parse_error,
};

inline std::string_view to_string(errc e) noexcept
{
    switch (e) {
    case errc::not_torsion_free: return "not_torsion_free";
    case errc::rank_deficient: return "rank_deficient";
    case errc::bad_shape: return "bad_shape";
    case errc::bad_dimension: return "bad_dimension";
    case errc::zero_coordinate: return "zero_coordinate";
    case errc::singular_randomizer: return "singular_randomizer";
    case errc::degenerate_system: return "degenerate";
    case errc::degenerate_lifting: return "degenerate_lifting";
    case errc::genericity_exhausted: return "genericity_exhausted";
    case errc::singular_exponent: return "singular_exponent";
    case errc::zero_rhs: return "zero_rhs";
    case errc::degenerate_kernel: return "degenerate_kernel";
    case errc::refinement_failure: return "refinement_failure";
    case errc::parse_error: return "parse_error";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace sphom
