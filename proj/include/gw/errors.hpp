#pragma once

#include <stdexcept>
#include <string>

namespace gw {

// Every failure mode carries a stable code so callers (and the CLI exit-code
// mapping) can react without parsing messages.
enum class errc {
    asymmetric_distance,
    nonzero_diagonal,
    negative_distance,
    measure_not_simplex,
    duplicate_points,
    invalid_size,
    duplicate_consecutive_samples,
    parse_error,
    index_out_of_range,
    dimension_mismatch,
    negative_value,
    not_symmetric,
    too_few_points,
    internal_inconsistency,
    infeasible_init,
    numerical_underflow,
    wrong_dimension,
    too_many_dof,
    resolution_too_small,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::asymmetric_distance: return "AsymmetricDistance";
    case errc::nonzero_diagonal: return "NonzeroDiagonal";
    case errc::negative_distance: return "NegativeDistance";
    case errc::measure_not_simplex: return "MeasureNotSimplex";
    case errc::duplicate_points: return "DuplicatePoints";
    case errc::invalid_size: return "InvalidSize";
    case errc::duplicate_consecutive_samples: return "DuplicateConsecutiveSamples";
    case errc::parse_error: return "ParseError";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::negative_value: return "NegativeValue";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::too_few_points: return "TooFewPoints";
    case errc::internal_inconsistency: return "InternalInconsistency";
    case errc::infeasible_init: return "InfeasibleInit";
    case errc::numerical_underflow: return "NumericalUnderflow";
    case errc::wrong_dimension: return "WrongDimension";
    case errc::too_many_dof: return "TooManyDof";
    case errc::resolution_too_small: return "ResolutionTooSmall";
    }
    return "UnknownError";
}

} // namespace gw
