#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace edarof {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Malformed configuration: bad key, unparsable value, out-of-range parameter,
// or an impossible operating point (e.g. pilot inside the occupied band).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Preamble correlation peak below the detection threshold.
struct SyncError : std::runtime_error {
    explicit SyncError(const std::string& msg) : std::runtime_error(msg) {}
};

// LMS training error grows monotonically instead of converging.
struct EqDivergenceError : std::runtime_error {
    explicit EqDivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace edarof
