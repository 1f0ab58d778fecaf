#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace maopt {

using Real = double;
using Complex = std::complex<Real>;

template <typename Scalar>
using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealVector = Vector<Real>;
using RealMatrix = Matrix<Real>;
using ComplexVector = Vector<Complex>;
using ComplexMatrix = Matrix<Complex>;

inline constexpr Real kPi = 3.14159265358979323846;

inline constexpr const char* kVersion = "0.1.0";

/// Mismatched or unusable dimensions (e.g. too few antennas for a receiver).
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Channel matrix is numerically rank deficient; user channels are colinear.
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A sample-average objective was given no samples.
struct EmptySampleSet : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The span cannot hold the requested number of antennas at minimum spacing.
struct InfeasibleGeometry : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A nominally real quantity came out with a non-negligible imaginary part.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Extracts the real part of a quantity that must be real up to rounding.
/// Residue above `tol` (relative to max(1, |real part|)) is an internal error.
inline Real checked_real(Complex z, Real tol = 1e-8) {
  const Real scale = std::max(Real(1), std::abs(z.real()));
  if (std::abs(z.imag()) > tol * scale) {
    throw ConsistencyError("imaginary residue " + std::to_string(z.imag()) +
                           " on nominally real value " + std::to_string(z.real()));
  }
  return z.real();
}

}  // namespace maopt
