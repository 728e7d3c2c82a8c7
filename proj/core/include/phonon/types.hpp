#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace phonon {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;

// All library failures derive from Error so callers can map them to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error { using Error::Error; };
struct NearEmptyResonance : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct MissingLatticeOrder : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct ZeroAlpha : Error { using Error::Error; };
struct BandNotFound : Error { using Error::Error; };

// Bloch quasi-momentum on the unit square lattice.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  bool is_zero() const { return x == 0.0 && y == 0.0; }
  BlochVector operator-() const { return {-x, -y}; }
  bool operator==(const BlochVector&) const = default;
};

namespace points {
inline constexpr BlochVector Gamma{0.0, 0.0};
inline constexpr BlochVector X{pi, 0.0};
inline constexpr BlochVector M{pi, pi};
}  // namespace points

}  // namespace phonon
