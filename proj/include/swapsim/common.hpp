#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace swapsim {

using cdouble = std::complex<double>;

// Numeric budgets used across the library. Exact algebraic identities on
// rational amplitudes stay far inside 1e-12 in double precision; inputs that
// went through trigonometry (unit vectors, rotated settings) get more slack.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kUnitVectorTol = 1e-9;
inline constexpr double kBasisGramTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdFloor = -1e-10;

// Probabilities below this are treated as exact zeros: conditioning on such
// an outcome is an error, sampling never lands on it.
inline constexpr double kZeroProbability = 1e-12;

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

/// Spatial direction (or any real 3-vector).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const Vec3& other) const { return x * other.x + y * other.y + z * other.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool is_unit(double tol = kUnitVectorTol) const { return std::abs(norm() - 1.0) <= tol; }
};

/// Direction in the x-z plane at the given polar angle from +z.
inline Vec3 polar_direction(double polar_radians) {
  return Vec3{std::sin(polar_radians), 0.0, std::cos(polar_radians)};
}

inline double degrees_to_radians(double degrees) {
  return degrees * 3.14159265358979323846 / 180.0;
}

}  // namespace swapsim
