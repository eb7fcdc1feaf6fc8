#ifndef FSEL_STATE_HPP_
#define FSEL_STATE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fsel {

/// A point of the state space X = R^n. Coordinates must be finite.
struct StatePoint {
  std::vector<double> coords;

  StatePoint() = default;
  explicit StatePoint(std::vector<double> c);
  StatePoint(std::initializer_list<double> c);

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }

  bool operator==(const StatePoint& other) const { return coords == other.coords; }
};

/// Euclidean distance truncated at 1 (the bounded metric on X).
double rho(const StatePoint& x, const StatePoint& y);

/// Same metric on raw coordinate spans; dimension checked.
double rho(std::span<const double> x, std::span<const double> y);

/// Throws std::invalid_argument if any coordinate is NaN/Inf.
void require_finite(std::span<const double> coords, const std::string& what);

}  // namespace fsel

#endif  // FSEL_STATE_HPP_
