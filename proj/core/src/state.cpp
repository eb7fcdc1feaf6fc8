#include "fsel/state.hpp"

#include <cmath>
#include <stdexcept>

namespace fsel {

void require_finite(std::span<const double> coords, const std::string& what) {
  for (double c : coords) {
    if (!std::isfinite(c))
      throw std::invalid_argument(what + ": non-finite coordinate");
  }
}

StatePoint::StatePoint(std::vector<double> c) : coords(std::move(c)) {
  require_finite(coords, "StatePoint");
}

StatePoint::StatePoint(std::initializer_list<double> c) : coords(c) {
  require_finite(coords, "StatePoint");
}

double rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("rho: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  const double n = std::sqrt(s);
  return n < 1.0 ? n : 1.0;
}

double rho(const StatePoint& x, const StatePoint& y) {
  return rho(std::span<const double>(x.coords), std::span<const double>(y.coords));
}

}  // namespace fsel
