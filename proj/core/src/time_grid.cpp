#include "fsel/time_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fsel {

TimeGrid::TimeGrid(double t_start, double step, std::int64_t n_steps)
    : anchor_(t_start), k_start_(0), step_(step), n_steps_(n_steps) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("TimeGrid: step must be positive and finite");
  if (n_steps < 0)
    throw std::invalid_argument("TimeGrid: n_steps must be >= 0");
  if (!std::isfinite(t_start))
    throw std::invalid_argument("TimeGrid: t_start must be finite");
}

TimeGrid::TimeGrid(double anchor, std::int64_t k_start, double step, std::int64_t n_steps)
    : anchor_(anchor), k_start_(k_start), step_(step), n_steps_(n_steps) {}

TimeGrid TimeGrid::shifted(std::int64_t k) const {
  if (k < 0 || k > n_steps_)
    throw std::out_of_range("TimeGrid::shifted: k out of range");
  return TimeGrid(anchor_, k_start_ + k, step_, n_steps_ - k);
}

TimeGrid TimeGrid::extended_back(std::int64_t m) const {
  if (m < 0) throw std::invalid_argument("TimeGrid::extended_back: m < 0");
  return TimeGrid(anchor_, k_start_ - m, step_, n_steps_ + m);
}

TimeGrid TimeGrid::truncated(std::int64_t n) const {
  if (n < 0 || n > n_steps_)
    throw std::out_of_range("TimeGrid::truncated: n out of range");
  return TimeGrid(anchor_, k_start_, step_, n);
}

std::int64_t TimeGrid::index_of(double t) const {
  const double rel = (t - t_start()) / step_;
  const std::int64_t k = static_cast<std::int64_t>(std::llround(rel));
  if (k < 0 || k > n_steps_ || std::abs(t - time_at(k)) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("TimeGrid::index_of: t=" + std::to_string(t) +
                                " is not a grid node");
  return k;
}

bool TimeGrid::operator==(const TimeGrid& other) const {
  return n_steps_ == other.n_steps_ && step_ == other.step_ &&
         time_at(0) == other.time_at(0);
}

}  // namespace fsel
