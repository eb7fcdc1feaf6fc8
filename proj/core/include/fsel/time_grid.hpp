#ifndef FSEL_TIME_GRID_HPP_
#define FSEL_TIME_GRID_HPP_

#include <cstdint>

namespace fsel {

/// Uniform time grid t_k = anchor + (k_start + k) * step, k = 0..n_steps.
///
/// The (anchor, k_start) split keeps node times bit-identical across
/// derived frames: a grid shifted by k shares every remaining node time
/// with its parent, so generators queried at a node see the same time
/// bits no matter which funnel reached it.
class TimeGrid {
 public:
  TimeGrid() = default;

  /// Grid anchored at t_start (k_start = 0). step > 0, n_steps >= 0.
  TimeGrid(double t_start, double step, std::int64_t n_steps);

  double t_start() const { return time_at(0); }
  double t_end() const { return time_at(n_steps_); }
  double step() const { return step_; }
  std::int64_t n_steps() const { return n_steps_; }
  double horizon() const { return static_cast<double>(n_steps_) * step_; }

  /// Time of node k, 0 <= k <= n_steps.
  double time_at(std::int64_t k) const {
    return anchor_ + static_cast<double>(k_start_ + k) * step_;
  }

  /// Sub-grid starting at node k (same frame). k in [0, n_steps].
  TimeGrid shifted(std::int64_t k) const;

  /// Grid extended by m extra steps before the current start (same frame).
  TimeGrid extended_back(std::int64_t m) const;

  /// Grid truncated to the first n steps.
  TimeGrid truncated(std::int64_t n) const;

  /// Node index of time t if t is (to within tiny rounding) a grid node;
  /// throws std::invalid_argument otherwise.
  std::int64_t index_of(double t) const;

  /// Exact frame equality: same node times bit-for-bit and same length.
  bool operator==(const TimeGrid& other) const;

 private:
  TimeGrid(double anchor, std::int64_t k_start, double step, std::int64_t n_steps);

  double anchor_ = 0.0;
  std::int64_t k_start_ = 0;
  double step_ = 1.0;
  std::int64_t n_steps_ = 0;
};

}  // namespace fsel

#endif  // FSEL_TIME_GRID_HPP_
