#ifndef FSEL_PATH_HPP_
#define FSEL_PATH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsel/state.hpp"
#include "fsel/time_grid.hpp"

namespace fsel {

/// A grid-sampled trajectory in R^n, piecewise linear between nodes.
/// Samples are stored flat, row k holding the state at grid node k.
class Path {
 public:
  Path() = default;

  /// Constant path at `start` over `grid`.
  Path(TimeGrid grid, const StatePoint& start);

  /// Path from flat sample data, data.size() == (n_steps+1) * dim.
  Path(TimeGrid grid, std::size_t dim, std::vector<double> data);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::int64_t n_samples() const { return grid_.n_steps() + 1; }

  std::span<const double> sample(std::int64_t k) const;
  std::span<double> sample_mut(std::int64_t k);
  StatePoint state_at(std::int64_t k) const;

  const std::vector<double>& data() const { return data_; }

  /// Max over grid nodes of rho between same-index samples.
  double max_node_rho(const Path& other) const;

  bool same_samples(const Path& other) const { return data_ == other.data_; }

  /// Sample-wise closeness: max node rho <= tol, same grid shape.
  bool close_to(const Path& other, double tol) const;

 private:
  TimeGrid grid_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Past-erasing shift sigma at grid resolution: the returned path starts
/// at node k of u and keeps the remaining samples.
Path shift(const Path& u, std::int64_t k);

/// Extends v backwards to new_t_start (a whole number of steps before
/// v's start), holding the first sample constant on the prefix.
Path extend_const(const Path& v, double new_t_start);

/// Splice: u on [t_0, t_k], then v. Requires v to start at node k of u
/// with exactly equal junction state (bit-for-bit) and the same step.
Path splice(const Path& u, std::int64_t k, const Path& v);

/// Linear interpolation; exact at grid nodes. t must be inside the domain.
StatePoint evaluate(const Path& u, double t);

/// Bounded path metric: sum_{l=1..n_terms} 2^-l * s_l / (1 + s_l) with
/// s_l the max node rho over times within l whole time units of the start
/// (the full-grid max once l passes the horizon). Requires equal grids
/// and n_terms >= horizon in whole time units.
double metric_d(const Path& u, const Path& v, int n_terms);

/// metric_d summed to infinity: the terms beyond the horizon are constant,
/// so the tail has the closed form 2^-L * s/(1+s). Used for diameters.
double metric_d_full(const Path& u, const Path& v);

/// CSV with header "t,x1,...,xn", one row per node, shortest
/// round-trip decimal formatting (values re-parse to identical bits).
std::string path_to_csv(const Path& u);
Path path_from_csv(const std::string& csv);

}  // namespace fsel

#endif  // FSEL_PATH_HPP_
