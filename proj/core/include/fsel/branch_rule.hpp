#ifndef FSEL_BRANCH_RULE_HPP_
#define FSEL_BRANCH_RULE_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fsel/state.hpp"

namespace fsel {

/// One admissible continuation from a grid node: the samples at the next
/// `steps()` nodes (intermediate samples plus the endpoint), stored flat.
struct Arc {
  std::size_t dim = 0;
  std::vector<double> data;

  Arc() = default;
  Arc(std::size_t d, std::vector<double> samples) : dim(d), data(std::move(samples)) {
    if (d == 0 || data.empty() || data.size() % d != 0)
      throw std::invalid_argument("Arc: sample data does not match dimension");
  }

  /// Single-step arc straight to `endpoint`.
  static Arc to(const StatePoint& endpoint) {
    return Arc(endpoint.dim(), endpoint.coords);
  }

  std::int64_t steps() const { return static_cast<std::int64_t>(data.size() / dim); }
  std::span<const double> sample(std::int64_t j) const {
    return {data.data() + static_cast<std::size_t>(j) * dim, dim};
  }
  std::span<const double> endpoint() const { return sample(steps() - 1); }
};

/// Context handed to a rule at a query node.
struct ArcContext {
  double step = 0.0;          // grid step
  std::int64_t remaining = 0; // steps left to the grid end (>= 1)
};

/// Thrown by rules for query nodes outside their admissible region.
class InadmissibleInitialCondition : public std::domain_error {
 public:
  explicit InadmissibleInitialCondition(const std::string& what)
      : std::domain_error(what) {}
};

/// Generator of a funnel family: for each grid node (t, x) a finite,
/// non-empty, deterministically ordered list of arcs. Arcs may span
/// several grid steps but never more than ctx.remaining.
class BranchRule {
 public:
  virtual ~BranchRule() = default;

  virtual std::vector<Arc> arcs(double t, const StatePoint& x, const ArcContext& ctx) const = 0;

  /// Upper bound on the number of arcs a single node may produce.
  virtual int max_branching() const { return 2; }
};

}  // namespace fsel

#endif  // FSEL_BRANCH_RULE_HPP_
