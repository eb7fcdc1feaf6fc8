#ifndef FSEL_FUNNEL_HPP_
#define FSEL_FUNNEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsel/branch_rule.hpp"
#include "fsel/path.hpp"

namespace fsel {

/// Prefix-sharing tree over the funnel's paths. Node 0 is the root at
/// grid index 0; every other node is the endpoint of one arc.
struct TreeIndex {
  struct Node {
    std::int64_t k = 0;             // grid index of this node
    std::int64_t parent = -1;       // -1 for the root
    int arc_ordinal = 0;            // position among the parent's arcs
    std::vector<std::int64_t> children;
    std::int64_t leaf_path = -1;    // path index when this is a leaf
  };
  std::vector<Node> nodes;

  std::int64_t leaf_count() const;
};

/// A finite integral funnel: every path starts at (t0, anchor) over one
/// shared grid; paths are kept in canonical (depth-first arc) order.
struct Funnel {
  double t0 = 0.0;
  StatePoint anchor;
  TimeGrid grid;
  std::vector<Path> paths;
  TreeIndex tree;

  std::size_t size() const { return paths.size(); }

  /// Max pairwise metric_d_full over the path set (0 for <= 1 path).
  double diameter() const;

  /// Funnel with the given subset of paths (canonical order preserved,
  /// tree re-derived). Indices must be valid and strictly increasing.
  Funnel subset(const std::vector<std::size_t>& keep) const;

  /// JSON dump {t0, anchor, delta, n_steps, paths}; stable ordering.
  std::string to_json() const;
};

/// Caps for unroll.
struct UnrollLimits {
  std::size_t max_paths = 100000;
};

/// Builds the funnel generated by `rule` from (t0, a): every depth-first
/// concatenation of arcs along the grid. Deterministic; throws when the
/// path cap is exceeded, naming the offending node.
Funnel unroll(const BranchRule& rule, double t0, const StatePoint& a, const TimeGrid& grid,
              const UnrollLimits& limits = {});

/// One reported axiom violation.
struct AxiomViolation {
  std::size_t path_index = 0;
  std::int64_t k = 0;
  std::size_t detail_index = 0;  // sub-funnel path / suffix index involved
  double distance = 0.0;         // best sample-wise distance found
  std::string message;
};

struct AxiomReport {
  std::string axiom;
  std::int64_t k = 0;
  std::size_t checked = 0;
  std::vector<AxiomViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Shift closure: for every path u, shift(u, k) must be reproducible by
/// the generator from node (t_k, u(t_k)) — membership, within tol, in
/// unroll(rule, t_k, u(t_k)) over the shifted grid.
AxiomReport check_S3(const Funnel& f, const BranchRule& rule, std::int64_t k,
                     double tol = 1e-9, const UnrollLimits& limits = {});

/// Splice closure: for every u and every suffix v of a funnel path that
/// passes through (t_k, u(t_k)), splice(u, k, v) must itself be one of
/// the funnel's paths (within tol). The rule is consulted to confirm the
/// junction node still admits arcs (local non-emptiness).
AxiomReport check_S4(const Funnel& f, const BranchRule& rule, std::int64_t k,
                     double tol = 1e-9);

}  // namespace fsel

#endif  // FSEL_FUNNEL_HPP_
