#ifndef FSEL_LOCAL_HPP_
#define FSEL_LOCAL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "fsel/funnel.hpp"
#include "fsel/selection.hpp"
#include "fsel/separating.hpp"

namespace fsel {

/// Length of the existence interval of local solutions from a node.
struct TerminalTime {
  double duration = 0.0;
  bool is_infinite = false;

  static TerminalTime finite(double d);
  static TerminalTime unbounded() { return {0.0, true}; }
};

/// A branch rule whose solutions may blow up: it also reports the
/// terminal time of each admissible node.
class LocalRule : public BranchRule {
 public:
  virtual TerminalTime terminal_time(double t0, const StatePoint& a) const = 0;
};

/// A funnel on a grid covering [t0, t0 + T - guard_gap]; the guard gap
/// keeps the last node clear of the blow-up time.
struct LocalFunnel {
  Funnel funnel;
  TerminalTime terminal;
  double guard_gap = 0.0;

  std::string to_json() const;  // funnel dump plus {terminal_T, guard_gap}
};

/// Grid with n_steps covering [t0, t0 + T(1 - guard_rel)] for finite T.
/// Infinite terminal times are rejected here: they belong to the global
/// machinery.
LocalFunnel build_local_funnel(const LocalRule& rule, double t0, const StatePoint& a,
                               std::int64_t n_steps, double guard_rel,
                               const UnrollLimits& limits = {});

/// Same, over an explicit grid (used to keep frames shared when
/// re-reducing from an intermediate node). The grid must start at t0 and
/// end strictly before t0 + T.
LocalFunnel build_local_funnel_on(const LocalRule& rule, double t0, const StatePoint& a,
                                  const TimeGrid& grid, const UnrollLimits& limits = {});

struct TTViolation {
  double t0 = 0.0;
  StatePoint a;
  double t_sample = 0.0;   // T at the sample
  double t_stencil = 0.0;  // offending stencil value
  std::string stencil;
};

struct TTReport {
  std::size_t checked = 0;
  std::vector<TTViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Desk-scale lower semi-continuity check of T: for each sample and a
/// fixed stencil of perturbations within delta (each coordinate of
/// (t0, a) moved by +-delta and +-delta/2), require
///   T(t0, a) <= T(perturbed) + lsc_tol.
/// Continuous T passes with lsc_tol >= Lipschitz * delta; a downward
/// jump at the sample is reported.
TTReport check_TT(const LocalRule& rule, const std::vector<std::pair<double, StatePoint>>& samples,
                  double delta, double lsc_tol);

struct LS3Violation {
  std::size_t path_index = 0;
  std::string message;
  double value = 0.0;
};

struct LS3Report {
  std::int64_t k = 0;
  std::size_t checked = 0;
  double max_terminal_defect = 0.0;  // max |T(node) - (T - k delta)| over finite pairs
  std::vector<LS3Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// LS3: for every path u, T(t_k, u(t_k)) >= T(t0, a) - k*delta (within
/// ls3_tol) and shift(u, k) is reproducible by the rule from its node.
LS3Report check_LS3(const LocalFunnel& f, const LocalRule& rule, std::int64_t k,
                    double ls3_tol = 1e-9, double member_tol = 1e-9);

/// Path rescaled onto [0, 1): w~(s) = w(t0 + s T), sampled where the
/// original grid samples sit (s_j = j step / T). T must be finite.
Path reparametrize(const Path& w, const TerminalTime& T);

/// Finite-horizon functional of the local theory: quadrature of
/// int_0^T exp(-lambda t) phi(w(t0+t)) dt over the whole truncated grid.
/// The guard-gap truncation error is bounded by zeta_local_gap_bound.
double zeta_local(const Path& w, const TerminalTime& T, const SeparatingFunctional& fun);

/// Upper bound on the zeta mass lost to the guard gap: since phi <= 1,
/// it is at most exp(-lambda (T - gap)) / lambda.
double zeta_local_gap_bound(double lambda, double T, double gap);

struct LocalReduceParams {
  std::int64_t n_max = 500;
  double eta_tie = 1e-9;
  double eps_singleton = 1e-6;
};

/// Staged reduction with the local functionals (integration up to the
/// truncated terminal horizon instead of a budget horizon).
SelectionOutcome reduce_local(const LocalFunnel& f, const SeparatingFamily& family,
                              const LocalReduceParams& params);

}  // namespace fsel

#endif  // FSEL_LOCAL_HPP_
