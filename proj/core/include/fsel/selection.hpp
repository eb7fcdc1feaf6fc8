#ifndef FSEL_SELECTION_HPP_
#define FSEL_SELECTION_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fsel/funnel.hpp"
#include "fsel/separating.hpp"
#include "fsel/step_functional.hpp"

namespace fsel {

/// The value function m_zeta over a funnel tree: one entry per tree node
/// (time, state), each equal to the max of zeta over the sub-funnel
/// rooted there, computed by backward recursion over the tree.
struct ValueTable {
  struct Entry {
    double t = 0.0;
    StatePoint state;
    double value = 0.0;
  };
  std::vector<Entry> entries;  // deduplicated, tree order
  SeparatingFunctional functional;
  double root_value = 0.0;
};

enum class StopReason { singleton, budget_exhausted };

std::string to_string(StopReason r);

/// One reduction stage: which functional ran and what survived it.
struct ReductionStage {
  std::int64_t stage = 0;  // 1-based position in the enumeration order
  std::int64_t lambda_num = 1;
  std::int64_t lambda_den = 1;
  std::string phi;
  std::size_t survivors = 0;
  double diameter = 0.0;
};

struct ReductionTrace {
  std::vector<ReductionStage> stages;
  StopReason stop_reason = StopReason::singleton;
};

struct SelectionOutcome {
  double t0 = 0.0;
  StatePoint anchor;
  Path selected;
  ReductionTrace trace;

  /// {t0, anchor, selected_path_csv, trace, stop_reason}; deterministic.
  std::string to_json() const;
};

struct ReduceParams {
  std::int64_t n_max = 500;
  double eta_tie = 1e-9;
  double eps_singleton = 1e-6;
  TruncationBudget budget;
};

/// Per-tree-node values of the step functional over the first m_steps
/// grid steps, indexed like f.tree.nodes. Bitwise consistent with the
/// per-path backward Horner evaluation of zeta_steps.
std::vector<double> tree_values(const Funnel& f, const StepFunctional& F, std::int64_t m_steps);

ValueTable value_function(const Funnel& f, const SeparatingFunctional& fun,
                          const TruncationBudget& budget);

/// Sub-funnel of paths with zeta >= max - eta_tie. Never empty.
Funnel argmax_set(const Funnel& f, const SeparatingFunctional& fun,
                  const TruncationBudget& budget, double eta_tie);

/// Same, for an arbitrary step functional over m_steps grid steps.
Funnel argmax_set(const Funnel& f, const StepFunctional& F, std::int64_t m_steps,
                  double eta_tie);

/// Krylov-style staged reduction: apply argmax_set for the functionals
/// n = 1..n_max in enumeration order, stopping once the survivor set has
/// diameter < eps_singleton (metric_d with its exact tail). The selected
/// path is the first survivor in canonical tree order; the trace records
/// each stage. If n_max is exhausted first the outcome is flagged via
/// stop_reason = budget_exhausted and the first survivor is still returned.
SelectionOutcome reduce(const Funnel& f, const SeparatingFamily& family,
                        const ReduceParams& params);

/// Reduction core shared with the local machinery: integrates over the
/// first m_steps grid steps; budget_check, when given, validates each
/// stage's lambda against the truncation budget.
SelectionOutcome staged_reduce(const Funnel& f, const SeparatingFamily& family,
                               std::int64_t m_steps, std::int64_t n_max, double eta_tie,
                               double eps_singleton, const TruncationBudget* budget_check);

/// A two-parameter transition family realized by per-anchor selections.
struct SemiProcess {
  std::shared_ptr<const BranchRule> rule;
  TimeGrid grid_template;  // anchored per query: (t0, step, n_steps)
  SeparatingFamily family;
  ReduceParams params;
  UnrollLimits limits;

  std::map<std::pair<double, std::vector<double>>, SelectionOutcome> cache;

  struct SampleError {
    double t0 = 0.0;
    StatePoint anchor;
    std::string message;
  };
  std::vector<SampleError> errors;

  /// Selection at (t0, a); cached. Grid frame: TimeGrid(t0, step, n).
  const SelectionOutcome& selection(double t0, const StatePoint& a);

  /// U(t1, t0)(a) = evaluate(selected, t1).
  StatePoint transit(double t1, double t0, const StatePoint& a);
};

/// Runs unroll + reduce for every (t0, a) sample and caches the
/// outcomes. Per-sample errors are recorded, not rethrown.
SemiProcess build_semi_process(std::shared_ptr<const BranchRule> rule,
                               const std::vector<std::pair<double, StatePoint>>& samples,
                               const TimeGrid& grid_template, const SeparatingFamily& family,
                               const ReduceParams& params, const UnrollLimits& limits = {});

struct SemigroupTriple {
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  StatePoint a;
};

struct SemigroupCheck {
  SemigroupTriple triple;
  double deviation = 0.0;
  bool ok = false;
  std::string error;  // non-empty when the triple could not be evaluated
};

struct SemigroupReport {
  double tol = 0.0;
  std::vector<SemigroupCheck> checks;
  double worst_deviation = 0.0;
  std::size_t failures = 0;

  bool ok() const { return failures == 0; }
};

/// Checks rho(U(t2,t1)(U(t1,t0)(a)), U(t2,t0)(a)) <= tol per triple.
/// The intermediate selection is re-run through reduce from its node on
/// the shifted grid — nothing is reused from the root reduction.
SemigroupReport verify_semigroup(SemiProcess& p, const std::vector<SemigroupTriple>& triples,
                                 double tol);

}  // namespace fsel

#endif  // FSEL_SELECTION_HPP_
