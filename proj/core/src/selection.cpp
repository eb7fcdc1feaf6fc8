#include "fsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fsel/parallel.hpp"

namespace fsel {

namespace {
const Path& representative_path(const Funnel& f, std::int64_t node_id);
}

std::string to_string(StopReason r) {
  return r == StopReason::singleton ? "singleton" : "budget_exhausted";
}

// ---------- value function ----------

std::vector<double> tree_values(const Funnel& f, const StepFunctional& F, std::int64_t m_steps) {
  if (f.paths.empty()) throw std::invalid_argument("tree_values: empty funnel");
  if (m_steps < 0 || m_steps > f.grid.n_steps())
    throw std::out_of_range("tree_values: m_steps out of range");
  const auto& nodes = f.tree.nodes;
  std::vector<double> value(nodes.size(), 0.0);
  const double d = F.discount();

  // leaves carry 0 (integration ends at m_steps); walk nodes in reverse
  // creation order so children are finished before their parents.
  for (std::size_t idx = nodes.size(); idx-- > 0;) {
    const auto& node = nodes[idx];
    if (node.children.empty()) {
      value[idx] = 0.0;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t child_id : node.children) {
      const auto& child = nodes[static_cast<std::size_t>(child_id)];
      // fold the arc's steps backward, seeding with the child value;
      // this reproduces the per-path Horner recursion bit for bit
      double acc = (child.k >= m_steps) ? 0.0 : value[static_cast<std::size_t>(child_id)];
      const Path& rep = representative_path(f, child_id);
      for (std::int64_t k = std::min(child.k, m_steps) - 1; k >= node.k; --k)
        acc = F.step_value(rep.sample(k), rep.sample(k + 1)) + d * acc;
      if (node.k >= m_steps) acc = 0.0;
      best = std::max(best, acc);
    }
    value[idx] = best;
  }
  return value;
}

namespace {
// first path whose root-to-leaf chain passes through `node_id`
const Path& representative_path(const Funnel& f, std::int64_t node_id) {
  const auto& nodes = f.tree.nodes;
  std::int64_t cur = node_id;
  while (nodes[static_cast<std::size_t>(cur)].leaf_path < 0) {
    if (nodes[static_cast<std::size_t>(cur)].children.empty())
      throw std::logic_error("representative_path: childless non-leaf");
    cur = nodes[static_cast<std::size_t>(cur)].children.front();
  }
  return f.paths[static_cast<std::size_t>(nodes[static_cast<std::size_t>(cur)].leaf_path)];
}
}  // namespace

ValueTable value_function(const Funnel& f, const SeparatingFunctional& fun,
                          const TruncationBudget& budget) {
  budget.validate(fun.lambda());
  const std::int64_t m = aligned_step_count(f.grid, budget.horizon_T);
  DiscountedPhi F(fun.lambda(), f.grid.step(), fun.phi);
  const std::vector<double> values = tree_values(f, F, m);

  ValueTable table;
  table.functional = fun;
  table.root_value = values.empty() ? 0.0 : values[0];
  std::map<std::pair<std::int64_t, std::vector<double>>, double> seen;
  for (std::size_t idx = 0; idx < f.tree.nodes.size(); ++idx) {
    const auto& node = f.tree.nodes[idx];
    const Path& rep = representative_path(f, static_cast<std::int64_t>(idx));
    auto s = rep.sample(node.k);
    std::vector<double> key(s.begin(), s.end());
    auto [it, fresh] = seen.emplace(std::make_pair(node.k, key), values[idx]);
    if (!fresh) continue;
    table.entries.push_back(
        {f.grid.time_at(node.k), StatePoint(std::move(key)), values[idx]});
  }
  return table;
}

// ---------- argmax and reduction ----------

namespace {

std::vector<double> zeta_per_path(const Funnel& f, const StepFunctional& F,
                                  std::int64_t m_steps) {
  std::vector<double> z(f.paths.size());
  parallel_for(f.paths.size(),
               [&](std::size_t i) { z[i] = zeta_steps(f.paths[i], F, m_steps); });
  return z;
}

std::vector<std::size_t> argmax_indices(const std::vector<double>& z, double eta_tie) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] >= m - eta_tie) keep.push_back(i);
  return keep;
}

bool diameter_below(const std::vector<Path>& paths, double eps, double* diameter) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      worst = std::max(worst, metric_d_full(paths[i], paths[j]));
      if (worst >= eps) {
        if (diameter) *diameter = worst;
        return false;
      }
    }
  if (diameter) *diameter = worst;
  return true;
}

}  // namespace

Funnel argmax_set(const Funnel& f, const StepFunctional& F, std::int64_t m_steps,
                  double eta_tie) {
  if (f.paths.empty()) throw std::invalid_argument("argmax_set: empty funnel");
  if (eta_tie < 0.0) throw std::invalid_argument("argmax_set: eta_tie must be >= 0");
  return f.subset(argmax_indices(zeta_per_path(f, F, m_steps), eta_tie));
}

Funnel argmax_set(const Funnel& f, const SeparatingFunctional& fun,
                  const TruncationBudget& budget, double eta_tie) {
  budget.validate(fun.lambda());
  const std::int64_t m = aligned_step_count(f.grid, budget.horizon_T);
  DiscountedPhi F(fun.lambda(), f.grid.step(), fun.phi);
  return argmax_set(f, F, m, eta_tie);
}

SelectionOutcome staged_reduce(const Funnel& f, const SeparatingFamily& family,
                               std::int64_t m_steps, std::int64_t n_max, double eta_tie,
                               double eps_singleton, const TruncationBudget* budget_check) {
  if (f.paths.empty()) throw std::invalid_argument("reduce: empty funnel");
  SelectionOutcome out;
  out.t0 = f.t0;
  out.anchor = f.anchor;

  std::vector<std::size_t> survivors(f.paths.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) survivors[i] = i;
  std::vector<Path> pool = f.paths;

  const std::int64_t m = m_steps;

  bool singleton = diameter_below(pool, eps_singleton, nullptr);
  std::int64_t stage = 0;
  while (!singleton && stage < n_max) {
    ++stage;
    const SeparatingFunctional fun = family.functional(stage - 1);
    if (budget_check) budget_check->validate(fun.lambda());
    DiscountedPhi F(fun.lambda(), f.grid.step(), fun.phi);

    Funnel view;  // light wrapper over the surviving paths
    view.t0 = f.t0;
    view.anchor = f.anchor;
    view.grid = f.grid;
    view.paths = pool;
    const std::vector<double> z = zeta_per_path(view, F, m);
    const std::vector<std::size_t> keep = argmax_indices(z, params.eta_tie);

    std::vector<Path> next;
    std::vector<std::size_t> next_idx;
    next.reserve(keep.size());
    for (std::size_t i : keep) {
      next.push_back(std::move(pool[i]));
      next_idx.push_back(survivors[i]);
    }
    pool = std::move(next);
    survivors = std::move(next_idx);

    ReductionStage rec;
    rec.stage = stage;
    rec.lambda_num = fun.lambda_num;
    rec.lambda_den = fun.lambda_den;
    rec.phi = fun.phi.describe();
    rec.survivors = pool.size();
    double diam = 0.0;
    singleton = diameter_below(pool, eps_singleton, &diam);
    if (!singleton) {
      // diameter_below early-exits; record the exact value for the trace
      Funnel tmp;
      tmp.grid = f.grid;
      tmp.paths = pool;
      diam = tmp.diameter();
    }
    rec.diameter = diam;
    out.trace.stages.push_back(std::move(rec));
  }

  out.trace.stop_reason = singleton ? StopReason::singleton : StopReason::budget_exhausted;
  out.selected = f.paths[survivors.front()];
  return out;
}

SelectionOutcome reduce(const Funnel& f, const SeparatingFamily& family,
                        const ReduceParams& params) {
  const std::int64_t m = aligned_step_count(f.grid, params.budget.horizon_T);
  return staged_reduce(f, family, m, params.n_max, params.eta_tie, params.eps_singleton,
                       &params.budget);
}

std::string SelectionOutcome::to_json() const {
  nlohmann::json j;
  j["t0"] = t0;
  j["anchor"] = anchor.coords;
  j["selected_path_csv"] = path_to_csv(selected);
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : trace.stages) {
    stages.push_back({{"n", s.stage},
                      {"lambda", std::to_string(s.lambda_num) + "/" + std::to_string(s.lambda_den)},
                      {"phi", s.phi},
                      {"survivors", s.survivors},
                      {"diameter", s.diameter}});
  }
  j["trace"] = std::move(stages);
  j["stop_reason"] = to_string(trace.stop_reason);
  return j.dump();
}

// ---------- semi-process ----------

const SelectionOutcome& SemiProcess::selection(double t0, const StatePoint& a) {
  const std::pair<double, std::vector<double>> key{t0, a.coords};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  TimeGrid grid(t0, grid_template.step(), grid_template.n_steps());
  Funnel f = unroll(*rule, t0, a, grid, limits);
  SelectionOutcome out = reduce(f, family, params);
  return cache.emplace(key, std::move(out)).first->second;
}

StatePoint SemiProcess::transit(double t1, double t0, const StatePoint& a) {
  return evaluate(selection(t0, a).selected, t1);
}

SemiProcess build_semi_process(std::shared_ptr<const BranchRule> rule,
                               const std::vector<std::pair<double, StatePoint>>& samples,
                               const TimeGrid& grid_template, const SeparatingFamily& family,
                               const ReduceParams& params, const UnrollLimits& limits) {
  SemiProcess p{std::move(rule), grid_template, family, params, limits, {}, {}};
  std::vector<std::optional<SelectionOutcome>> results(samples.size());
  std::vector<std::string> errors(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    try {
      TimeGrid grid(samples[i].first, grid_template.step(), grid_template.n_steps());
      Funnel f = unroll(*p.rule, samples[i].first, samples[i].second, grid, limits);
      results[i] = reduce(f, family, params);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (results[i]) {
      p.cache.emplace(std::make_pair(samples[i].first, samples[i].second.coords),
                      std::move(*results[i]));
    } else {
      p.errors.push_back({samples[i].first, samples[i].second, errors[i]});
    }
  }
  return p;
}

SemigroupReport verify_semigroup(SemiProcess& p, const std::vector<SemigroupTriple>& triples,
                                 double tol) {
  SemigroupReport report;
  report.tol = tol;
  report.checks.resize(triples.size());
  // resolve root selections up front so the parallel phase only reads
  // the cache; per-root errors surface again inside the triple loop
  for (const auto& tr : triples) {
    try {
      p.selection(tr.t0, tr.a);
    } catch (const std::exception&) {
    }
  }
  parallel_for(triples.size(), [&](std::size_t i) {
    SemigroupCheck& chk = report.checks[i];
    chk.triple = triples[i];
    const auto& tr = triples[i];
    try {
      if (!(tr.t0 <= tr.t1 && tr.t1 <= tr.t2))
        throw std::invalid_argument("verify_semigroup: triple out of order");
      TimeGrid root_grid(tr.t0, p.grid_template.step(), p.grid_template.n_steps());
      const std::int64_t k1 = root_grid.index_of(tr.t1);
      root_grid.index_of(tr.t2);  // validates alignment

      const auto it = p.cache.find({tr.t0, tr.a.coords});
      if (it == p.cache.end())
        throw std::runtime_error("verify_semigroup: root selection unavailable");
      const SelectionOutcome& root_sel = it->second;
      const StatePoint b = evaluate(root_sel.selected, tr.t1);

      // re-run the reduction from the intermediate node, same frame
      Funnel mid = unroll(*p.rule, tr.t1, b, root_grid.shifted(k1), p.limits);
      const SelectionOutcome mid_sel = reduce(mid, p.family, p.params);

      const StatePoint via = evaluate(mid_sel.selected, tr.t2);
      const StatePoint direct = evaluate(root_sel.selected, tr.t2);
      chk.deviation = rho(via, direct);
      chk.ok = chk.deviation <= tol;
    } catch (const std::exception& e) {
      chk.error = e.what();
      chk.ok = false;
    }
  });
  for (const auto& chk : report.checks) {
    report.worst_deviation = std::max(report.worst_deviation, chk.deviation);
    if (!chk.ok) ++report.failures;
  }
  return report;
}

}  // namespace fsel
