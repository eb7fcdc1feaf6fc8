#include "fsel/local.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fsel {

TerminalTime TerminalTime::finite(double d) {
  if (!(d > 0.0) || !std::isfinite(d))
    throw std::invalid_argument("TerminalTime: duration must be positive and finite");
  return {d, false};
}

std::string LocalFunnel::to_json() const {
  nlohmann::json j = nlohmann::json::parse(funnel.to_json());
  j["terminal_T"] = terminal.is_infinite ? nlohmann::json("inf") : nlohmann::json(terminal.duration);
  j["guard_gap"] = guard_gap;
  return j.dump();
}

LocalFunnel build_local_funnel(const LocalRule& rule, double t0, const StatePoint& a,
                               std::int64_t n_steps, double guard_rel,
                               const UnrollLimits& limits) {
  if (!(guard_rel > 0.0) || guard_rel >= 1.0)
    throw std::invalid_argument("build_local_funnel: guard_rel must be in (0, 1)");
  if (n_steps < 1) throw std::invalid_argument("build_local_funnel: n_steps must be >= 1");
  const TerminalTime T = rule.terminal_time(t0, a);
  if (T.is_infinite)
    throw std::invalid_argument(
        "build_local_funnel: infinite terminal time; use the global machinery");
  const double covered = T.duration * (1.0 - guard_rel);
  TimeGrid grid(t0, covered / static_cast<double>(n_steps), n_steps);
  LocalFunnel f;
  f.funnel = unroll(rule, t0, a, grid, limits);
  f.terminal = T;
  f.guard_gap = T.duration - grid.horizon();
  return f;
}

LocalFunnel build_local_funnel_on(const LocalRule& rule, double t0, const StatePoint& a,
                                  const TimeGrid& grid, const UnrollLimits& limits) {
  const TerminalTime T = rule.terminal_time(t0, a);
  if (!T.is_infinite && grid.horizon() >= T.duration)
    throw std::invalid_argument("build_local_funnel_on: grid reaches past the terminal time");
  LocalFunnel f;
  f.funnel = unroll(rule, t0, a, grid, limits);
  f.terminal = T;
  f.guard_gap = T.is_infinite ? 0.0 : T.duration - grid.horizon();
  return f;
}

TTReport check_TT(const LocalRule& rule, const std::vector<std::pair<double, StatePoint>>& samples,
                  double delta, double lsc_tol) {
  if (!(delta > 0.0)) throw std::invalid_argument("check_TT: delta must be positive");
  TTReport report;
  for (const auto& [t0, a] : samples) {
    const TerminalTime here = rule.terminal_time(t0, a);
    const std::size_t d = a.dim();
    for (std::size_t c = 0; c < (d + 1) * 4; ++c) {
      const std::size_t coord = c / 4;
      const double off = (c % 2 == 0 ? 1.0 : -1.0) * (c % 4 < 2 ? delta : delta * 0.5);
      double tp = t0;
      StatePoint ap = a;
      std::string desc;
      if (coord == 0) {
        tp += off;
        desc = "t" + std::string(off > 0 ? "+" : "") + std::to_string(off);
      } else {
        ap.coords[coord - 1] += off;
        desc = "x" + std::to_string(coord - 1) + (off > 0 ? "+" : "") + std::to_string(off);
      }
      TerminalTime there;
      try {
        there = rule.terminal_time(tp, ap);
      } catch (const std::exception&) {
        continue;  // stencil point outside the admissible region
      }
      ++report.checked;
      if (there.is_infinite) continue;
      if (here.is_infinite || here.duration > there.duration + lsc_tol) {
        report.violations.push_back({t0, a,
                                     here.is_infinite
                                         ? std::numeric_limits<double>::infinity()
                                         : here.duration,
                                     there.duration, desc});
      }
    }
  }
  return report;
}

LS3Report check_LS3(const LocalFunnel& f, const LocalRule& rule, std::int64_t k,
                    double ls3_tol, double member_tol) {
  const Funnel& fun = f.funnel;
  if (k < 0 || k > fun.grid.n_steps()) throw std::out_of_range("check_LS3: k out of range");
  const double kdelta = static_cast<double>(k) * fun.grid.step();
  if (!f.terminal.is_infinite && kdelta >= f.terminal.duration)
    throw std::invalid_argument("check_LS3: k*delta reaches the terminal time");

  LS3Report report;
  report.k = k;
  for (std::size_t i = 0; i < fun.paths.size(); ++i) {
    const Path& u = fun.paths[i];
    const StatePoint node = u.state_at(k);
    TerminalTime sub;
    try {
      sub = rule.terminal_time(fun.grid.time_at(k), node);
    } catch (const std::exception& e) {
      report.violations.push_back({i, std::string("terminal time rejected the node: ") + e.what(), 0.0});
      continue;
    }
    ++report.checked;
    if (!f.terminal.is_infinite) {
      const double lower = f.terminal.duration - kdelta;
      if (!sub.is_infinite) {
        const double defect = sub.duration - lower;
        report.max_terminal_defect = std::max(report.max_terminal_defect, std::abs(defect));
        if (defect < -ls3_tol) {
          report.violations.push_back({i, "terminal time shrinks faster than the shift", defect});
          continue;
        }
      }
    }
    // shift membership against a fresh unroll from the node
    const Path target = shift(u, k);
    Funnel subf = unroll(rule, fun.grid.time_at(k), node, fun.grid.shifted(k));
    double best = std::numeric_limits<double>::infinity();
    for (const Path& p : subf.paths) {
      best = std::min(best, target.max_node_rho(p));
      if (best == 0.0) break;
    }
    if (!(best <= member_tol)) {
      report.violations.push_back({i, "shifted path not reproducible from its node", best});
    }
  }
  return report;
}

Path reparametrize(const Path& w, const TerminalTime& T) {
  if (T.is_infinite)
    throw std::invalid_argument("reparametrize: undefined for infinite terminal time");
  if (w.grid().horizon() >= T.duration)
    throw std::invalid_argument("reparametrize: path reaches past the terminal time");
  TimeGrid s_grid(0.0, w.grid().step() / T.duration, w.grid().n_steps());
  return Path(s_grid, w.dim(), w.data());
}

double zeta_local(const Path& w, const TerminalTime& T, const SeparatingFunctional& fun) {
  if (!T.is_infinite && w.grid().horizon() >= T.duration)
    throw std::invalid_argument("zeta_local: path reaches past the terminal time");
  DiscountedPhi F(fun.lambda(), w.grid().step(), fun.phi);
  return zeta_steps(w, F, w.grid().n_steps());
}

double zeta_local_gap_bound(double lambda, double T, double gap) {
  if (!(lambda > 0.0)) throw std::invalid_argument("zeta_local_gap_bound: lambda <= 0");
  return std::exp(-lambda * (T - gap)) / lambda;
}

SelectionOutcome reduce_local(const LocalFunnel& f, const SeparatingFamily& family,
                              const LocalReduceParams& params) {
  return staged_reduce(f.funnel, family, f.funnel.grid.n_steps(), params.n_max, params.eta_tie,
                       params.eps_singleton, nullptr);
}

}  // namespace fsel
