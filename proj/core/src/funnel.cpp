#include "fsel/funnel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fsel {

std::int64_t TreeIndex::leaf_count() const {
  std::int64_t n = 0;
  for (const auto& node : nodes)
    if (node.leaf_path >= 0) ++n;
  return n;
}

double Funnel::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      d = std::max(d, metric_d_full(paths[i], paths[j]));
  return d;
}

namespace {

// Divergence-point tree over an ordered path set: one node per maximal
// shared prefix. Enough structure for subset funnels; unroll builds the
// exact arc tree itself.
TreeIndex rebuild_tree(const std::vector<Path>& paths) {
  TreeIndex tree;
  if (paths.empty()) return tree;
  tree.nodes.push_back({0, -1, 0, {}, paths.size() == 1 ? std::int64_t{0} : -1});
  std::vector<std::int64_t> last_chain{0};  // node ids along the previous path
  for (std::size_t p = 1; p < paths.size(); ++p) {
    const Path& prev = paths[p - 1];
    const Path& cur = paths[p];
    std::int64_t k = 0;
    const std::int64_t n = cur.n_samples();
    while (k < n) {
      auto a = prev.sample(k), b = cur.sample(k);
      if (!std::equal(a.begin(), a.end(), b.begin())) break;
      ++k;
    }
    const std::int64_t fork_k = std::max<std::int64_t>(0, k - 1);
    // find the chain node at fork_k (chain is sorted by k)
    std::size_t ci = 0;
    while (ci + 1 < last_chain.size() && tree.nodes[last_chain[ci + 1]].k <= fork_k) ++ci;
    const std::int64_t fork_node = last_chain[ci];
    const int ordinal = static_cast<int>(tree.nodes[fork_node].children.size()) + 1;
    tree.nodes.push_back({cur.grid().n_steps(), fork_node, ordinal, {},
                          static_cast<std::int64_t>(p)});
    const std::int64_t leaf = static_cast<std::int64_t>(tree.nodes.size()) - 1;
    tree.nodes[fork_node].children.push_back(leaf);
    last_chain.resize(ci + 1);
    last_chain.push_back(leaf);
  }
  if (paths.size() > 1 && tree.nodes[0].leaf_path < 0 && tree.nodes[0].children.empty())
    tree.nodes[0].leaf_path = 0;
  return tree;
}

}  // namespace

Funnel Funnel::subset(const std::vector<std::size_t>& keep) const {
  Funnel out;
  out.t0 = t0;
  out.anchor = anchor;
  out.grid = grid;
  out.paths.reserve(keep.size());
  for (std::size_t i : keep) {
    if (i >= paths.size()) throw std::out_of_range("Funnel::subset: bad index");
    out.paths.push_back(paths[i]);
  }
  out.tree = rebuild_tree(out.paths);
  return out;
}

std::string Funnel::to_json() const {
  nlohmann::json j;
  j["t0"] = t0;
  j["anchor"] = anchor.coords;
  j["delta"] = grid.step();
  j["n_steps"] = grid.n_steps();
  nlohmann::json jp = nlohmann::json::array();
  for (const Path& p : paths) {
    nlohmann::json states = nlohmann::json::array();
    for (std::int64_t k = 0; k < p.n_samples(); ++k) {
      auto s = p.sample(k);
      states.push_back(std::vector<double>(s.begin(), s.end()));
    }
    jp.push_back(std::move(states));
  }
  j["paths"] = std::move(jp);
  return j.dump();
}

Funnel unroll(const BranchRule& rule, double t0, const StatePoint& a, const TimeGrid& grid,
              const UnrollLimits& limits) {
  if (grid.t_start() != t0 && std::abs(grid.t_start() - t0) > 1e-12 * std::max(1.0, std::abs(t0)))
    throw std::invalid_argument("unroll: grid does not start at t0");
  require_finite(a.coords, "unroll anchor");

  Funnel f;
  f.t0 = grid.t_start();
  f.anchor = a;
  f.grid = grid;
  f.tree.nodes.push_back({0, -1, 0, {}, -1});

  const std::size_t dim = a.dim();
  std::vector<double> buf(a.coords);  // samples of the current prefix, flat

  const std::function<void(std::int64_t, std::int64_t)> visit =
      [&](std::int64_t k, std::int64_t node_id) {
        if (k == grid.n_steps()) {
          f.tree.nodes[node_id].leaf_path = static_cast<std::int64_t>(f.paths.size());
          f.paths.emplace_back(grid, dim, buf);
          return;
        }
        const StatePoint here(std::vector<double>(buf.end() - static_cast<std::ptrdiff_t>(dim),
                                                  buf.end()));
        ArcContext ctx{grid.step(), grid.n_steps() - k};
        std::vector<Arc> arcs = rule.arcs(grid.time_at(k), here, ctx);
        if (arcs.empty()) {
          std::ostringstream os;
          os << "unroll: rule produced no arcs at node (t=" << grid.time_at(k) << ", k=" << k
             << ") — S1 non-emptiness violated";
          throw std::runtime_error(os.str());
        }
        int ordinal = 0;
        for (const Arc& arc : arcs) {
          if (arc.dim != dim) throw std::invalid_argument("unroll: arc dimension mismatch");
          if (arc.steps() < 1 || arc.steps() > ctx.remaining)
            throw std::invalid_argument("unroll: arc span exceeds remaining grid");
          if (f.paths.size() >= limits.max_paths) {
            std::ostringstream os;
            os << "unroll: path cap " << limits.max_paths << " exceeded while branching at (t="
               << grid.time_at(k) << ", k=" << k << ")";
            throw std::runtime_error(os.str());
          }
          require_finite(arc.data, "unroll arc");
          const std::size_t mark = buf.size();
          buf.insert(buf.end(), arc.data.begin(), arc.data.end());
          f.tree.nodes.push_back({k + arc.steps(), node_id, ordinal, {}, -1});
          const std::int64_t child = static_cast<std::int64_t>(f.tree.nodes.size()) - 1;
          f.tree.nodes[node_id].children.push_back(child);
          visit(k + arc.steps(), child);
          buf.resize(mark);
          ++ordinal;
        }
      };
  visit(0, 0);
  return f;
}

AxiomReport check_S3(const Funnel& f, const BranchRule& rule, std::int64_t k, double tol,
                     const UnrollLimits& limits) {
  if (k < 0 || k > f.grid.n_steps())
    throw std::out_of_range("check_S3: k out of range");
  AxiomReport report;
  report.axiom = "S3";
  report.k = k;

  std::map<std::vector<double>, Funnel> sub_cache;
  for (std::size_t i = 0; i < f.paths.size(); ++i) {
    const Path target = shift(f.paths[i], k);
    auto node_state = f.paths[i].sample(k);
    std::vector<double> key(node_state.begin(), node_state.end());
    auto it = sub_cache.find(key);
    if (it == sub_cache.end()) {
      Funnel sub = unroll(rule, f.grid.time_at(k), StatePoint(key), f.grid.shifted(k), limits);
      it = sub_cache.emplace(std::move(key), std::move(sub)).first;
    }
    const Funnel& sub = it->second;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < sub.paths.size(); ++j) {
      const double d = target.max_node_rho(sub.paths[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
      if (best == 0.0) break;
    }
    ++report.checked;
    if (!(best <= tol)) {
      report.violations.push_back(
          {i, k, best_j, best,
           "shifted path not reproducible by the generator at its node"});
    }
  }
  return report;
}

AxiomReport check_S4(const Funnel& f, const BranchRule& rule, std::int64_t k, double tol) {
  if (k < 0 || k > f.grid.n_steps())
    throw std::out_of_range("check_S4: k out of range");
  AxiomReport report;
  report.axiom = "S4";
  report.k = k;

  // group paths by exact junction state
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < f.paths.size(); ++i) {
    auto s = f.paths[i].sample(k);
    groups[std::vector<double>(s.begin(), s.end())].push_back(i);
  }

  for (const auto& [state, members] : groups) {
    // the generator must still offer arcs at the junction (except at the
    // terminal node, where paths end)
    if (k < f.grid.n_steps()) {
      ArcContext ctx{f.grid.step(), f.grid.n_steps() - k};
      std::vector<Arc> arcs;
      try {
        arcs = rule.arcs(f.grid.time_at(k), StatePoint(state), ctx);
      } catch (const std::exception& e) {
        report.violations.push_back({members.front(), k, 0, 0.0,
                                     std::string("rule rejects a reachable node: ") + e.what()});
        continue;
      }
      if (arcs.empty()) {
        report.violations.push_back(
            {members.front(), k, 0, 0.0, "rule offers no arcs at a reachable node"});
        continue;
      }
    }
    // distinct suffixes through this node
    std::vector<Path> suffixes;
    for (std::size_t i : members) {
      Path s = shift(f.paths[i], k);
      bool seen = false;
      for (const Path& t : suffixes)
        if (t.same_samples(s)) {
          seen = true;
          break;
        }
      if (!seen) suffixes.push_back(std::move(s));
    }
    for (std::size_t i : members) {
      for (std::size_t v = 0; v < suffixes.size(); ++v) {
        const Path spliced = splice(f.paths[i], k, suffixes[v]);
        double best = std::numeric_limits<double>::infinity();
        for (const Path& p : f.paths) {
          best = std::min(best, spliced.max_node_rho(p));
          if (best == 0.0) break;
        }
        ++report.checked;
        if (!(best <= tol)) {
          report.violations.push_back(
              {i, k, v, best, "spliced path missing from the funnel"});
        }
      }
    }
  }
  return report;
}

}  // namespace fsel
