#include "fsel/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace fsel {

Path::Path(TimeGrid grid, const StatePoint& start)
    : grid_(grid), dim_(start.dim()) {
  if (dim_ == 0) throw std::invalid_argument("Path: zero-dimensional state");
  data_.reserve(static_cast<std::size_t>(n_samples()) * dim_);
  for (std::int64_t k = 0; k < n_samples(); ++k)
    data_.insert(data_.end(), start.coords.begin(), start.coords.end());
}

Path::Path(TimeGrid grid, std::size_t dim, std::vector<double> data)
    : grid_(grid), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) throw std::invalid_argument("Path: zero-dimensional state");
  if (data_.size() != static_cast<std::size_t>(n_samples()) * dim_)
    throw std::invalid_argument("Path: sample count does not match grid");
  require_finite(data_, "Path");
}

std::span<const double> Path::sample(std::int64_t k) const {
  return {data_.data() + static_cast<std::size_t>(k) * dim_, dim_};
}

std::span<double> Path::sample_mut(std::int64_t k) {
  return {data_.data() + static_cast<std::size_t>(k) * dim_, dim_};
}

StatePoint Path::state_at(std::int64_t k) const {
  if (k < 0 || k >= n_samples())
    throw std::out_of_range("Path::state_at: index out of range");
  auto s = sample(k);
  return StatePoint(std::vector<double>(s.begin(), s.end()));
}

double Path::max_node_rho(const Path& other) const {
  if (dim_ != other.dim_ || n_samples() != other.n_samples())
    throw std::invalid_argument("Path::max_node_rho: shape mismatch");
  double m = 0.0;
  for (std::int64_t k = 0; k < n_samples(); ++k)
    m = std::max(m, rho(sample(k), other.sample(k)));
  return m;
}

bool Path::close_to(const Path& other, double tol) const {
  if (dim_ != other.dim_ || n_samples() != other.n_samples()) return false;
  return max_node_rho(other) <= tol;
}

Path shift(const Path& u, std::int64_t k) {
  if (k < 0 || k > u.grid().n_steps())
    throw std::out_of_range("shift: k out of range");
  std::vector<double> data(u.data().begin() + static_cast<std::ptrdiff_t>(k * u.dim()),
                           u.data().end());
  return Path(u.grid().shifted(k), u.dim(), std::move(data));
}

Path extend_const(const Path& v, double new_t_start) {
  const double gap = v.grid().t_start() - new_t_start;
  if (gap < -1e-12)
    throw std::invalid_argument("extend_const: new_t_start is after the path start");
  const double steps = gap / v.grid().step();
  const std::int64_t m = static_cast<std::int64_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(m)) > 1e-9)
    throw std::invalid_argument("extend_const: gap is not a whole number of steps");
  if (m == 0) return v;
  std::vector<double> data;
  data.reserve(v.data().size() + static_cast<std::size_t>(m) * v.dim());
  auto first = v.sample(0);
  for (std::int64_t i = 0; i < m; ++i) data.insert(data.end(), first.begin(), first.end());
  data.insert(data.end(), v.data().begin(), v.data().end());
  return Path(v.grid().extended_back(m), v.dim(), std::move(data));
}

Path splice(const Path& u, std::int64_t k, const Path& v) {
  if (k < 0 || k > u.grid().n_steps())
    throw std::out_of_range("splice: k out of range");
  if (v.grid().step() != u.grid().step())
    throw std::invalid_argument("splice: step mismatch");
  if (v.grid().t_start() != u.grid().time_at(k))
    throw std::invalid_argument("splice: v does not start at node k of u");
  if (v.dim() != u.dim())
    throw std::invalid_argument("splice: dimension mismatch");
  auto ju = u.sample(k);
  auto jv = v.sample(0);
  if (!std::equal(ju.begin(), ju.end(), jv.begin()))
    throw std::invalid_argument("splice: junction state mismatch (exact equality required)");
  std::vector<double> data(u.data().begin(),
                           u.data().begin() + static_cast<std::ptrdiff_t>(k * u.dim()));
  data.insert(data.end(), v.data().begin(), v.data().end());
  // v's frame extended back over u's prefix keeps node times bit-identical
  return Path(v.grid().extended_back(k), u.dim(), std::move(data));
}

StatePoint evaluate(const Path& u, double t) {
  const TimeGrid& g = u.grid();
  const double lo = g.t_start(), hi = g.t_end();
  if (t < lo - 1e-12 || t > hi + 1e-12)
    throw std::out_of_range("evaluate: t outside the path domain");
  double rel = (t - lo) / g.step();
  std::int64_t k = static_cast<std::int64_t>(std::floor(rel));
  k = std::clamp<std::int64_t>(k, 0, g.n_steps());
  // snap to a node when t matches one exactly
  if (t == g.time_at(k)) return u.state_at(k);
  if (k < g.n_steps() && t == g.time_at(k + 1)) return u.state_at(k + 1);
  if (k == g.n_steps()) return u.state_at(k);
  const double theta = (t - g.time_at(k)) / g.step();
  auto a = u.sample(k), b = u.sample(k + 1);
  std::vector<double> c(u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) c[i] = a[i] + theta * (b[i] - a[i]);
  return StatePoint(std::move(c));
}

namespace {

// s_l for l = 1..L relative to the path start, L = ceil(horizon); the
// running max is cumulative so each s_l is the sup over [0, l].
std::vector<double> window_sups(const Path& u, const Path& v) {
  const TimeGrid& g = u.grid();
  const int L = std::max(1, static_cast<int>(std::ceil(g.horizon() - 1e-12)));
  std::vector<double> sup(static_cast<std::size_t>(L), 0.0);
  double running = 0.0;
  std::int64_t k = 0;
  for (int l = 1; l <= L; ++l) {
    while (k <= g.n_steps() &&
           g.time_at(k) - g.t_start() <= static_cast<double>(l) + 1e-12) {
      running = std::max(running, rho(u.sample(k), v.sample(k)));
      ++k;
    }
    sup[static_cast<std::size_t>(l - 1)] = running;
  }
  return sup;
}

}  // namespace

double metric_d(const Path& u, const Path& v, int n_terms) {
  if (!(u.grid() == v.grid()) || u.dim() != v.dim())
    throw std::invalid_argument("metric_d: paths must share one grid");
  const double horizon = u.grid().horizon();
  if (static_cast<double>(n_terms) < horizon - 1e-12)
    throw std::invalid_argument("metric_d: n_terms below the grid horizon");
  const auto sup = window_sups(u, v);
  double acc = 0.0;
  double w = 1.0;
  for (int l = 1; l <= n_terms; ++l) {
    w *= 0.5;
    const double s = sup[std::min<std::size_t>(sup.size() - 1, static_cast<std::size_t>(l - 1))];
    acc += w * s / (1.0 + s);
  }
  return acc;
}

double metric_d_full(const Path& u, const Path& v) {
  if (!(u.grid() == v.grid()) || u.dim() != v.dim())
    throw std::invalid_argument("metric_d_full: paths must share one grid");
  const auto sup = window_sups(u, v);
  double acc = 0.0;
  double w = 1.0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    w *= 0.5;
    acc += w * sup[i] / (1.0 + sup[i]);
  }
  const double s = sup.back();
  acc += w * s / (1.0 + s);  // exact tail: remaining terms are constant
  return acc;
}

namespace {

void append_double(std::string& out, double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, r.ptr);
}

double parse_double(const std::string& tok) {
  double x = 0.0;
  auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw std::invalid_argument("path_from_csv: bad number '" + tok + "'");
  return x;
}

}  // namespace

std::string path_to_csv(const Path& u) {
  std::string out = "t";
  for (std::size_t i = 1; i <= u.dim(); ++i) out += ",x" + std::to_string(i);
  out += "\n";
  for (std::int64_t k = 0; k < u.n_samples(); ++k) {
    append_double(out, u.grid().time_at(k));
    for (double c : u.sample(k)) {
      out += ',';
      append_double(out, c);
    }
    out += "\n";
  }
  return out;
}

Path path_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("path_from_csv: empty input");
  std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (dim == 0 || line.substr(0, 1) != "t")
    throw std::invalid_argument("path_from_csv: bad header");
  std::vector<double> times;
  std::vector<double> data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    std::size_t col = 0;
    while (std::getline(row, tok, ',')) {
      const double x = parse_double(tok);
      if (col == 0)
        times.push_back(x);
      else
        data.push_back(x);
      ++col;
    }
    if (col != dim + 1) throw std::invalid_argument("path_from_csv: ragged row");
  }
  if (times.size() < 1) throw std::invalid_argument("path_from_csv: no rows");
  const double step = times.size() > 1 ? times[1] - times[0] : 1.0;
  TimeGrid grid(times[0], step, static_cast<std::int64_t>(times.size()) - 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double tk = grid.time_at(static_cast<std::int64_t>(k));
    if (std::abs(tk - times[k]) > 4e-16 * std::max(1.0, std::abs(times[k])))
      throw std::invalid_argument("path_from_csv: non-uniform time column");
  }
  return Path(grid, dim, std::move(data));
}

}  // namespace fsel
