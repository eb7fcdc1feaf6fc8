#include "fsel/separating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fsel/step_functional.hpp"

namespace fsel {

// ---------- test functions ----------

double TestFunction::operator()(std::span<const double> x) const {
  switch (kind) {
    case PhiKind::gaussian_bump: {
      if (x.size() != center.size())
        throw std::invalid_argument("TestFunction: dimension mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        s += d * d;
      }
      return std::exp(-s);
    }
    case PhiKind::coordinate_sigmoid: {
      if (axis >= x.size())
        throw std::invalid_argument("TestFunction: axis out of range");
      const double y = static_cast<double>(slope_sign) * (x[axis] - offset);
      return 1.0 / (1.0 + std::exp(-y));
    }
  }
  return 0.0;
}

namespace {
// sup |phi^(i)| along a unit direction, i = 1..4 (rounded up)
const double kBumpSups[4] = {0.86, 2.0, 4.0, 12.5};
const double kSigmoidSups[4] = {0.25, 0.10, 0.13, 0.20};

void append_num(std::string& s, double x) {
  std::ostringstream os;
  os << x;
  s += os.str();
}
}  // namespace

const double* TestFunction::derivative_sups(PhiKind kind) {
  return kind == PhiKind::gaussian_bump ? kBumpSups : kSigmoidSups;
}

std::string TestFunction::describe() const {
  std::string s;
  if (kind == PhiKind::gaussian_bump) {
    s = "bump(";
    for (std::size_t i = 0; i < center.size(); ++i) {
      if (i) s += ',';
      append_num(s, center[i]);
    }
    s += ')';
  } else {
    s = "sigmoid(";
    s += slope_sign > 0 ? '+' : '-';
    s += ",axis" + std::to_string(axis) + ",";
    append_num(s, offset);
    s += ')';
  }
  return s;
}

std::string SeparatingFunctional::describe() const {
  return "zeta[lambda=" + std::to_string(lambda_num) + "/" + std::to_string(lambda_den) +
         "," + phi.describe() + "]";
}

// ---------- enumeration ----------

PhiFamily phi_family_from_string(const std::string& s) {
  if (s == "bumps") return PhiFamily::bumps;
  if (s == "sigmoids") return PhiFamily::sigmoids;
  if (s == "mixed") return PhiFamily::mixed;
  throw std::invalid_argument("unknown phi family '" + s + "'");
}

std::string to_string(PhiFamily f) {
  switch (f) {
    case PhiFamily::bumps: return "bumps";
    case PhiFamily::sigmoids: return "sigmoids";
    case PhiFamily::mixed: return "mixed";
  }
  return "?";
}

SignOrder sign_order_from_string(const std::string& s) {
  if (s == "plus_first") return SignOrder::plus_first;
  if (s == "minus_first") return SignOrder::minus_first;
  throw std::invalid_argument("unknown sign order '" + s + "'");
}

std::string to_string(SignOrder s) {
  return s == SignOrder::plus_first ? "plus_first" : "minus_first";
}

SeparatingFamily::SeparatingFamily(PhiFamily family, std::size_t dim, SignOrder order)
    : family_(family), dim_(dim), order_(order) {
  if (dim == 0) throw std::invalid_argument("SeparatingFamily: dim must be positive");
}

std::pair<std::int64_t, std::int64_t> SeparatingFamily::lambda_at(std::int64_t i) {
  if (i < 0) throw std::invalid_argument("lambda_at: negative index");
  if (i == 0) return {1, 1};
  const std::int64_t m = (i + 1) / 2 + 1;  // 2, 2, 3, 3, ...
  if (i % 2 == 1) return {1, m};           // 1/2, 1/3, ...
  return {m, 1};                           // 2, 3, ...
}

namespace {

// 1-d dyadic center sequence: level l emits the points of the grid
// 2^-l Z inside the box [-(l+1), l+1] that no earlier level contains,
// ordered 0, +h, -h, +2h, -2h, ...
bool in_earlier_level(double p, int level) {
  for (int m = 0; m < level; ++m) {
    const double h = std::ldexp(1.0, -m);
    const double q = p / h;
    if (q == std::floor(q) && std::abs(p) <= static_cast<double>(m + 1)) return true;
  }
  return false;
}

}  // namespace

double SeparatingFamily::scalar_center(std::int64_t j) {
  if (j < 0) throw std::invalid_argument("scalar_center: negative index");
  std::int64_t seen = 0;
  for (int level = 0; level < 48; ++level) {
    const double h = std::ldexp(1.0, -level);
    const std::int64_t jmax = static_cast<std::int64_t>((level + 1) / h);
    for (std::int64_t a = 0; a <= jmax; ++a) {
      for (int sgn = 0; sgn < (a == 0 ? 1 : 2); ++sgn) {
        const double p = (sgn == 0 ? 1.0 : -1.0) * static_cast<double>(a) * h;
        if (in_earlier_level(p, level)) continue;
        if (seen == j) return p;
        ++seen;
      }
    }
  }
  throw std::runtime_error("scalar_center: index out of enumeration range");
}

namespace {

// inverse Cantor pairing: n -> (i, j) with n = T(i+j) + i
std::pair<std::int64_t, std::int64_t> cantor_unpair(std::int64_t n) {
  std::int64_t s = 0;
  while ((s + 1) * (s + 2) / 2 <= n) ++s;
  const std::int64_t i = n - s * (s + 1) / 2;
  return {i, s - i};
}

}  // namespace

TestFunction SeparatingFamily::phi_at(std::int64_t j) const {
  if (j < 0) throw std::invalid_argument("phi_at: negative index");
  switch (family_) {
    case PhiFamily::bumps: {
      TestFunction f;
      f.kind = PhiKind::gaussian_bump;
      f.center.resize(dim_);
      if (dim_ == 1) {
        f.center[0] = scalar_center(j);
      } else {
        std::int64_t rest = j;
        for (std::size_t a = 0; a + 1 < dim_; ++a) {
          auto [i, r] = cantor_unpair(rest);
          f.center[a] = scalar_center(i);
          rest = r;
        }
        f.center[dim_ - 1] = scalar_center(rest);
      }
      return f;
    }
    case PhiFamily::sigmoids: {
      TestFunction f;
      f.kind = PhiKind::coordinate_sigmoid;
      const int parity = static_cast<int>(j % 2);
      const bool plus = (order_ == SignOrder::plus_first) ? parity == 0 : parity == 1;
      f.slope_sign = plus ? +1 : -1;
      const std::int64_t rest = j / 2;
      f.axis = static_cast<std::size_t>(rest % static_cast<std::int64_t>(dim_));
      f.offset = scalar_center(rest / static_cast<std::int64_t>(dim_));
      return f;
    }
    case PhiFamily::mixed: {
      SeparatingFamily sub(j % 2 == 0 ? PhiFamily::bumps : PhiFamily::sigmoids, dim_, order_);
      return sub.phi_at(j / 2);
    }
  }
  throw std::logic_error("phi_at: bad family");
}

SeparatingFunctional SeparatingFamily::functional(std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("functional: negative index");
  auto [i, j] = cantor_unpair(n);
  SeparatingFunctional f;
  f.index_n = n;
  auto [num, den] = lambda_at(i);
  f.lambda_num = num;
  f.lambda_den = den;
  f.phi = phi_at(j);
  return f;
}

// ---------- budget and quadrature ----------

double TruncationBudget::tail_bound(double lambda) const {
  return std::exp(-lambda * horizon_T) / lambda;
}

void TruncationBudget::validate(double lambda) const {
  if (!(lambda > 0.0)) throw std::domain_error("TruncationBudget: lambda must be positive");
  if (tail_bound(lambda) > epsilon_tail) {
    std::ostringstream os;
    os << "TruncationBudget: horizon " << horizon_T << " too short for lambda=" << lambda
       << " (tail " << tail_bound(lambda) << " > epsilon_tail " << epsilon_tail << ")";
    throw std::domain_error(os.str());
  }
}

double zeta_quadrature_bound(double lambda, double dt, PhiKind kind, double V) {
  const double* L = TestFunction::derivative_sups(kind);
  const double M4 = std::pow(lambda, 4) + 4.0 * std::pow(lambda, 3) * L[0] * V +
                    6.0 * lambda * lambda * L[1] * V * V +
                    4.0 * lambda * L[2] * V * V * V + L[3] * V * V * V * V;
  const double per_step = std::pow(dt, 5) / 2880.0 * M4;
  const double geo = 1.0 / (1.0 - std::exp(-lambda * dt));
  return per_step * geo;
}

std::int64_t aligned_step_count(const TimeGrid& grid, double horizon_T) {
  if (!(horizon_T > 0.0)) throw std::domain_error("horizon_T must be positive");
  const double m_real = horizon_T / grid.step();
  const std::int64_t m = static_cast<std::int64_t>(std::llround(m_real));
  if (std::abs(m_real - static_cast<double>(m)) > 1e-9 * std::max(1.0, m_real))
    throw std::domain_error("horizon_T is not a whole number of grid steps");
  if (m > grid.n_steps())
    throw std::domain_error("path horizon shorter than the budget horizon");
  if (m < 1) throw std::domain_error("horizon_T shorter than one grid step");
  return m;
}

double zeta_steps(const Path& w, const StepFunctional& F, std::int64_t n_steps) {
  if (n_steps < 0 || n_steps > w.grid().n_steps())
    throw std::out_of_range("zeta_steps: step count out of range");
  const double d = F.discount();
  double acc = 0.0;
  for (std::int64_t k = n_steps - 1; k >= 0; --k)
    acc = F.step_value(w.sample(k), w.sample(k + 1)) + d * acc;
  return acc;
}

std::string DiscountedPhi::describe() const {
  std::ostringstream os;
  os << "zeta[lambda=" << lambda_ << "," << phi_.describe() << "]";
  return os.str();
}

double zeta_eval(const Path& w, const SeparatingFunctional& f, const TruncationBudget& budget) {
  budget.validate(f.lambda());
  const std::int64_t m = aligned_step_count(w.grid(), budget.horizon_T);
  DiscountedPhi F(f.lambda(), w.grid().step(), f.phi);
  return zeta_steps(w, F, m);
}

// ---------- separation ----------

namespace {

double max_step_slope(const Path& u, std::int64_t m) {
  double V = 0.0;
  for (std::int64_t k = 0; k < m; ++k) {
    auto a = u.sample(k), b = u.sample(k + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = b[i] - a[i];
      s += d * d;
    }
    V = std::max(V, std::sqrt(s));
  }
  return V / u.grid().step();
}

}  // namespace

std::optional<std::int64_t> separates(const Path& u, const Path& v,
                                      const SeparatingFamily& family, std::int64_t n_max,
                                      const TruncationBudget& budget) {
  if (!(u.grid() == v.grid()) || u.dim() != v.dim())
    throw std::invalid_argument("separates: paths must share one grid");
  if (u.same_samples(v)) return std::nullopt;
  const std::int64_t m = aligned_step_count(u.grid(), budget.horizon_T);
  const double V = std::max(max_step_slope(u, m), max_step_slope(v, m));
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const SeparatingFunctional f = family.functional(n);
    const double lambda = f.lambda();
    if (budget.tail_bound(lambda) > budget.epsilon_tail) continue;  // not usable at this budget
    const double zu = zeta_eval(u, f, budget);
    const double zv = zeta_eval(v, f, budget);
    const double eps_q = zeta_quadrature_bound(lambda, u.grid().step(), f.phi.kind, V);
    if (std::abs(zu - zv) > 3.0 * (budget.epsilon_tail + eps_q)) return n;
  }
  return std::nullopt;
}

}  // namespace fsel
