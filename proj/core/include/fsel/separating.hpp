#ifndef FSEL_SEPARATING_HPP_
#define FSEL_SEPARATING_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsel/path.hpp"
#include "fsel/state.hpp"

namespace fsel {

enum class PhiKind { gaussian_bump, coordinate_sigmoid };

/// A member of the separating family Phi: continuous, range in [0, 1].
///   gaussian_bump      exp(-|x - center|^2)
///   coordinate_sigmoid 1 / (1 + exp(-sign * (x[axis] - offset)))
struct TestFunction {
  PhiKind kind = PhiKind::gaussian_bump;
  std::vector<double> center;  // bump
  std::size_t axis = 0;        // sigmoid
  double offset = 0.0;         // sigmoid
  int slope_sign = +1;         // sigmoid

  double operator()(std::span<const double> x) const;
  double operator()(const StatePoint& x) const { return (*this)(std::span<const double>(x.coords)); }

  std::string describe() const;

  /// Sup of |d^i/ds^i phi(x0 + s e)| over unit directions e, i = 1..4.
  /// Used in the certified Simpson error bound.
  static const double* derivative_sups(PhiKind kind);
};

/// One element of the enumerated family: zeta_n is determined by
/// (lambda_n, phi_n). lambda is kept as an exact rational.
struct SeparatingFunctional {
  std::int64_t index_n = 0;
  std::int64_t lambda_num = 1;
  std::int64_t lambda_den = 1;
  TestFunction phi;

  double lambda() const { return static_cast<double>(lambda_num) / static_cast<double>(lambda_den); }
  std::string describe() const;
};

enum class PhiFamily { bumps, sigmoids, mixed };
enum class SignOrder { plus_first, minus_first };

PhiFamily phi_family_from_string(const std::string& s);
std::string to_string(PhiFamily f);
SignOrder sign_order_from_string(const std::string& s);
std::string to_string(SignOrder s);

/// The fixed enumeration (lambda_n, phi_n): a Cantor-diagonal pairing of
/// the rational sequence 1, 1/2, 2, 1/3, 3, ... with a dense sequence of
/// test functions (dyadic rational centers/offsets in a growing box).
/// Total, injective and deterministic; n = 0 gives (lambda = 1, phi_0).
class SeparatingFamily {
 public:
  SeparatingFamily(PhiFamily family, std::size_t dim, SignOrder order = SignOrder::plus_first);

  SeparatingFunctional functional(std::int64_t n) const;

  /// i-th member of the lambda sequence, as an exact rational.
  static std::pair<std::int64_t, std::int64_t> lambda_at(std::int64_t i);

  /// j-th test function of this family.
  TestFunction phi_at(std::int64_t j) const;

  /// j-th element of the 1-d dyadic center sequence 0, 1, -1, 1/2, ...
  static double scalar_center(std::int64_t j);

  PhiFamily family() const { return family_; }
  std::size_t dim() const { return dim_; }
  SignOrder sign_order() const { return order_; }

 private:
  PhiFamily family_;
  std::size_t dim_;
  SignOrder order_;
};

/// Finite-horizon surrogate for the discounted functionals: integrate on
/// [0, horizon_T]; since 0 <= phi <= 1 the discarded tail is at most
/// exp(-lambda T)/lambda, which must not exceed epsilon_tail.
struct TruncationBudget {
  double horizon_T = 10.0;
  double epsilon_tail = 1e-6;

  double tail_bound(double lambda) const;
  /// Throws std::domain_error when the horizon is too short for lambda.
  void validate(double lambda) const;
};

/// Certified bound on the composite per-step Simpson error of zeta_eval
/// for slope bound V (max step slope of the integrated path).
double zeta_quadrature_bound(double lambda, double dt, PhiKind kind, double V);

/// Discounted functional on a path: quadrature of
///   int_0^T exp(-lambda t) phi(w(t0 + t)) dt
/// by per-step Simpson on the grid (midpoints from the linear
/// interpolant), accumulated backward so the splitting identity
///   zeta[0,T] = zeta[0,tau] + exp(-lambda tau) zeta_shift[0,T-tau]
/// holds to rounding for grid-aligned tau. T must be grid-aligned and
/// within the path horizon.
double zeta_eval(const Path& w, const SeparatingFunctional& f, const TruncationBudget& budget);

/// Least n <= n_max whose functional distinguishes u from v beyond three
/// times the certified error band, or nullopt. u and v share a grid.
std::optional<std::int64_t> separates(const Path& u, const Path& v, const SeparatingFamily& family,
                                      std::int64_t n_max, const TruncationBudget& budget);

}  // namespace fsel

#endif  // FSEL_SEPARATING_HPP_
