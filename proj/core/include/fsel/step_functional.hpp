#ifndef FSEL_STEP_FUNCTIONAL_HPP_
#define FSEL_STEP_FUNCTIONAL_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "fsel/path.hpp"
#include "fsel/separating.hpp"

namespace fsel {

/// A path functional of the form
///   zeta(w) = sum_k d^k J(w_k, w_{k+1})
/// evaluated by backward Horner recursion. The per-step shape makes the
/// dynamic-programming decomposition over funnel trees exact in floating
/// point, which is what the reduction engine relies on.
class StepFunctional {
 public:
  virtual ~StepFunctional() = default;

  /// Per-step discount d in (0, 1].
  virtual double discount() const = 0;

  /// Contribution J of one step given its two node samples.
  virtual double step_value(std::span<const double> x0, std::span<const double> x1) const = 0;

  virtual std::string describe() const = 0;
};

/// Production step functional: per-step Simpson quadrature of
/// exp(-lambda s) phi(w(s)) over one grid step of length dt.
class DiscountedPhi final : public StepFunctional {
 public:
  DiscountedPhi(double lambda, double dt, TestFunction phi)
      : lambda_(lambda),
        dt_(dt),
        phi_(std::move(phi)),
        d_half_(std::exp(-lambda * dt * 0.5)),
        d_full_(std::exp(-lambda * dt)) {}

  double discount() const override { return d_full_; }

  double step_value(std::span<const double> x0, std::span<const double> x1) const override {
    double mid_buf[8];
    std::vector<double> mid_heap;
    std::span<double> mid;
    if (x0.size() <= 8) {
      mid = std::span<double>(mid_buf, x0.size());
    } else {
      mid_heap.resize(x0.size());
      mid = mid_heap;
    }
    for (std::size_t i = 0; i < x0.size(); ++i) mid[i] = 0.5 * (x0[i] + x1[i]);
    return dt_ / 6.0 * (phi_(x0) + 4.0 * d_half_ * phi_(std::span<const double>(mid)) +
                        d_full_ * phi_(x1));
  }

  std::string describe() const override;

  double lambda() const { return lambda_; }
  const TestFunction& phi() const { return phi_; }

 private:
  double lambda_;
  double dt_;
  TestFunction phi_;
  double d_half_;
  double d_full_;
};

/// zeta over the first n_steps grid steps of w (backward Horner).
double zeta_steps(const Path& w, const StepFunctional& F, std::int64_t n_steps);

/// Number of whole grid steps covering [0, horizon_T]; throws when the
/// horizon is not grid-aligned or extends past the path.
std::int64_t aligned_step_count(const TimeGrid& grid, double horizon_T);

}  // namespace fsel

#endif  // FSEL_STEP_FUNCTIONAL_HPP_
