#pragma once

// Polynomial scaling fits y = a + b x + c x^2 + d x^3 + e x^4.

#include <array>
#include <span>

namespace pce {

inline constexpr int kMaxFitDegree = 4;
inline constexpr double kDefaultFitThreshold = 5e-4;

struct FitResult {
  std::array<double, kMaxFitDegree + 1> coefficients{};  ///< a..e, unused = 0
  int degree = 0;
  double r_squared = 0.0;

  double operator()(double x) const;
  /// Coefficient of the highest retained power.
  double leading() const { return coefficients[degree]; }
};

/// Ordinary least squares on the monomial design matrix.
FitResult polyfit(std::span<const double> xs, std::span<const double> ys,
                  int degree);

/// Raises the degree from 1 while the R^2 gain of the next degree is at
/// least `threshold`; returns the last degree kept.
FitResult select_model(std::span<const double> xs, std::span<const double> ys,
                       double threshold = kDefaultFitThreshold);

/// 1 - SS_res / SS_tot. A perfect fit of constant data is reported as 1.
double r_squared(std::span<const double> ys, std::span<const double> predictions);

}  // namespace pce
