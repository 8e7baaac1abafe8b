#include "pce/analysis.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pce/errors.hpp"

namespace pce {

double FitResult::operator()(double x) const {
  double y = 0.0;
  for (int k = kMaxFitDegree; k >= 0; --k) y = y * x + coefficients[k];
  return y;
}

FitResult polyfit(std::span<const double> xs, std::span<const double> ys,
                  int degree) {
  if (xs.size() != ys.size()) {
    fail(ErrorKind::DimensionMismatch, "xs and ys differ in length");
  }
  if (degree < 0 || degree > kMaxFitDegree) {
    fail(ErrorKind::InvalidArgument,
         "fit degree must lie in [0, " + std::to_string(kMaxFitDegree) + "]");
  }
  const std::set<double> distinct(xs.begin(), xs.end());
  if (static_cast<int>(distinct.size()) < degree + 1) {
    fail(ErrorKind::InsufficientData,
         "degree " + std::to_string(degree) + " needs " + std::to_string(degree + 1) +
             " distinct abscissae, got " + std::to_string(distinct.size()));
  }

  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      design(i, k) = p;
      p *= xs[i];
    }
    rhs(i) = ys[i];
  }
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(rhs);

  FitResult fit;
  fit.degree = degree;
  for (int k = 0; k <= degree; ++k) fit.coefficients[k] = beta(k);
  std::vector<double> predictions(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) predictions[i] = fit(xs[i]);
  fit.r_squared = r_squared(ys, predictions);
  return fit;
}

FitResult select_model(std::span<const double> xs, std::span<const double> ys,
                       double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorKind::InvalidArgument, "threshold must be >= 0");
  FitResult best = polyfit(xs, ys, 1);
  const std::set<double> distinct(xs.begin(), xs.end());
  for (int degree = 2; degree <= kMaxFitDegree; ++degree) {
    if (static_cast<int>(distinct.size()) < degree + 1) break;
    FitResult next = polyfit(xs, ys, degree);
    if (next.r_squared - best.r_squared < threshold) break;
    best = next;
  }
  return best;
}

double r_squared(std::span<const double> ys, std::span<const double> predictions) {
  if (ys.size() != predictions.size()) {
    fail(ErrorKind::DimensionMismatch, "ys and predictions differ in length");
  }
  if (ys.size() < 2) fail(ErrorKind::InsufficientData, "R^2 needs at least 2 points");
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double ss_tot = 0.0, ss_res = 0.0;
  for (size_t i = 0; i < ys.size(); ++i) {
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
    ss_res += (ys[i] - predictions[i]) * (ys[i] - predictions[i]);
  }
  // Relative to the data scale so that round-off in a perfect fit of
  // constant data does not count as a residual.
  const double scale = std::max(1.0, mean * mean) * static_cast<double>(ys.size());
  if (ss_tot <= 1e-28 * scale) {
    if (ss_res <= 1e-24 * scale) return 1.0;
    fail(ErrorKind::UndefinedRSquared,
         "R^2 undefined: data has zero variance but predictions miss it");
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace pce
