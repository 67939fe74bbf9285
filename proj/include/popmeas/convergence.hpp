#pragma once

#include <string>
#include <vector>

namespace popmeas {

/// Least-squares fit of log(y) = intercept + slope * log(x).
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool valid = false;
};

OrderFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct ConvergenceRow {
  double parameter = 0.0;
  double error = 0.0;
};

struct ConvergenceReport {
  std::string axis;       ///< "dt" or "epsilon"
  std::string reference;  ///< "analytic" or "self"
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;
  double fitted_constant = 0.0;  ///< exp(intercept) of the free fit
  /// Constant of the slope-1 constrained fit (geometric mean of error/parameter).
  double linear_constant = 0.0;
  bool monotone = true;
  bool fit_valid = false;
};

/// Fits orders and flags non-monotone error sequences (rows ordered by
/// decreasing parameter). Requires at least 3 rows with positive errors
/// for a valid fit.
ConvergenceReport make_convergence_report(const std::string& axis,
                                          const std::string& reference,
                                          std::vector<ConvergenceRow> rows);

}  // namespace popmeas
