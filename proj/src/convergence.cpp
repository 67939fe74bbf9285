#include "popmeas/convergence.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace popmeas {

OrderFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  OrderFit fit;
  if (xs.size() != ys.size() || xs.size() < 3) return fit;
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (int k = 0; k < n; ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0)) return fit;
    a(k, 0) = 1.0;
    a(k, 1) = std::log(xs[k]);
    b[k] = std::log(ys[k]);
  }
  const Eigen::Vector2d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  fit.intercept = sol[0];
  fit.slope = sol[1];
  fit.valid = true;
  return fit;
}

ConvergenceReport make_convergence_report(const std::string& axis,
                                          const std::string& reference,
                                          std::vector<ConvergenceRow> rows) {
  ConvergenceReport report;
  report.axis = axis;
  report.reference = reference;
  report.rows = std::move(rows);

  std::vector<double> xs, ys;
  for (const auto& row : report.rows) {
    xs.push_back(row.parameter);
    ys.push_back(row.error);
  }
  for (size_t k = 1; k < report.rows.size(); ++k) {
    // Parameters decrease along the rows; errors should too.
    if (report.rows[k].error > report.rows[k - 1].error) report.monotone = false;
  }
  const OrderFit fit = fit_loglog(xs, ys);
  report.fit_valid = fit.valid;
  if (fit.valid) {
    report.fitted_order = fit.slope;
    report.fitted_constant = std::exp(fit.intercept);
    double log_ratio = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) log_ratio += std::log(ys[k] / xs[k]);
    report.linear_constant = std::exp(log_ratio / static_cast<double>(xs.size()));
  }
  return report;
}

}  // namespace popmeas
