#include "popmeas/flat_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace popmeas {

namespace {

// Column ids of the equality-form system: box columns +e_i / -e_i with
// cost 1 (from the bounds psi_i <= 1, -psi_i <= 1), then difference
// columns e_i - e_j with cost dist(i,j).
struct ColumnId {
  static int plus(int i) { return i; }
  static int minus(int n, int i) { return n + i; }
  static int pair(int n, int i, int j) { return 2 * n + i * n + j; }
};

class FlatSimplex {
 public:
  FlatSimplex(const FlatLP& lp, double tol) : lp_(lp), n_(lp.size()), tol_(tol) {}

  FlatSolution run() {
    FlatSolution sol;
    if (n_ == 0) return sol;

    basic_.resize(n_);
    binv_ = Eigen::MatrixXd::Zero(n_, n_);
    z_ = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      const bool pos = lp_.coeffs[i] >= 0.0;
      basic_[i] = pos ? ColumnId::plus(i) : ColumnId::minus(n_, i);
      binv_(i, i) = pos ? 1.0 : -1.0;
      z_[i] = std::abs(lp_.coeffs[i]);
    }

    const int max_iter = 20000 + 60 * n_;
    int degenerate_run = 0;
    bool bland = false;
    Eigen::VectorXd y(n_), w(n_);
    for (int iter = 0; iter < max_iter; ++iter) {
      if (iter > 0 && iter % 64 == 0) refactorize();
      compute_multipliers(y);

      const int enter = bland ? first_negative_column(y) : best_negative_column(y);
      if (enter < 0) {
        sol.value = std::max(0.0, objective());
        sol.witness = y;
        sol.iterations = iter;
        verify(y, sol.value);
        return sol;
      }

      column_direction(enter, w);
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n_; ++k) {
        if (w[k] <= 1e-11) continue;
        const double ratio = z_[k] / w[k];
        if (ratio < theta - 1e-13 ||
            (ratio < theta + 1e-13 && (leave < 0 || basic_[k] < basic_[leave])))
          leave = k, theta = std::min(theta, ratio);
      }
      if (leave < 0) throw std::runtime_error("flat LP: unbounded pivot (internal error)");

      z_ -= theta * w;
      z_ = z_.cwiseMax(0.0);
      z_[leave] = theta;
      basic_[leave] = enter;
      const double pivot = w[leave];
      binv_.row(leave) /= pivot;
      for (int k = 0; k < n_; ++k)
        if (k != leave && w[k] != 0.0) binv_.row(k) -= w[k] * binv_.row(leave);

      if (theta <= 1e-13) {
        if (++degenerate_run > 30) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
    throw std::runtime_error("flat LP: simplex failed to converge (internal error)");
  }

 private:
  double column_cost(int id) const {
    if (id < 2 * n_) return 1.0;
    const int rest = id - 2 * n_;
    return lp_.dist(rest / n_, rest % n_);
  }

  void compute_multipliers(Eigen::VectorXd& y) const {
    Eigen::VectorXd cost(n_);
    for (int i = 0; i < n_; ++i) cost[i] = column_cost(basic_[i]);
    y.noalias() = binv_.transpose() * cost;
  }

  // Reduced costs: 1 -+ y_i for box columns, dist(i,j) - y_i + y_j for
  // difference columns.
  int best_negative_column(const Eigen::VectorXd& y) const {
    int best = -1;
    double best_r = -tol_;
    for (int i = 0; i < n_; ++i) {
      const double rp = 1.0 - y[i];
      if (rp < best_r) best_r = rp, best = ColumnId::plus(i);
      const double rm = 1.0 + y[i];
      if (rm < best_r) best_r = rm, best = ColumnId::minus(n_, i);
    }
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        const double r = lp_.dist(i, j) - y[i] + y[j];
        if (r < best_r) best_r = r, best = ColumnId::pair(n_, i, j);
      }
    return best;
  }

  int first_negative_column(const Eigen::VectorXd& y) const {
    for (int i = 0; i < n_; ++i) {
      if (1.0 - y[i] < -tol_) return ColumnId::plus(i);
      if (1.0 + y[i] < -tol_) return ColumnId::minus(n_, i);
    }
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i != j && lp_.dist(i, j) - y[i] + y[j] < -tol_)
          return ColumnId::pair(n_, i, j);
    return -1;
  }

  void column_direction(int id, Eigen::VectorXd& w) const {
    if (id < n_) {
      w = binv_.col(id);
    } else if (id < 2 * n_) {
      w = -binv_.col(id - n_);
    } else {
      const int rest = id - 2 * n_;
      w = binv_.col(rest / n_) - binv_.col(rest % n_);
    }
  }

  double objective() const {
    double obj = 0.0;
    for (int i = 0; i < n_; ++i) obj += column_cost(basic_[i]) * z_[i];
    return obj;
  }

  void refactorize() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_, n_);
    for (int k = 0; k < n_; ++k) {
      const int id = basic_[k];
      if (id < n_) {
        b(id, k) = 1.0;
      } else if (id < 2 * n_) {
        b(id - n_, k) = -1.0;
      } else {
        const int rest = id - 2 * n_;
        b(rest / n_, k) += 1.0;
        b(rest % n_, k) -= 1.0;
      }
    }
    binv_ = b.partialPivLu().inverse();
    z_ = (binv_ * lp_.coeffs).cwiseMax(0.0);
  }

  // The multipliers are the optimal test function; the stopping rule makes
  // them feasible for the original constraints, and the two objectives must
  // agree at the optimum.
  void verify(const Eigen::VectorXd& y, double value) const {
    const double slack = std::max(1.0, std::abs(value)) * std::max(tol_, 1e-12) * 10.0;
    if (std::abs(lp_.coeffs.dot(y) - value) > slack)
      throw std::runtime_error("flat LP: objective mismatch (internal error)");
  }

  const FlatLP& lp_;
  int n_;
  double tol_;
  std::vector<int> basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd z_;
};

}  // namespace

FlatLP build_flat_lp(const Space& space, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double merge_tol) {
  FlatLP lp;
  std::vector<double> coeffs;
  auto add = [&](const Point& p, double signed_mass) {
    for (int k = 0; k < static_cast<int>(lp.support.size()); ++k) {
      if (space.distance(lp.support[k], p) <= merge_tol) {
        coeffs[k] += signed_mass;
        return;
      }
    }
    lp.support.push_back(p);
    coeffs.push_back(signed_mass);
  };
  for (int j = 0; j < mu.size(); ++j) add(mu.points[j], mu.weights[j]);
  for (int j = 0; j < nu.size(); ++j) add(nu.points[j], -nu.weights[j]);

  const int n = static_cast<int>(lp.support.size());
  lp.coeffs.resize(n);
  for (int i = 0; i < n; ++i) lp.coeffs[i] = coeffs[i];
  lp.dist.resize(n, n);
  for (int i = 0; i < n; ++i) {
    lp.dist(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j)
      lp.dist(i, j) = lp.dist(j, i) = space.distance(lp.support[i], lp.support[j]);
  }
  return lp;
}

FlatSolution solve_flat_lp(const FlatLP& lp, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("flat LP: tolerance must be positive");
  return FlatSimplex(lp, tol).run();
}

double solve_flat_lp_oracle(const FlatLP& lp) {
  const int n = lp.size();
  if (n == 0) return 0.0;
  if (n > 6) throw std::invalid_argument("flat LP oracle: support larger than 6");

  // Constraint rows (a, rhs): the two bounds per point, then every
  // difference constraint.
  struct Row {
    int i = 0, j = -1;  // j < 0: box row (sign = j == -1 ? +1 : -1)
    double rhs = 0.0;
  };
  std::vector<Row> rows;
  for (int i = 0; i < n; ++i) rows.push_back({i, -1, 1.0});
  for (int i = 0; i < n; ++i) rows.push_back({i, -2, 1.0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rows.push_back({i, j, lp.dist(i, j)});
  const int m = static_cast<int>(rows.size());

  using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
  using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;

  auto row_value = [&](const Row& r, const VecN& psi) {
    if (r.j == -1) return psi[r.i];
    if (r.j == -2) return -psi[r.i];
    return psi[r.i] - psi[r.j];
  };

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  MatN a(n, n);
  VecN b(n), psi(n);
  while (true) {
    a.setZero();
    for (int k = 0; k < n; ++k) {
      const Row& r = rows[pick[k]];
      if (r.j == -1) {
        a(k, r.i) = 1.0;
      } else if (r.j == -2) {
        a(k, r.i) = -1.0;
      } else {
        a(k, r.i) = 1.0;
        a(k, r.j) = -1.0;
      }
      b[k] = r.rhs;
    }
    psi = a.partialPivLu().solve(b);
    // Singular subsets surface as a bad residual (or NaNs) and are skipped.
    if ((a * psi - b).cwiseAbs().maxCoeff() <= 1e-9) {
      bool feasible = true;
      for (int r = 0; r < m && feasible; ++r)
        feasible = row_value(rows[r], psi) <= rows[r].rhs + 1e-9;
      if (feasible) best = std::max(best, lp.coeffs.dot(psi));
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == m - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int t = k + 1; t < n; ++t) pick[t] = pick[t - 1] + 1;
  }
  if (!std::isfinite(best))
    throw std::runtime_error("flat LP oracle: no feasible vertex found (internal error)");
  return best;
}

double flat_distance(const Space& space, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double tol) {
  return solve_flat_lp(build_flat_lp(space, mu, nu), tol).value;
}

double flat_distance_oracle(const Space& space, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  return solve_flat_lp_oracle(build_flat_lp(space, mu, nu));
}

double flat_norm(const DiscreteMeasure& mu) { return total_mass(mu); }

}  // namespace popmeas
