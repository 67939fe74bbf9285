#pragma once

#include <popmeas/flat_metric.hpp>
#include <popmeas/measure.hpp>
#include <popmeas/space.hpp>

#include <random>
#include <vector>

namespace test_support {

using namespace popmeas;

// Random metric on `n` points: random edge weights closed under shortest
// paths, so the triangle inequality holds without being Euclidean.
inline Eigen::MatrixXd random_metric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = weight(rng);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(j, i) = d(i, k) + d(k, j);
  return d;
}

// Random nonnegative measure over a subset of the finite space.
inline DiscreteMeasure random_measure(int space_size, std::mt19937_64& rng,
                                      double max_weight = 2.0) {
  std::uniform_int_distribution<int> count(1, space_size);
  std::uniform_real_distribution<double> weight(0.0, max_weight);
  const int k = count(rng);
  std::vector<int> ids(space_size);
  for (int i = 0; i < space_size; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<Point> points;
  Eigen::VectorXd w(k);
  for (int j = 0; j < k; ++j) {
    points.push_back(FiniteIndex{ids[j]});
    w[j] = weight(rng);
  }
  return DiscreteMeasure(std::move(points), std::move(w));
}

inline Point euclid1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

inline DiscreteMeasure measure1d(const std::vector<double>& xs,
                                 const std::vector<double>& ws) {
  std::vector<Point> points;
  Eigen::VectorXd w(ws.size());
  for (size_t j = 0; j < xs.size(); ++j) {
    points.push_back(euclid1(xs[j]));
    w[j] = ws[j];
  }
  return DiscreteMeasure(std::move(points), std::move(w));
}

}  // namespace test_support
