#ifndef SOCIALZONE_LOF_HPP
#define SOCIALZONE_LOF_HPP

/**
 * @file
 * @brief Local Outlier Factor and fraction-based outlier removal.
 *
 * Classic LOF: the k-distance neighbourhood of a point contains every other point
 * no farther than its k-th nearest neighbour (so equidistant ties are all
 * included), reachability distance is max(k-distance(o), d(p, o)), the local
 * reachability density is the inverse mean reachability, and the score is the
 * mean ratio of neighbour density to own density.
 *
 * When a point has at least k exact duplicates its mean reachability is zero. The
 * mean is floored at kMinMeanReach, so groups of duplicates score exactly 1.
 */

#include "core.hpp"
#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace socialzone {

inline constexpr double kMinMeanReach = 1e-10;

template<int Dim>
std::vector<double> lof_scores(std::span<const Eigen::Matrix<double, Dim, 1>> pts, std::size_t k)
{
  const std::size_t n = pts.size();
  if (n == 0) return {};
  if (k < 1 || k >= n) throw ConfigError("LOF requires 1 <= k < number of points");

  const KdTree<Dim> tree(pts);
  std::vector<double> kdist(n);
  std::vector<std::vector<std::pair<double, std::size_t>>> hood(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto knn = tree.nearest(pts[i], k, i);
    const double kd2 = knn.back().first;
    kdist[i] = std::sqrt(kd2);
    hood[i] = tree.within(pts[i], kd2, i);
  }

  std::vector<double> lrd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto & [d2, j] : hood[i]) sum += std::max(kdist[j], std::sqrt(d2));
    lrd[i] = 1.0 / std::max(sum / static_cast<double>(hood[i].size()), kMinMeanReach);
  }

  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto & nb : hood[i]) sum += lrd[nb.second];
    score[i] = sum / static_cast<double>(hood[i].size()) / lrd[i];
  }
  return score;
}

struct OutlierSplit
{
  std::vector<std::size_t> inliers;   ///< indices, ascending
  std::vector<std::size_t> outliers;  ///< indices, ascending
  std::vector<double> scores;
};

/**
 * @brief Flags the ceil(fraction * n) highest-scoring points as outliers.
 *
 * Ties in score go to the earlier input index. @p k is clamped to n - 1 for tiny
 * inputs.
 */
template<int Dim>
OutlierSplit remove_outliers(std::span<const Eigen::Matrix<double, Dim, 1>> pts, double fraction, std::size_t k)
{
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("outlier fraction must lie in [0, 1)");
  OutlierSplit out;
  const std::size_t n = pts.size();
  if (n == 0) return out;
  if (n == 1) {
    out.inliers = {0};
    out.scores = {1.0};
    return out;
  }
  out.scores = lof_scores<Dim>(pts, std::min(k, n - 1));
  const auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
  std::vector<bool> is_outlier(n, false);
  for (std::size_t i = 0; i < m && i < n; ++i) is_outlier[order[i]] = true;
  for (std::size_t i = 0; i < n; ++i) (is_outlier[i] ? out.outliers : out.inliers).push_back(i);
  return out;
}

}  // namespace socialzone

#endif  // SOCIALZONE_LOF_HPP
