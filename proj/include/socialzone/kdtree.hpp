#ifndef SOCIALZONE_KDTREE_HPP
#define SOCIALZONE_KDTREE_HPP

// Static k-d tree over a borrowed point array. Squared distances are summed in
// coordinate order so that equal distances compare equal bit-for-bit, which the
// tie handling in LOF relies on.

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

namespace socialzone {

template<int Dim>
class KdTree
{
public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  static double squared_distance(const Point & a, const Point & b)
  {
    double s = 0.0;
    for (int d = 0; d < Dim; ++d) {
      const double t = a[d] - b[d];
      s += t * t;
    }
    return s;
  }

  explicit KdTree(std::span<const Point> pts) : pts_(pts), idx_(pts.size())
  {
    std::iota(idx_.begin(), idx_.end(), std::size_t{0});
    if (!idx_.empty()) root_ = build(0, idx_.size(), 0);
  }

  /// The @p k nearest points to @p q other than index @p skip, as (squared distance, index)
  /// sorted ascending.
  std::vector<std::pair<double, std::size_t>> nearest(const Point & q, std::size_t k,
                                                      std::size_t skip = npos) const
  {
    std::priority_queue<std::pair<double, std::size_t>> heap;
    if (root_ != npos && k > 0) knn(root_, q, k, skip, heap);
    std::vector<std::pair<double, std::size_t>> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  /// All points other than @p skip with squared distance <= @p r2.
  std::vector<std::pair<double, std::size_t>> within(const Point & q, double r2, std::size_t skip = npos) const
  {
    std::vector<std::pair<double, std::size_t>> out;
    if (root_ != npos) radius(root_, q, r2, skip, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
  struct Node
  {
    std::size_t begin, end;  // leaf range into idx_
    std::size_t left{npos}, right{npos};
    int axis{0};
    double split{0.0};
  };
  static constexpr std::size_t kLeafSize = 12;

  std::size_t build(std::size_t begin, std::size_t end, int depth)
  {
    Node node{begin, end};
    if (end - begin > kLeafSize) {
      // split along the widest extent
      Point lo = pts_[idx_[begin]], hi = lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = lo.cwiseMin(pts_[idx_[i]]);
        hi = hi.cwiseMax(pts_[idx_[i]]);
      }
      int axis = 0;
      (hi - lo).maxCoeff(&axis);
      if (hi[axis] > lo[axis]) {
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(idx_.begin() + static_cast<std::ptrdiff_t>(begin),
                         idx_.begin() + static_cast<std::ptrdiff_t>(mid),
                         idx_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return pts_[a][axis] < pts_[b][axis]; });
        node.axis = axis;
        node.split = pts_[idx_[mid]][axis];
        const std::size_t id = nodes_.size();
        nodes_.push_back(node);
        const std::size_t l = build(begin, mid, depth + 1);
        const std::size_t r = build(mid, end, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
      }
    }
    nodes_.push_back(node);
    return nodes_.size() - 1;
  }

  void knn(std::size_t ni, const Point & q, std::size_t k, std::size_t skip,
           std::priority_queue<std::pair<double, std::size_t>> & heap) const
  {
    const Node & node = nodes_[ni];
    if (node.left == npos) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t j = idx_[i];
        if (j == skip) continue;
        const double d2 = squared_distance(q, pts_[j]);
        if (heap.size() < k) {
          heap.emplace(d2, j);
        } else if (std::pair{d2, j} < heap.top()) {
          heap.pop();
          heap.emplace(d2, j);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    knn(near, q, k, skip, heap);
    if (heap.size() < k || diff * diff <= heap.top().first) knn(far, q, k, skip, heap);
  }

  void radius(std::size_t ni, const Point & q, double r2, std::size_t skip,
              std::vector<std::pair<double, std::size_t>> & out) const
  {
    const Node & node = nodes_[ni];
    if (node.left == npos) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t j = idx_[i];
        if (j == skip) continue;
        const double d2 = squared_distance(q, pts_[j]);
        if (d2 <= r2) out.emplace_back(d2, j);
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    radius(near, q, r2, skip, out);
    if (diff * diff <= r2) radius(far, q, r2, skip, out);
  }

  std::span<const Point> pts_;
  std::vector<std::size_t> idx_;
  std::vector<Node> nodes_;
  std::size_t root_{npos};
};

}  // namespace socialzone

#endif  // SOCIALZONE_KDTREE_HPP
