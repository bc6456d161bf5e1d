#include "pretouch/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pretouch {

namespace {

constexpr std::uint32_t kLeafSize = 8;
constexpr std::size_t kNoExclude = static_cast<std::size_t>(-1);

inline bool better(double d2, std::size_t i, double best_d2, std::size_t best_i) {
    return d2 < best_d2 || (d2 == best_d2 && i < best_i);
}

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    if (points_.empty()) throw std::invalid_argument("KdTree: empty point set");
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    Vec3 lo = points_[order_[begin]], hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) {  // all points coincide
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return points_[a][axis] < points_[b][axis] ||
                                (points_[a][axis] == points_[b][axis] && a < b);
                     });
    const double split = points_[order_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

void KdTree::search(std::uint32_t node_id, const Vec3& q, std::size_t exclude, double& best_d2,
                    std::size_t& best_i) const {
    const Node& n = nodes_[node_id];
    if (n.axis < 0) {
        for (std::uint32_t k = n.begin; k < n.end; ++k) {
            const std::size_t i = order_[k];
            if (i == exclude) continue;
            const double d2 = (points_[i] - q).squaredNorm();
            if (better(d2, i, best_d2, best_i)) {
                best_d2 = d2;
                best_i = i;
            }
        }
        return;
    }
    const double diff = q[n.axis] - n.split;
    const std::uint32_t near = diff < 0.0 ? n.left : n.right;
    const std::uint32_t far = diff < 0.0 ? n.right : n.left;
    search(near, q, exclude, best_d2, best_i);
    // Points on the far side are at least |diff| away; equality is still
    // visited so the lowest-index tie rule holds.
    if (diff * diff <= best_d2) search(far, q, exclude, best_d2, best_i);
}

Neighbor KdTree::nearest(const Vec3& q) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_i = kNoExclude;
    search(0, q, kNoExclude, best_d2, best_i);
    return {best_i, std::sqrt(best_d2)};
}

Neighbor KdTree::nearest_excluding(const Vec3& q, std::size_t exclude) const {
    if (points_.size() < 2) throw std::invalid_argument("KdTree::nearest_excluding needs two points");
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_i = kNoExclude;
    search(0, q, exclude, best_d2, best_i);
    return {best_i, std::sqrt(best_d2)};
}

}  // namespace pretouch
