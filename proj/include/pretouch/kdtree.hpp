#pragma once

#include "pretouch/pointcloud.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace pretouch {

struct Neighbor {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();  // cm
};

/// Exact nearest-neighbor index over a fixed set of 3D points. Read-only after
/// construction, so concurrent queries are safe. Equidistant points resolve to
/// the lowest original index.
class KdTree {
public:
    /// Throws std::invalid_argument for an empty point set.
    explicit KdTree(std::span<const Vec3> points);
    explicit KdTree(const PointCloud& cloud) : KdTree(std::span<const Vec3>(cloud.points)) {}

    Neighbor nearest(const Vec3& q) const;
    /// Nearest point other than `exclude` (used for spacing estimates).
    /// Requires at least two points.
    Neighbor nearest_excluding(const Vec3& q, std::size_t exclude) const;

    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        // Leaf when axis < 0: [begin, end) into order_.
        int axis = -1;
        double split = 0.0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::uint32_t node, const Vec3& q, std::size_t exclude, double& best_d2, std::size_t& best_i) const;

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace pretouch
