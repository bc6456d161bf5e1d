#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace pretouch {

using Vec2 = Eigen::Vector2d;

/// Wraps an angle into the canonical half-open range [-pi/2, pi/2).
double normalize_half_turn(double theta);

/// Rectangle in the image plane: center, side lengths and rotation about the
/// center. `w` runs along the direction `theta`, `h` along `theta + pi/2`.
/// A rectangle is unchanged by a half turn, so theta is kept in [-pi/2, pi/2).
struct RotatedRect {
    double cx = 0.0;
    double cy = 0.0;
    double w = 1.0;
    double h = 1.0;
    double theta = 0.0;

    RotatedRect() = default;
    /// Throws std::invalid_argument unless w, h > 0 and every field is finite.
    RotatedRect(double cx, double cy, double w, double h, double theta);

    double area() const { return w * h; }
    Vec2 center() const { return {cx, cy}; }
    Vec2 axis_u() const;  // unit vector along w
    Vec2 axis_v() const;  // unit vector along h

    /// Point expressed in the rectangle's own frame (origin at the center,
    /// x along w).
    Vec2 to_local(const Vec2& p) const;
    bool contains(const Vec2& p) const;
};

/// (cos 2θ, sin 2θ): a continuous encoding of an angle modulo π.
struct AngleEncoding {
    double c2 = 1.0;
    double s2 = 0.0;
};

AngleEncoding angle_encode(double theta);
/// Inverse of angle_encode onto [-pi/2, pi/2). Throws std::invalid_argument on
/// the (0, 0) input, whose angle is undefined.
double angle_decode(const AngleEncoding& e);

/// Convex polygon with counter-clockwise vertices (positive shoelace area).
/// An empty vertex list is the empty set.
struct ConvexPolygon {
    std::vector<Vec2> vertices;

    bool empty() const { return vertices.empty(); }
    double area() const;
    bool is_convex(double tol = 1e-9) const;
};

/// Signed shoelace area; positive for counter-clockwise order.
double signed_area(std::span<const Vec2> pts);

ConvexPolygon rect_corners(const RotatedRect& r);

/// Intersection of two convex polygons (Sutherland-Hodgman against each edge
/// of `b`). Slivers and shared-edge contacts collapse to the empty polygon.
ConvexPolygon clip_convex(const ConvexPolygon& a, const ConvexPolygon& b);

double rect_iou(const RotatedRect& a, const RotatedRect& b);

/// Distance from p to the rectangle's boundary polyline (zero on the boundary,
/// positive both inside and outside).
double perimeter_distance(const RotatedRect& r, const Vec2& p);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Axis-aligned rectangle bounding the points. Requires at least one point;
/// zero extents are widened to `min_extent` so the result stays valid.
RotatedRect bounding_rect(std::span<const Vec2> pts, double min_extent = 1e-6);

}  // namespace pretouch
