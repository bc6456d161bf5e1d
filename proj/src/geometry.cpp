#include "pretouch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pretouch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

double normalize_half_turn(double theta) {
    double t = theta - kPi * std::floor((theta + kHalfPi) / kPi);
    // Rounding can land a hair outside the range or just below +pi/2, which is
    // the same orientation as -pi/2.
    if (t >= kHalfPi - 1e-12 || t < -kHalfPi + 1e-12) t = -kHalfPi;
    return t;
}

RotatedRect::RotatedRect(double cx_, double cy_, double w_, double h_, double theta_)
    : cx(cx_), cy(cy_), w(w_), h(h_), theta(normalize_half_turn(theta_)) {
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(theta_))
        throw std::invalid_argument("RotatedRect: non-finite field");
    if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h))
        throw std::invalid_argument("RotatedRect: width and height must be positive");
}

Vec2 RotatedRect::axis_u() const { return {std::cos(theta), std::sin(theta)}; }
Vec2 RotatedRect::axis_v() const { return {-std::sin(theta), std::cos(theta)}; }

Vec2 RotatedRect::to_local(const Vec2& p) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double dx = p.x() - cx, dy = p.y() - cy;
    return {c * dx + s * dy, -s * dx + c * dy};
}

bool RotatedRect::contains(const Vec2& p) const {
    const Vec2 q = to_local(p);
    return std::abs(q.x()) <= 0.5 * w && std::abs(q.y()) <= 0.5 * h;
}

AngleEncoding angle_encode(double theta) { return {std::cos(2.0 * theta), std::sin(2.0 * theta)}; }

double angle_decode(const AngleEncoding& e) {
    if (std::hypot(e.c2, e.s2) < 1e-12)
        throw std::invalid_argument("angle_decode: (0, 0) has no angle");
    return normalize_half_turn(0.5 * std::atan2(e.s2, e.c2));
}

double signed_area(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) acc += cross(pts[j], pts[i]);
    return 0.5 * acc;
}

double ConvexPolygon::area() const { return std::abs(signed_area(vertices)); }

bool ConvexPolygon::is_convex(double tol) const {
    const std::size_t n = vertices.size();
    if (n == 0) return true;
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const Vec2& c = vertices[(i + 2) % n];
        if (cross(b - a, c - b) < -tol) return false;
    }
    return true;
}

ConvexPolygon rect_corners(const RotatedRect& r) {
    const Vec2 c = r.center();
    const Vec2 u = r.axis_u() * (0.5 * r.w);
    const Vec2 v = r.axis_v() * (0.5 * r.h);
    return {{c + u + v, c - u + v, c - u - v, c + u - v}};
}

ConvexPolygon clip_convex(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.vertices.size() < 3 || b.vertices.size() < 3) return {};

    // Scale-aware tolerances so pixel-sized and unit-sized inputs behave alike.
    double extent = 0.0;
    for (const auto& p : a.vertices) extent = std::max(extent, p.cwiseAbs().maxCoeff());
    for (const auto& p : b.vertices) extent = std::max(extent, p.cwiseAbs().maxCoeff());
    const double len_tol = 1e-12 * std::max(1.0, extent);

    std::vector<Vec2> out = a.vertices;
    std::vector<Vec2> in;
    const std::size_t m = b.vertices.size();
    for (std::size_t e = 0; e < m && !out.empty(); ++e) {
        const Vec2& p0 = b.vertices[e];
        const Vec2 edge = b.vertices[(e + 1) % m] - p0;
        const double edge_len = edge.norm();
        if (edge_len <= len_tol) continue;
        in.swap(out);
        out.clear();
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& cur = in[i];
            const Vec2& nxt = in[(i + 1) % n];
            // Signed distance to the clip line, positive on the kept side.
            const double dc = cross(edge, cur - p0) / edge_len;
            const double dn = cross(edge, nxt - p0) / edge_len;
            const bool cur_in = dc >= -len_tol;
            const bool nxt_in = dn >= -len_tol;
            if (cur_in) out.push_back(cur);
            if (cur_in != nxt_in) {
                const double t = dc / (dc - dn);
                out.push_back(cur + t * (nxt - cur));
            }
        }
    }

    // Drop repeated vertices produced by touching contacts.
    std::vector<Vec2> clean;
    clean.reserve(out.size());
    for (const auto& p : out)
        if (clean.empty() || (p - clean.back()).norm() > len_tol) clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= len_tol) clean.pop_back();

    if (clean.size() < 3) return {};
    const double area = signed_area(clean);
    if (area <= 1e-12 * std::max(1.0, extent * extent)) return {};
    return {std::move(clean)};
}

double rect_iou(const RotatedRect& a, const RotatedRect& b) {
    const double inter = clip_convex(rect_corners(a), rect_corners(b)).area();
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double perimeter_distance(const RotatedRect& r, const Vec2& p) {
    const Vec2 q = r.to_local(p);
    const double dx = std::abs(q.x()) - 0.5 * r.w;
    const double dy = std::abs(q.y()) - 0.5 * r.h;
    if (dx > 0.0 || dy > 0.0) return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    return std::min(-dx, -dy);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

RotatedRect bounding_rect(std::span<const Vec2> pts, double min_extent) {
    if (pts.empty()) throw std::invalid_argument("bounding_rect: no points");
    Vec2 lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec2 c = 0.5 * (lo + hi);
    return {c.x(), c.y(), std::max(hi.x() - lo.x(), min_extent), std::max(hi.y() - lo.y(), min_extent), 0.0};
}

}  // namespace pretouch
