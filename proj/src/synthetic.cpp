#include "pretouch/synthetic.hpp"

#include "pretouch/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pretouch {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> default_dimensions(FixtureKind kind) {
    switch (kind) {
        case FixtureKind::plane: return {10.0, 10.0};
        case FixtureKind::box_top: return {10.0, 6.0};
        case FixtureKind::l_plate: return {10.0, 4.0, 4.0, 10.0};
        case FixtureKind::disk: return {5.0};
        case FixtureKind::ring: return {5.0, 2.5};
        case FixtureKind::asym_blob: return {5.0};
    }
    return {};
}

std::size_t expected_dims(FixtureKind kind) { return default_dimensions(kind).size(); }

// Outline of an L: arm A runs along +x, arm B along +y, sharing the corner at
// the minimum of both; the bounding box is centered on the origin.
std::vector<Vec2> l_outline(const std::vector<double>& d) {
    const double w = std::max(d[0], d[2]);
    const double h = std::max(d[1], d[3]);
    const double x0 = -0.5 * w, y0 = -0.5 * h;
    return {{x0, y0}, {x0 + d[0], y0}, {x0 + d[0], y0 + d[1]}, {x0 + d[2], y0 + d[1]}, {x0 + d[2], y0 + d[3]},
            {x0, y0 + d[3]}};
}

bool inside_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
            in = !in;
    }
    return in;
}

double outline_distance(const std::vector<Vec2>& poly, const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        d = std::min(d, point_segment_distance(p, poly[j], poly[i]));
    return d;
}

std::vector<Vec2> rect_outline(double sx, double sy) {
    return {{-0.5 * sx, -0.5 * sy}, {0.5 * sx, -0.5 * sy}, {0.5 * sx, 0.5 * sy}, {-0.5 * sx, 0.5 * sy}};
}

// Star-shaped outline r(phi) from three seeded harmonics.
struct BlobShape {
    double mean_radius;
    std::array<double, 3> amp;
    std::array<double, 3> phase;
    static constexpr std::array<int, 3> freq = {2, 3, 5};

    explicit BlobShape(double r, std::uint64_t seed) : mean_radius(r) {
        Rng rng = Rng(seed).split(0xb10b);
        for (int k = 0; k < 3; ++k) {
            amp[k] = rng.uniform(0.12, 0.2);
            phase[k] = rng.uniform(-kPi, kPi);
        }
    }
    double radius(double phi) const {
        double f = 1.0;
        for (int k = 0; k < 3; ++k) f += amp[k] * std::cos(freq[k] * phi + phase[k]);
        return mean_radius * f;
    }
    double radius_slope(double phi) const {
        double f = 0.0;
        for (int k = 0; k < 3; ++k) f -= amp[k] * freq[k] * std::sin(freq[k] * phi + phase[k]);
        return mean_radius * f;
    }
    // Radial gap to the outline projected on the outline normal; exact on a
    // circle, first order elsewhere.
    double edge_distance(const Vec2& p) const {
        const double phi = std::atan2(p.y(), p.x());
        const double r = radius(phi);
        const double slope = radius_slope(phi) / r;
        return (r - p.norm()) / std::sqrt(1.0 + slope * slope);
    }
};

struct Shape {
    Vec2 lo, hi;                              // sampling box
    std::function<bool(const Vec2&)> inside;  // footprint membership
    std::function<double(const Vec2&)> depth; // sensor depth at a footprint point
};

Shape make_shape(const FixtureSpec& s) {
    const auto& d = s.dimensions;
    const double top = s.standoff;
    const double bevel = s.bevel;
    auto chamfer = [top, bevel](double edge_dist) {
        return edge_dist >= bevel ? top : top + (bevel - edge_dist);
    };
    switch (s.kind) {
        case FixtureKind::plane: {
            const double ax = 0.5 * d[0], ay = 0.5 * d[1];
            return {{-ax, -ay}, {ax, ay}, [=](const Vec2& p) { return std::abs(p.x()) <= ax && std::abs(p.y()) <= ay; },
                    [=](const Vec2&) { return top; }};
        }
        case FixtureKind::box_top: {
            const double ax = 0.5 * d[0], ay = 0.5 * d[1];
            return {{-ax, -ay}, {ax, ay}, [=](const Vec2& p) { return std::abs(p.x()) <= ax && std::abs(p.y()) <= ay; },
                    [=](const Vec2& p) { return chamfer(std::min(ax - std::abs(p.x()), ay - std::abs(p.y()))); }};
        }
        case FixtureKind::l_plate: {
            const auto poly = l_outline(d);
            const double w = std::max(d[0], d[2]), h = std::max(d[1], d[3]);
            return {{-0.5 * w, -0.5 * h}, {0.5 * w, 0.5 * h}, [=](const Vec2& p) { return inside_polygon(poly, p); },
                    [=](const Vec2& p) { return chamfer(outline_distance(poly, p)); }};
        }
        case FixtureKind::disk: {
            const double r = d[0];
            return {{-r, -r}, {r, r}, [=](const Vec2& p) { return p.norm() <= r; },
                    [=](const Vec2& p) { return chamfer(r - p.norm()); }};
        }
        case FixtureKind::ring: {
            const double ro = d[0], ri = d[1];
            return {{-ro, -ro}, {ro, ro},
                    [=](const Vec2& p) {
                        const double n = p.norm();
                        return n <= ro && n >= ri;
                    },
                    [=](const Vec2& p) {
                        const double n = p.norm();
                        return chamfer(std::min(ro - n, n - ri));
                    }};
        }
        case FixtureKind::asym_blob: {
            const BlobShape blob(d[0], s.seed);
            const double rmax = d[0] * 1.5;
            return {{-rmax, -rmax}, {rmax, rmax},
                    [=](const Vec2& p) { return p.norm() <= blob.radius(std::atan2(p.y(), p.x())); },
                    [=](const Vec2& p) { return chamfer(blob.edge_distance(p)); }};
        }
    }
    throw std::invalid_argument("unknown fixture kind");
}

}  // namespace

std::string_view to_string(FixtureKind kind) {
    switch (kind) {
        case FixtureKind::plane: return "plane";
        case FixtureKind::box_top: return "box_top";
        case FixtureKind::l_plate: return "l_plate";
        case FixtureKind::disk: return "disk";
        case FixtureKind::ring: return "ring";
        case FixtureKind::asym_blob: return "asym_blob";
    }
    return "unknown";
}

std::optional<FixtureKind> parse_fixture_kind(std::string_view name) {
    for (FixtureKind k : {FixtureKind::plane, FixtureKind::box_top, FixtureKind::l_plate, FixtureKind::disk,
                          FixtureKind::ring, FixtureKind::asym_blob})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

FixtureSpec FixtureSpec::resolved() const {
    FixtureSpec s = *this;
    if (s.dimensions.empty()) s.dimensions = default_dimensions(kind);
    if (s.dimensions.size() != expected_dims(kind))
        throw std::invalid_argument(std::string(to_string(kind)) + " expects " + std::to_string(expected_dims(kind)) +
                                    " dimensions");
    for (double v : s.dimensions)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("fixture dimensions must be positive");
    if (!(s.sample_density > 0.0)) throw std::invalid_argument("fixture density must be positive");
    if (!(s.standoff > 0.0)) throw std::invalid_argument("fixture standoff must be positive");
    if (!(s.bevel >= 0.0)) throw std::invalid_argument("fixture bevel must be >= 0");
    if (kind == FixtureKind::ring && s.dimensions[1] >= s.dimensions[0])
        throw std::invalid_argument("ring inner radius must be below outer radius");
    if (kind == FixtureKind::l_plate && (s.dimensions[2] >= s.dimensions[0] || s.dimensions[1] >= s.dimensions[3]))
        throw std::invalid_argument("l_plate arms must overlap only at the shared corner square");
    return s;
}

PointCloud make_fixture(const FixtureSpec& spec) {
    const FixtureSpec s = spec.resolved();
    const Shape shape = make_shape(s);
    const double step = 1.0 / std::sqrt(s.sample_density);
    const int nx = static_cast<int>(std::ceil((shape.hi.x() - shape.lo.x()) / step - 1e-9));
    const int ny = static_cast<int>(std::ceil((shape.hi.y() - shape.lo.y()) / step - 1e-9));
    Rng rng = Rng(s.seed).split(0x5a3b1e);
    PointCloud cloud;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // One jittered sample per stratum; draws happen even for rejected
            // cells so the pattern does not depend on the footprint.
            const double jx = rng.uniform(0.0, 1.0);
            const double jy = rng.uniform(0.0, 1.0);
            const Vec2 p(shape.lo.x() + (i + jx) * step, shape.lo.y() + (j + jy) * step);
            if (p.x() > shape.hi.x() || p.y() > shape.hi.y() || !shape.inside(p)) continue;
            cloud.points.emplace_back(p.x(), p.y(), shape.depth(p));
        }
    }
    return cloud;
}

FixtureTruth fixture_truth(const FixtureSpec& spec) {
    const FixtureSpec s = spec.resolved();
    const auto& d = s.dimensions;
    FixtureTruth t;
    t.kind = s.kind;
    t.top_depth = s.standoff;
    auto add_polygon = [&t](const std::vector<Vec2>& poly) {
        for (std::size_t i = 0; i < poly.size(); ++i) t.edges.push_back({poly[i], poly[(i + 1) % poly.size()]});
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 a = poly[(i + poly.size() - 1) % poly.size()], b = poly[i], c = poly[(i + 1) % poly.size()];
            const Vec2 e1 = b - a, e2 = c - b;
            (e1.x() * e2.y() - e1.y() * e2.x() >= 0.0 ? t.convex_corners : t.concave_corners).push_back(b);
        }
        t.footprint_area = std::abs(signed_area(poly));
    };
    switch (s.kind) {
        case FixtureKind::plane:
        case FixtureKind::box_top:
            add_polygon(rect_outline(d[0], d[1]));
            t.symmetry = {SymmetryKind::discrete, d[0] == d[1] ? 4 : 2};
            break;
        case FixtureKind::l_plate:
            add_polygon(l_outline(d));
            t.symmetry = {SymmetryKind::trivial, 1};
            break;
        case FixtureKind::disk:
            t.symmetry = {SymmetryKind::continuous, 0};
            t.footprint_area = kPi * d[0] * d[0];
            break;
        case FixtureKind::ring:
            t.symmetry = {SymmetryKind::continuous, 0};
            t.footprint_area = kPi * (d[0] * d[0] - d[1] * d[1]);
            break;
        case FixtureKind::asym_blob: {
            const BlobShape blob(d[0], s.seed);
            t.symmetry = {SymmetryKind::trivial, 1};
            // Area of a star-shaped region: integral of r^2 / 2.
            constexpr int kSteps = 4096;
            double acc = 0.0;
            for (int k = 0; k < kSteps; ++k) {
                const double r = blob.radius(2.0 * kPi * k / kSteps);
                acc += 0.5 * r * r;
            }
            t.footprint_area = acc * 2.0 * kPi / kSteps;
            break;
        }
    }
    return t;
}

}  // namespace pretouch
