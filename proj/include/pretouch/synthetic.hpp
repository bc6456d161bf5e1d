#pragma once

#include "pretouch/geometry.hpp"
#include "pretouch/pointcloud.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pretouch {

enum class FixtureKind { plane, box_top, l_plate, disk, ring, asym_blob };

std::string_view to_string(FixtureKind kind);
std::optional<FixtureKind> parse_fixture_kind(std::string_view name);

/// Desk-scale test object seen from above. Points sit in the sensor frame:
/// x, y across the table, z = depth from the sensor (larger is farther).
///
/// `dimensions` (cm) by kind; an empty list selects the defaults shown:
///   plane     {side_x, side_y}                        {10, 10}
///   box_top   {side_x, side_y}                        {10, 6}
///   l_plate   {arm_a_len, arm_a_width, arm_b_width, arm_b_len}  {10, 4, 4, 10}
///   disk      {radius}                                {5}
///   ring      {outer_radius, inner_radius}            {5, 2.5}
///   asym_blob {mean_radius}                           {5}
///
/// Every kind except `plane` has a 45 degree chamfer of width `bevel` along
/// its outline, so edges carry depth structure. `asym_blob` has a seeded
/// star-shaped outline.
struct FixtureSpec {
    FixtureKind kind = FixtureKind::l_plate;
    std::vector<double> dimensions;
    double sample_density = 25.0;  // points per cm^2 of footprint
    std::uint64_t seed = 0;
    double standoff = 50.0;  // depth of the top surface, cm
    double bevel = 2.0;      // cm

    /// Defaults filled in; throws std::invalid_argument on bad values.
    FixtureSpec resolved() const;
};

PointCloud make_fixture(const FixtureSpec& spec);

enum class SymmetryKind { trivial, discrete, continuous };

struct Symmetry {
    SymmetryKind kind = SymmetryKind::trivial;
    int order = 1;  // rotational order for discrete symmetry
};

/// Analytic features of a fixture in world xy (cm).
struct FixtureTruth {
    FixtureKind kind = FixtureKind::plane;
    Symmetry symmetry;
    std::vector<Vec2> concave_corners;
    std::vector<Vec2> convex_corners;
    /// Straight outline edges as segment endpoints; empty for round outlines.
    std::vector<std::array<Vec2, 2>> edges;
    double footprint_area = 0.0;
    double top_depth = 0.0;  // z of the flat top

    /// Pixel of a world-xy feature on the top surface.
    Vec2 pixel(const CameraModel& cam, const Vec2& xy) const { return cam.project(Vec3(xy.x(), xy.y(), top_depth)); }
};

FixtureTruth fixture_truth(const FixtureSpec& spec);

}  // namespace pretouch
