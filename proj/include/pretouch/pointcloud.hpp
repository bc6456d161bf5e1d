#pragma once

#include "pretouch/geometry.hpp"
#include "pretouch/rng.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pretouch {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Ordered 3D points in centimeters. Operations map point i to point i.
struct PointCloud {
    std::vector<Vec3> points;

    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    const Vec3& operator[](std::size_t i) const { return points[i]; }

    /// Subset in the given index order.
    PointCloud select(std::span<const std::size_t> indices) const;
    bool all_finite() const;
};

/// Proper rigid motion p -> R p + t (t in cm).
class RigidTransform {
public:
    RigidTransform() = default;
    /// Throws std::invalid_argument if `rotation` is not orthonormal with
    /// determinant +1 (tolerance 1e-6).
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform translation_only(const Vec3& t);
    /// R = Rz(yaw) * Ry(pitch) * Rx(roll), angles in radians.
    static RigidTransform from_euler_zyx(double roll, double pitch, double yaw, const Vec3& t = Vec3::Zero());
    static RigidTransform from_matrix(const Mat4& m);

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Mat4 matrix() const;

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    RigidTransform inverse() const;
    /// (a * b).apply(p) == a.apply(b.apply(p))
    RigidTransform operator*(const RigidTransform& other) const;

    /// The same motion with its rotation taken about `pivot` instead of the
    /// origin: p -> R (p - pivot) + pivot + t.
    RigidTransform about(const Vec3& pivot) const;

    bool is_valid(double tol = 1e-9) const;

private:
    Mat3 rotation_ = Mat3::Identity();
    Vec3 translation_ = Vec3::Zero();
};

/// Projects sensor-frame points (z = depth along the viewing axis) to pixels.
struct CameraModel {
    enum class Mode { pinhole, orthographic };

    Mode mode = Mode::pinhole;
    // pinhole intrinsics
    double fx = 525.0;
    double fy = 525.0;
    double cx = 319.5;
    double cy = 239.5;
    // orthographic: u = scale * x + ox, v = scale * y + oy
    double scale = 20.0;
    double ox = 320.0;
    double oy = 240.0;
    int width = 640;
    int height = 480;

    static CameraModel pinhole_default() { return {}; }
    static CameraModel orthographic_default();

    /// Throws std::invalid_argument on non-positive focal lengths, scale or
    /// image size.
    void validate() const;
    /// Pixels per centimeter at depth z (constant for orthographic).
    double pixels_per_cm(double depth) const;
    /// Throws std::domain_error for pinhole points with z <= 0.
    Vec2 project(const Vec3& p) const;
    /// Sensor-frame point seen at pixel (u, v) with depth z.
    Vec3 back_project(double u, double v, double z) const;
};

struct ProjectedPoint {
    Vec2 pixel;
    std::size_t index = 0;
};

PointCloud apply_transform(const PointCloud& c, const RigidTransform& t);

/// Adds iid N(0, sigma^2) to every coordinate. sigma == 0 returns the input
/// unchanged; negative sigma throws std::invalid_argument.
PointCloud add_gaussian_noise(const PointCloud& c, double sigma, Rng& rng);

/// Throws std::domain_error naming the first offending index when a pinhole
/// projection meets z <= 0.
std::vector<ProjectedPoint> project(const PointCloud& c, const CameraModel& cam);
/// Pixel coordinates only, in point order.
std::vector<Vec2> project_pixels(const PointCloud& c, const CameraModel& cam);

/// Throws std::invalid_argument for an empty cloud.
Vec3 centroid(const PointCloud& c);

/// Single-channel depth map in millimeters, row-major, 0 = missing.
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> mm;

    DepthImage() = default;
    DepthImage(int w, int h) : width(w), height(h), mm(static_cast<std::size_t>(w) * h, 0) {}

    std::uint16_t& at(int u, int v) { return mm[static_cast<std::size_t>(v) * width + u]; }
    std::uint16_t at(int u, int v) const { return mm[static_cast<std::size_t>(v) * width + u]; }
};

/// Back-projects every valid pixel (z = depth / 10 cm). Pixels are visited in
/// row-major order. Throws std::invalid_argument if the image size differs
/// from the camera's.
PointCloud depth_image_to_cloud(const DepthImage& depth, const CameraModel& cam);

}  // namespace pretouch
