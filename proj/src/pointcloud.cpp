#include "pretouch/pointcloud.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pretouch {

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
    PointCloud out;
    out.points.reserve(indices.size());
    for (std::size_t i : indices) out.points.push_back(points.at(i));
    return out;
}

bool PointCloud::all_finite() const {
    for (const auto& p : points)
        if (!p.allFinite()) return false;
    return true;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    if (!rotation.allFinite() || !translation.allFinite())
        throw std::invalid_argument("RigidTransform: non-finite entries");
    if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw std::invalid_argument("RigidTransform: rotation is not a proper orthonormal matrix");
}

RigidTransform RigidTransform::translation_only(const Vec3& t) { return {Mat3::Identity(), t}; }

RigidTransform RigidTransform::from_euler_zyx(double roll, double pitch, double yaw, const Vec3& t) {
    const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                    Eigen::AngleAxisd(roll, Vec3::UnitX()))
                       .toRotationMatrix();
    return {r, t};
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
    if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("RigidTransform: bottom row must be [0 0 0 1]");
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Mat4 RigidTransform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform out;
    out.rotation_ = rotation_.transpose();
    out.translation_ = -(out.rotation_ * translation_);
    return out;
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation_ = rotation_ * other.rotation_;
    out.translation_ = rotation_ * other.translation_ + translation_;
    return out;
}

RigidTransform RigidTransform::about(const Vec3& pivot) const {
    RigidTransform out;
    out.rotation_ = rotation_;
    out.translation_ = pivot - rotation_ * pivot + translation_;
    return out;
}

bool RigidTransform::is_valid(double tol) const {
    return rotation_.allFinite() && translation_.allFinite() &&
           (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(rotation_.determinant() - 1.0) <= tol;
}

CameraModel CameraModel::orthographic_default() {
    CameraModel cam;
    cam.mode = Mode::orthographic;
    return cam;
}

void CameraModel::validate() const {
    if (width <= 0 || height <= 0) throw std::invalid_argument("CameraModel: image size must be positive");
    if (mode == Mode::pinhole) {
        if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("CameraModel: focal lengths must be positive");
    } else if (!(scale > 0.0)) {
        throw std::invalid_argument("CameraModel: orthographic scale must be positive");
    }
}

double CameraModel::pixels_per_cm(double depth) const {
    if (mode == Mode::orthographic) return scale;
    if (!(depth > 0.0)) throw std::domain_error("CameraModel: pinhole scale needs positive depth");
    return 0.5 * (fx + fy) / depth;
}

Vec2 CameraModel::project(const Vec3& p) const {
    if (mode == Mode::orthographic) return {scale * p.x() + ox, scale * p.y() + oy};
    if (!(p.z() > 0.0)) throw std::domain_error("pinhole projection needs z > 0");
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

Vec3 CameraModel::back_project(double u, double v, double z) const {
    if (mode == Mode::orthographic) return {(u - ox) / scale, (v - oy) / scale, z};
    return {(u - cx) * z / fx, (v - cy) * z / fy, z};
}

PointCloud apply_transform(const PointCloud& c, const RigidTransform& t) {
    PointCloud out;
    out.points.reserve(c.size());
    for (const auto& p : c.points) out.points.push_back(t.apply(p));
    return out;
}

PointCloud add_gaussian_noise(const PointCloud& c, double sigma, Rng& rng) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return c;
    PointCloud out = c;
    std::normal_distribution<double> noise(0.0, sigma);
    for (auto& p : out.points) {
        p.x() += noise(rng.engine());
        p.y() += noise(rng.engine());
        p.z() += noise(rng.engine());
    }
    return out;
}

std::vector<ProjectedPoint> project(const PointCloud& c, const CameraModel& cam) {
    std::vector<ProjectedPoint> out;
    out.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (cam.mode == CameraModel::Mode::pinhole && !(c[i].z() > 0.0))
            throw std::domain_error("project: point " + std::to_string(i) + " has z <= 0 under a pinhole camera");
        out.push_back({cam.project(c[i]), i});
    }
    return out;
}

std::vector<Vec2> project_pixels(const PointCloud& c, const CameraModel& cam) {
    std::vector<Vec2> out;
    out.reserve(c.size());
    for (const auto& pp : project(c, cam)) out.push_back(pp.pixel);
    return out;
}

Vec3 centroid(const PointCloud& c) {
    if (c.empty()) throw std::invalid_argument("centroid: empty cloud");
    Vec3 acc = Vec3::Zero();
    for (const auto& p : c.points) acc += p;
    return acc / static_cast<double>(c.size());
}

PointCloud depth_image_to_cloud(const DepthImage& depth, const CameraModel& cam) {
    cam.validate();
    if (depth.width != cam.width || depth.height != cam.height)
        throw std::invalid_argument("depth_image_to_cloud: image is " + std::to_string(depth.width) + "x" +
                                    std::to_string(depth.height) + " but camera expects " +
                                    std::to_string(cam.width) + "x" + std::to_string(cam.height));
    PointCloud out;
    for (int v = 0; v < depth.height; ++v)
        for (int u = 0; u < depth.width; ++u)
            if (const std::uint16_t d = depth.at(u, v); d != 0)
                out.points.push_back(cam.back_project(u, v, d / 10.0));
    return out;
}

}  // namespace pretouch
