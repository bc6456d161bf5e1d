#include "pretouch/scan_sim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pretouch {

namespace {

double draw(Rng& rng, double limit) { return limit > 0.0 ? rng.uniform(-limit, limit) : 0.0; }

}  // namespace

void OffsetSpec::validate() const {
    if (!(trans_limit >= 0.0) || !(rot_limit_deg >= 0.0))
        throw std::invalid_argument("OffsetSpec: limits must be >= 0");
}

void ScanConfig::validate() const {
    if (!(on_band > 0.0) || !(near_band >= on_band))
        throw std::invalid_argument("ScanConfig: need 0 < on_band <= near_band");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("ScanConfig: noise_sigma must be >= 0");
}

RigidTransform random_offset(const OffsetSpec& spec, Rng& rng) {
    spec.validate();
    const double rot = spec.rot_limit_deg * std::numbers::pi / 180.0;
    const double tx = draw(rng, spec.trans_limit);
    const double ty = draw(rng, spec.trans_limit);
    const double tz = draw(rng, spec.trans_limit);
    const double roll = draw(rng, rot);
    const double pitch = draw(rng, rot);
    const double yaw = draw(rng, rot);
    return RigidTransform::from_euler_zyx(roll, pitch, yaw, Vec3(tx, ty, tz));
}

std::vector<std::size_t> select_band(std::span<const Vec2> pixels, const RotatedRect& r, double band) {
    std::vector<std::size_t> out;
    // Cheap reject against the band-inflated rectangle before the exact test.
    const double c = std::cos(r.theta), s = std::sin(r.theta);
    const double hw = 0.5 * r.w, hh = 0.5 * r.h;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double dx = pixels[i].x() - r.cx, dy = pixels[i].y() - r.cy;
        const double lx = std::abs(c * dx + s * dy) - hw;
        const double ly = std::abs(-s * dx + c * dy) - hh;
        if (lx > band || ly > band) continue;
        const double d = (lx > 0.0 || ly > 0.0) ? std::hypot(std::max(lx, 0.0), std::max(ly, 0.0)) : std::min(-lx, -ly);
        if (d <= band) out.push_back(i);
    }
    return out;
}

Extraction extract_band(const PointCloud& cloud, std::span<const Vec2> pixels, const RotatedRect& r, double band) {
    Extraction e;
    e.indices = select_band(pixels, r, band);
    e.cloud = cloud.select(e.indices);
    return e;
}

Extraction extract_target(const PointCloud& k, const RotatedRect& r, const CameraModel& cam, const ScanConfig& cfg) {
    cfg.validate();
    const auto pixels = project_pixels(k, cam);
    return extract_band(k, pixels, r, cfg.near_band);
}

Extraction extract_source(const PointCloud& k_off, const RotatedRect& r, const CameraModel& cam,
                          const ScanConfig& cfg) {
    cfg.validate();
    const auto pixels = project_pixels(k_off, cam);
    return extract_band(k_off, pixels, r, cfg.on_band);
}

SimulatedScan simulate_scan_projected(const PointCloud& displaced, std::span<const Vec2> displaced_pixels,
                                      const RotatedRect& r, const RigidTransform& offset, const ScanConfig& cfg,
                                      Rng& rng) {
    Extraction picked = extract_band(displaced, displaced_pixels, r, cfg.on_band);
    SimulatedScan scan;
    scan.indices = std::move(picked.indices);
    scan.source = add_gaussian_noise(picked.cloud, cfg.noise_sigma, rng);
    scan.ground_truth_aligned = apply_transform(scan.source, offset.inverse());
    return scan;
}

SimulatedScan simulate_scan(const PointCloud& object, const RotatedRect& r, const RigidTransform& offset,
                            const CameraModel& cam, const ScanConfig& cfg, Rng& rng) {
    cfg.validate();
    const PointCloud displaced = apply_transform(object, offset);
    const auto pixels = project_pixels(displaced, cam);
    return simulate_scan_projected(displaced, pixels, r, offset, cfg, rng);
}

}  // namespace pretouch
