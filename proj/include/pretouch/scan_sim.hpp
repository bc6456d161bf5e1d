#pragma once

#include "pretouch/geometry.hpp"
#include "pretouch/pointcloud.hpp"
#include "pretouch/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pretouch {

/// Bounds of the uniform pose perturbation: each translation axis in
/// [-trans_limit, trans_limit] cm, each of roll/pitch/yaw in
/// [-rot_limit_deg, rot_limit_deg] degrees.
struct OffsetSpec {
    double trans_limit = 2.0;
    double rot_limit_deg = 5.0;

    void validate() const;
};

/// Pixel half-widths of the perimeter bands: a source scan keeps points within
/// `on_band` of the rectangle outline, a target region within `near_band`.
/// The target band has to reach the prior-cloud points a displaced scan truly
/// came from; 60 px is 3 cm at 20 px/cm, beyond the default offset range.
struct ScanConfig {
    double on_band = 1.0;
    double near_band = 60.0;
    double noise_sigma = 0.15;  // cm

    void validate() const;
};

/// Rotation R = Rz(yaw) Ry(pitch) Rx(roll) about the origin plus translation.
/// Use RigidTransform::about to rotate around an object instead.
RigidTransform random_offset(const OffsetSpec& spec, Rng& rng);

/// Points of a cloud picked by a perimeter band, with their source indices.
struct Extraction {
    PointCloud cloud;
    std::vector<std::size_t> indices;

    bool empty() const { return indices.empty(); }
};

/// Indices whose pixel lies within `band` of the rectangle outline.
std::vector<std::size_t> select_band(std::span<const Vec2> pixels, const RotatedRect& r, double band);

Extraction extract_band(const PointCloud& cloud, std::span<const Vec2> pixels, const RotatedRect& r, double band);

/// Region of the prior cloud near or on the outline (near_band).
Extraction extract_target(const PointCloud& k, const RotatedRect& r, const CameraModel& cam, const ScanConfig& cfg);
/// Points of the displaced cloud on the outline (on_band): a noiseless scan.
Extraction extract_source(const PointCloud& k_off, const RotatedRect& r, const CameraModel& cam,
                          const ScanConfig& cfg);

struct SimulatedScan {
    PointCloud source;                // noisy scan in the displaced frame
    PointCloud ground_truth_aligned;  // source mapped back by the inverse offset
    std::vector<std::size_t> indices; // object point index of every scan point

    bool empty() const { return indices.empty(); }
};

/// Scan of `object` displaced by `offset` along the outline of `r`.
SimulatedScan simulate_scan(const PointCloud& object, const RotatedRect& r, const RigidTransform& offset,
                            const CameraModel& cam, const ScanConfig& cfg, Rng& rng);

/// Same, reusing a displaced cloud and its projection already computed by
/// the caller.
SimulatedScan simulate_scan_projected(const PointCloud& displaced, std::span<const Vec2> displaced_pixels,
                                      const RotatedRect& r, const RigidTransform& offset, const ScanConfig& cfg,
                                      Rng& rng);

}  // namespace pretouch
