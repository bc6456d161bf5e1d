#pragma once

#include "pretouch/geometry.hpp"
#include "pretouch/labelgen.hpp"
#include "pretouch/pointcloud.hpp"
#include "pretouch/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pretouch {

struct RegionProposal {
    RotatedRect rect;
    double confidence = 0.0;  // higher is scanned earlier
};

/// Rectangles drawn exactly as generate_candidates draws them; confidence is
/// n - i for the i-th draw, so generation order is confidence order.
std::vector<RegionProposal> random_proposals(const RotatedRect& bbox, const CandidateConstraints& cc, std::size_t n,
                                             Rng& rng);

/// The label generator used as a proposer: the n best records with a finite
/// score, confidence = -worst_score.
std::vector<RegionProposal> oracle_proposals(std::span<const LabelRecord> records, std::size_t n);

/// Depth grid (cm) over the camera image. depth == 0 marks an invalid cell.
struct RangeImage {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  // row-major
    CameraModel camera;
    /// Lateral scale used to turn pixel steps into cm; fixed at render time.
    double px_per_cm = 1.0;

    RangeImage() = default;
    RangeImage(const CameraModel& cam, double px_per_cm);

    bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
    double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
    double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
    bool valid(int u, int v) const { return in_bounds(u, v) && at(u, v) > 0.0; }
};

struct RangeImageParams {
    double splat_sigma_px = 2.0;
    double splat_radius_px = 5.0;
    /// Cells whose summed splat weight falls below this are left invalid.
    double min_weight = 0.05;
};

/// Gaussian-weighted depth splat of the projected cloud. px_per_cm is taken
/// at the cloud's median depth.
RangeImage render_range_image(const PointCloud& cloud, const CameraModel& cam, const RangeImageParams& params = {});

struct Keypoint {
    int u = 0;
    int v = 0;
    double interest = 0.0;
};

/// Keypoints from the depth-gradient structure tensor summed over a disk of
/// support_radius. Greedy non-maximum suppression at support_radius keeps
/// the top_m strongest, in descending interest (ties in row-major order).
struct KeypointParams {
    double support_radius = 1.0;  // cm
    std::size_t top_m = 20;
    /// interest = lambda_min + edge_weight * lambda_max of the tensor, so two
    /// crossing edge directions outrank one.
    double edge_weight = 0.1;
    /// Interest at or below this is treated as flat.
    double min_interest = 1e-9;
};

/// Per-pixel interest over the whole image (0 on invalid cells).
std::vector<double> interest_map(const RangeImage& img, const KeypointParams& params);

std::vector<Keypoint> surface_change_keypoints(const RangeImage& img, const KeypointParams& params);
std::vector<Keypoint> surface_change_keypoints(const RangeImage& img, double support_radius, std::size_t top_m);

/// Element d: mean absolute depth derivative (cm/cm) along the ray from the
/// keypoint at image angle 2*pi*d/n_beams (0 = +u, increasing toward +v),
/// over `radius` cm. Only steps between valid cells count; a ray without any
/// is 0. n_beams must be a positive multiple of 4.
std::vector<double> radial_descriptor(const RangeImage& img, const Vec2& kp, std::size_t n_beams, double radius);

struct NarfParams {
    KeypointParams keypoints;
    std::size_t n_beams = 36;
    double descriptor_radius = 3.0;  // cm
    /// Side ratio follows the two chosen descriptor values, clamped to
    /// [1/max_side_ratio, max_side_ratio]; equal_sides forces a square.
    double max_side_ratio = 3.0;
    bool equal_sides = false;

    void validate() const;
};

/// The two beam directions a proposal is built from.
struct BeamPair {
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Strongest beam and the stronger of its two perpendicular beams (ties pick
/// the lower index for `first` and first + n/4 for `second`).
BeamPair choose_beams(const std::vector<double>& descriptor);

/// Rectangle with one corner at `kp` whose sides run along beams `pair`, of
/// total area `area`, side ratio from the descriptor per NarfParams.
RotatedRect rect_from_beams(const Vec2& kp, const std::vector<double>& descriptor, const BeamPair& pair, double area,
                            const NarfParams& params);

/// One proposal per keypoint with a nonzero descriptor, area half of bbox,
/// confidence = descriptor[first] + descriptor[second]; sorted by confidence
/// descending, ties in keypoint row-major order.
std::vector<RegionProposal> narf_variant_proposals(const RangeImage& img, const RotatedRect& bbox,
                                                   const NarfParams& params = {});

}  // namespace pretouch
