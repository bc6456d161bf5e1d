#pragma once

#include "pretouch/geometry.hpp"
#include "pretouch/icp.hpp"
#include "pretouch/pointcloud.hpp"
#include "pretouch/rng.hpp"
#include "pretouch/scan_sim.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pretouch {

/// Acceptance rules for random candidate rectangles relative to the object's
/// bounding rectangle.
struct CandidateConstraints {
    std::size_t n_candidates = 1000;
    double min_iou_with_bbox = 0.15;
    double area_frac_min = 0.10;
    double area_frac_max = 0.50;
    /// Sampled aspect ratios w/h are log-uniform in [1/max_aspect, max_aspect].
    double max_aspect = 4.0;

    void validate() const;
};

/// Rejection-samples `count` rectangles, each with IoU >= min_iou_with_bbox
/// against `bbox` and area within the configured fraction of bbox's.
/// Throws InfeasibleConstraints after `max_attempts` draws.
std::vector<RotatedRect> sample_rects(const RotatedRect& bbox, const CandidateConstraints& cc, std::size_t count,
                                      Rng& rng, std::size_t max_attempts = 1'000'000);

std::vector<RotatedRect> generate_candidates(const RotatedRect& bbox, const CandidateConstraints& cc, Rng& rng);

/// Per-candidate outcome: the worst (largest) alignment error over trials.
struct LabelRecord {
    RotatedRect rect;
    double worst_score = 0.0;         // cm, +inf if any trial had no usable scan
    std::vector<double> trial_scores; // cm, one per trial
    std::size_t candidate_index = 0;  // generation order
};

struct LabelGenConfig {
    CandidateConstraints constraints;
    std::size_t n_trials = 10;
    OffsetSpec offsets;
    ScanConfig scan;
    IcpParams icp;
    std::size_t top_k = 1;
    unsigned threads = 0;  // 0 = hardware concurrency; output never depends on it

    void validate() const;
};

/// Mean distance between the ICP-aligned source and its ground-truth
/// placement; +inf when ICP cannot start. Source and ground truth must share
/// point order.
double score_pair(const PointCloud& source, const PointCloud& target, const PointCloud& ground_truth_aligned,
                  const IcpParams& icp);

/// Called once per (trial, candidate) cell with the displaced cloud that cell
/// was scanned from. May be invoked concurrently.
using CellObserver = std::function<void(std::size_t trial, std::size_t candidate, const PointCloud& displaced)>;

/// Everything the label generator computed, in candidate generation order.
struct LabelGenRun {
    RotatedRect bbox;
    std::vector<RigidTransform> trial_offsets;  // about the object centroid
    std::vector<LabelRecord> records;
};

/// Axis-aligned image rectangle around the cloud's projection.
RotatedRect object_bbox(const PointCloud& k, const CameraModel& cam);

/// Scores every candidate: targets from `k`, one shared displacement per
/// trial, a noisy perimeter scan per (trial, candidate), scored by
/// score_pair and reduced by max over trials.
LabelGenRun score_candidates(const PointCloud& k, const CameraModel& cam, const LabelGenConfig& cfg, const Rng& rng,
                             const CellObserver& observer = {});

struct FilteredRecords {
    std::vector<LabelRecord> records;
    bool truncated = false;  // fewer records than requested were available
};

/// Ascending worst_score, ties by candidate_index; keeps the first k.
FilteredRecords filter_recs(std::span<const LabelRecord> records, std::size_t k);

/// Full label generation: score_candidates then filter_recs(top_k). Throws
/// NoViableRegion if no candidate has a finite score.
std::vector<LabelRecord> label_generation(const PointCloud& k, const CameraModel& cam, const LabelGenConfig& cfg,
                                          const Rng& rng);

}  // namespace pretouch
