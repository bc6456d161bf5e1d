#pragma once

#include "pretouch/baselines.hpp"
#include "pretouch/icp.hpp"
#include "pretouch/pointcloud.hpp"
#include "pretouch/rng.hpp"
#include "pretouch/scan_sim.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pretouch {

/// Mean distance between estimated(p) and truth(p) over the reference cloud.
double pose_error(const RigidTransform& estimated, const RigidTransform& truth, const PointCloud& reference);

enum class TruthMode {
    known_offset,  // inverse of the injected offset
    full_scan,     // ICP of a noisy scan of the whole displaced object
};

struct EvalConfig {
    ScanConfig scan;
    IcpParams icp;
    TruthMode truth = TruthMode::known_offset;
    /// Leave failed scans out of mean/std instead of counting them at the
    /// baseline error.
    bool exclude_failed = false;

    void validate() const;
};

struct ScanTrialResult {
    std::size_t scan_index = 0;
    RotatedRect region;
    double pose_error = 0.0;       // cm
    double percent_scanned = 0.0;  // fraction of object points covered so far
    bool converged = false;
    /// No usable scan or no ICP fit; pose_error then equals the baseline.
    bool failed = false;
    std::size_t source_points = 0;
};

struct EvalReport {
    std::string object_id;
    std::string proposer;
    std::string mode;  // "single" or "sequential"
    std::vector<ScanTrialResult> scans;
    double mean = 0.0;  // cm
    double std = 0.0;   // cm, population
    /// Error of leaving the prior cloud unaligned under the injected offset.
    double baseline_error = 0.0;
    bool exclude_failed = false;

    /// Recomputes mean and std from `scans`.
    void summarize();
};

/// Each proposal scanned and aligned on its own. The scan of proposal i
/// draws noise from rng.split(i), so it matches scan i of a sequential run.
EvalReport single_scan_eval(const PointCloud& object, const CameraModel& cam,
                            std::span<const RegionProposal> proposals, const RigidTransform& offset,
                            const EvalConfig& cfg, const Rng& rng);

/// Proposals (sorted by descending confidence) scanned in order; step k
/// aligns the concatenation of scans 1..k against the union of their target
/// regions.
EvalReport sequential_scan_eval(const PointCloud& object, const CameraModel& cam,
                                std::span<const RegionProposal> proposals, const RigidTransform& offset,
                                const EvalConfig& cfg, const Rng& rng);

}  // namespace pretouch
