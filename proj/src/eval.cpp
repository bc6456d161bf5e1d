#include "pretouch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pretouch {

namespace {

constexpr std::uint64_t kTruthStream = 0xf011;

struct Setup {
    PointCloud displaced;
    std::vector<Vec2> displaced_pixels;
    std::vector<Vec2> object_pixels;
    RigidTransform truth;
    double baseline = 0.0;
};

Setup prepare(const PointCloud& object, const CameraModel& cam, const RigidTransform& offset, const EvalConfig& cfg,
              const Rng& rng) {
    if (object.empty()) throw std::invalid_argument("evaluation needs a nonempty object cloud");
    cam.validate();
    cfg.validate();
    Setup s;
    s.displaced = apply_transform(object, offset);
    s.displaced_pixels = project_pixels(s.displaced, cam);
    s.object_pixels = project_pixels(object, cam);
    if (cfg.truth == TruthMode::known_offset) {
        s.truth = offset.inverse();
    } else {
        Rng truth_rng = rng.split(kTruthStream);
        const PointCloud full = add_gaussian_noise(s.displaced, cfg.scan.noise_sigma, truth_rng);
        const IcpResult r = icp_align(full, object, cfg.icp);
        s.truth = r.transform;
    }
    s.baseline = pose_error(RigidTransform::identity(), s.truth, s.displaced);
    return s;
}

}  // namespace

double pose_error(const RigidTransform& estimated, const RigidTransform& truth, const PointCloud& reference) {
    if (reference.empty()) throw std::invalid_argument("pose_error: empty reference cloud");
    double acc = 0.0;
    for (const auto& p : reference.points) acc += (estimated.apply(p) - truth.apply(p)).norm();
    return acc / static_cast<double>(reference.size());
}

void EvalConfig::validate() const {
    scan.validate();
    icp.validate();
}

void EvalReport::summarize() {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : scans) {
        if (exclude_failed && s.failed) continue;
        sum += s.pose_error;
        ++n;
    }
    if (n == 0) {
        mean = std = 0.0;
        return;
    }
    mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const auto& s : scans) {
        if (exclude_failed && s.failed) continue;
        var += (s.pose_error - mean) * (s.pose_error - mean);
    }
    std = std::sqrt(var / static_cast<double>(n));
}

EvalReport single_scan_eval(const PointCloud& object, const CameraModel& cam,
                            std::span<const RegionProposal> proposals, const RigidTransform& offset,
                            const EvalConfig& cfg, const Rng& rng) {
    if (proposals.empty()) throw std::invalid_argument("single_scan_eval: no proposals");
    const Setup s = prepare(object, cam, offset, cfg, rng);
    EvalReport rep;
    rep.mode = "single";
    rep.baseline_error = s.baseline;
    rep.exclude_failed = cfg.exclude_failed;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        const RotatedRect& r = proposals[i].rect;
        Rng noise = rng.split(i);
        const SimulatedScan scan = simulate_scan_projected(s.displaced, s.displaced_pixels, r, offset, cfg.scan, noise);
        const Extraction target = extract_band(object, s.object_pixels, r, cfg.scan.near_band);
        ScanTrialResult t;
        t.scan_index = i;
        t.region = r;
        t.source_points = scan.source.size();
        t.percent_scanned = static_cast<double>(scan.indices.size()) / static_cast<double>(object.size());
        t.failed = true;
        t.pose_error = s.baseline;
        if (!scan.empty() && !target.empty()) {
            const IcpResult res = icp_align(scan.source, target.cloud, cfg.icp);
            if (!res.failed()) {
                t.failed = false;
                t.converged = res.converged;
                t.pose_error = pose_error(res.transform, s.truth, s.displaced);
            }
        }
        rep.scans.push_back(t);
    }
    rep.summarize();
    return rep;
}

EvalReport sequential_scan_eval(const PointCloud& object, const CameraModel& cam,
                                std::span<const RegionProposal> proposals, const RigidTransform& offset,
                                const EvalConfig& cfg, const Rng& rng) {
    if (proposals.empty()) throw std::invalid_argument("sequential_scan_eval: no proposals");
    for (std::size_t i = 1; i < proposals.size(); ++i)
        if (proposals[i].confidence > proposals[i - 1].confidence)
            throw std::invalid_argument("sequential_scan_eval: proposals must be sorted by descending confidence");
    const Setup s = prepare(object, cam, offset, cfg, rng);
    EvalReport rep;
    rep.mode = "sequential";
    rep.baseline_error = s.baseline;
    rep.exclude_failed = cfg.exclude_failed;

    PointCloud source;
    std::vector<char> covered(object.size(), 0), in_target(object.size(), 0);
    std::size_t n_covered = 0;
    PointCloud target;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        const RotatedRect& r = proposals[i].rect;
        Rng noise = rng.split(i);
        const SimulatedScan scan = simulate_scan_projected(s.displaced, s.displaced_pixels, r, offset, cfg.scan, noise);
        source.points.insert(source.points.end(), scan.source.points.begin(), scan.source.points.end());
        for (std::size_t idx : scan.indices)
            if (!covered[idx]) {
                covered[idx] = 1;
                ++n_covered;
            }
        // Target indices are merged in ascending order so the union does not
        // depend on proposal overlap.
        for (std::size_t idx : select_band(s.object_pixels, r, cfg.scan.near_band)) in_target[idx] = 1;
        target.points.clear();
        for (std::size_t idx = 0; idx < object.size(); ++idx)
            if (in_target[idx]) target.points.push_back(object[idx]);

        ScanTrialResult t;
        t.scan_index = i;
        t.region = r;
        t.source_points = source.size();
        t.percent_scanned = static_cast<double>(n_covered) / static_cast<double>(object.size());
        t.failed = true;
        t.pose_error = s.baseline;
        if (!source.empty() && !target.empty()) {
            const IcpResult res = icp_align(source, target, cfg.icp);
            if (!res.failed()) {
                t.failed = false;
                t.converged = res.converged;
                t.pose_error = pose_error(res.transform, s.truth, s.displaced);
            }
        }
        rep.scans.push_back(t);
    }
    rep.summarize();
    return rep;
}

}  // namespace pretouch
