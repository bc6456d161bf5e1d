#include "pretouch/labelgen.hpp"

#include "pretouch/errors.hpp"
#include "pretouch/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pretouch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// RNG stream ids under the label generator's root.
constexpr std::uint64_t kCandidateStream = 1;
constexpr std::uint64_t kOffsetStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

}  // namespace

void CandidateConstraints::validate() const {
    if (n_candidates < 1) throw std::invalid_argument("CandidateConstraints: n_candidates must be >= 1");
    if (!(min_iou_with_bbox >= 0.0 && min_iou_with_bbox <= 1.0))
        throw std::invalid_argument("CandidateConstraints: min_iou_with_bbox must be in [0, 1]");
    if (!(area_frac_min > 0.0 && area_frac_min <= area_frac_max && area_frac_max <= 1.0))
        throw std::invalid_argument("CandidateConstraints: need 0 < area_frac_min <= area_frac_max <= 1");
    if (!(max_aspect >= 1.0)) throw std::invalid_argument("CandidateConstraints: max_aspect must be >= 1");
}

void LabelGenConfig::validate() const {
    constraints.validate();
    if (n_trials < 1) throw std::invalid_argument("LabelGenConfig: n_trials must be >= 1");
    if (top_k < 1) throw std::invalid_argument("LabelGenConfig: top_k must be >= 1");
    offsets.validate();
    scan.validate();
    icp.validate();
}

std::vector<RotatedRect> sample_rects(const RotatedRect& bbox, const CandidateConstraints& cc, std::size_t count,
                                      Rng& rng, std::size_t max_attempts) {
    std::vector<RotatedRect> out;
    out.reserve(count);
    const double bbox_area = bbox.area();
    const double log_aspect = std::log(cc.max_aspect);
    const ConvexPolygon bbox_poly = rect_corners(bbox);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (attempts++ >= max_attempts)
            throw InfeasibleConstraints("candidate sampling accepted " + std::to_string(out.size()) + " of " +
                                        std::to_string(count) + " rectangles in " + std::to_string(max_attempts) +
                                        " attempts");
        const double frac = cc.area_frac_min == cc.area_frac_max ? cc.area_frac_min
                                                                 : rng.uniform(cc.area_frac_min, cc.area_frac_max);
        const double aspect = log_aspect > 0.0 ? std::exp(rng.uniform(-log_aspect, log_aspect)) : 1.0;
        const double area = frac * bbox_area;
        const double w = std::sqrt(area * aspect);
        const double h = area / w;
        const double cx = rng.uniform(bbox.cx - 0.5 * bbox.w, bbox.cx + 0.5 * bbox.w);
        const double cy = rng.uniform(bbox.cy - 0.5 * bbox.h, bbox.cy + 0.5 * bbox.h);
        const double theta = rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
        const RotatedRect r(cx, cy, w, h, theta);

        const double af = r.area() / bbox_area;
        if (af < cc.area_frac_min * (1.0 - 1e-12) || af > cc.area_frac_max * (1.0 + 1e-12)) continue;
        const double inter = clip_convex(rect_corners(r), bbox_poly).area();
        const double iou = inter / (r.area() + bbox_area - inter);
        if (iou < cc.min_iou_with_bbox) continue;
        out.push_back(r);
    }
    return out;
}

std::vector<RotatedRect> generate_candidates(const RotatedRect& bbox, const CandidateConstraints& cc, Rng& rng) {
    cc.validate();
    return sample_rects(bbox, cc, cc.n_candidates, rng);
}

double score_pair(const PointCloud& source, const PointCloud& target, const PointCloud& ground_truth_aligned,
                  const IcpParams& icp) {
    if (source.size() != ground_truth_aligned.size())
        throw std::invalid_argument("score_pair: source and ground truth differ in size");
    if (source.empty() || target.empty()) return kInf;
    const IcpResult res = icp_align(source, target, icp);
    if (res.failed()) return kInf;
    double acc = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i)
        acc += (res.transform.apply(source[i]) - ground_truth_aligned[i]).norm();
    return acc / static_cast<double>(source.size());
}

RotatedRect object_bbox(const PointCloud& k, const CameraModel& cam) {
    if (k.empty()) throw std::invalid_argument("object_bbox: empty cloud");
    const auto pixels = project_pixels(k, cam);
    const RotatedRect box = bounding_rect(pixels);
    if (box.w < 1.0 || box.h < 1.0) throw std::invalid_argument("object_bbox: projection spans less than a pixel");
    return box;
}

LabelGenRun score_candidates(const PointCloud& k, const CameraModel& cam, const LabelGenConfig& cfg, const Rng& rng,
                             const CellObserver& observer) {
    cfg.validate();
    cam.validate();
    if (k.empty()) throw std::invalid_argument("label generation needs a nonempty cloud");

    LabelGenRun run;
    run.bbox = object_bbox(k, cam);
    Rng cand_rng = rng.split(kCandidateStream);
    const auto candidates = generate_candidates(run.bbox, cfg.constraints, cand_rng);
    const std::size_t n_rects = candidates.size();

    // Targets come from the undisturbed cloud.
    const auto k_pixels = project_pixels(k, cam);
    std::vector<PointCloud> targets(n_rects);
    parallel_for(
        n_rects, [&](std::size_t r) { targets[r] = extract_band(k, k_pixels, candidates[r], cfg.scan.near_band).cloud; },
        cfg.threads);

    // One displacement per trial, shared by every candidate.
    const Vec3 pivot = centroid(k);
    Rng offset_rng = rng.split(kOffsetStream);
    std::vector<PointCloud> displaced(cfg.n_trials);
    std::vector<std::vector<Vec2>> displaced_pixels(cfg.n_trials);
    for (std::size_t j = 0; j < cfg.n_trials; ++j) {
        run.trial_offsets.push_back(random_offset(cfg.offsets, offset_rng).about(pivot));
        displaced[j] = apply_transform(k, run.trial_offsets[j]);
        displaced_pixels[j] = project_pixels(displaced[j], cam);
    }

    run.records.resize(n_rects);
    parallel_for(
        n_rects,
        [&](std::size_t r) {
            LabelRecord& rec = run.records[r];
            rec.rect = candidates[r];
            rec.candidate_index = r;
            rec.trial_scores.assign(cfg.n_trials, kInf);
            for (std::size_t j = 0; j < cfg.n_trials; ++j) {
                if (observer) observer(j, r, displaced[j]);
                Rng noise_rng = rng.split({kNoiseStream, j, r});
                const SimulatedScan scan = simulate_scan_projected(displaced[j], displaced_pixels[j], candidates[r],
                                                                   run.trial_offsets[j], cfg.scan, noise_rng);
                if (scan.empty() || targets[r].empty()) continue;
                rec.trial_scores[j] = score_pair(scan.source, targets[r], scan.ground_truth_aligned, cfg.icp);
            }
            rec.worst_score = *std::max_element(rec.trial_scores.begin(), rec.trial_scores.end());
        },
        cfg.threads);
    return run;
}

FilteredRecords filter_recs(std::span<const LabelRecord> records, std::size_t k) {
    FilteredRecords out;
    out.records.assign(records.begin(), records.end());
    std::stable_sort(out.records.begin(), out.records.end(), [](const LabelRecord& a, const LabelRecord& b) {
        if (a.worst_score != b.worst_score) return a.worst_score < b.worst_score;
        return a.candidate_index < b.candidate_index;
    });
    if (k > out.records.size()) {
        out.truncated = true;
    } else {
        out.records.resize(k);
    }
    return out;
}

std::vector<LabelRecord> label_generation(const PointCloud& k, const CameraModel& cam, const LabelGenConfig& cfg,
                                          const Rng& rng) {
    const LabelGenRun run = score_candidates(k, cam, cfg, rng);
    const bool any_finite = std::any_of(run.records.begin(), run.records.end(),
                                        [](const LabelRecord& r) { return std::isfinite(r.worst_score); });
    if (!any_finite) throw NoViableRegion("no candidate region produced a usable scan");
    return filter_recs(run.records, cfg.top_k).records;
}

}  // namespace pretouch
