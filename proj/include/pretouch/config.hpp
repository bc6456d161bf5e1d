#pragma once

#include "pretouch/baselines.hpp"
#include "pretouch/eval.hpp"
#include "pretouch/icp.hpp"
#include "pretouch/labelgen.hpp"
#include "pretouch/pointcloud.hpp"
#include "pretouch/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace pretouch {

using Json = nlohmann::ordered_json;

/// Every tunable of the pipeline. Parsing starts from the defaults and
/// overrides only the keys present; unknown keys raise ConfigError.
struct RunConfig {
    std::uint64_t seed = 0;
    CameraModel camera = CameraModel::orthographic_default();  // used by labelgen/propose/evaluate
    CameraModel ingest_camera = CameraModel::pinhole_default();
    LabelGenConfig labelgen;  // constraints, trials, offsets, scan bands, ICP, top_k, threads
    RangeImageParams range_image;
    NarfParams narf;
    bool exclude_failed = false;
    TruthMode truth = TruthMode::known_offset;
    std::size_t n_proposals = 10;

    /// Evaluation settings sharing the label generator's scan and ICP blocks.
    EvalConfig eval() const;
    void validate() const;
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path);
/// Fully resolved document; parse_run_config(to_json(c)) reproduces c except
/// labelgen.threads, which is not echoed.
Json to_json(const RunConfig& c);

Json to_json(const CameraModel& c);
Json to_json(const RotatedRect& r);
RotatedRect rect_from_json(const Json& j);
Json to_json(const RigidTransform& t);

/// Nonfinite scores are written as null.
Json labels_to_json(const std::string& object_id, const RunConfig& cfg, std::span<const LabelRecord> records,
                    bool truncated);
Json proposals_to_json(const std::string& object_id, const std::string& method, const RunConfig& cfg,
                       std::span<const RegionProposal> proposals);

Json report_to_json(const EvalReport& r);
EvalReport report_from_json(const Json& j);
/// Header plus one row per scan: object_id, proposer, scan_index,
/// percent_scanned, pose_error_cm, converged.
void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace pretouch
