#include "pretouch/config.hpp"

#include "pretouch/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace pretouch {

namespace {

// Reads one JSON object, tracking which keys were consumed so leftovers can
// be reported.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    void get(const char* key, double& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number()) fail(key, "a number");
            out = v->get<double>();
        }
    }
    void get(const char* key, bool& out) {
        if (const Json* v = take(key)) {
            if (!v->is_boolean()) fail(key, "a boolean");
            out = v->get<bool>();
        }
    }
    void get(const char* key, int& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number_integer()) fail(key, "an integer");
            const auto x = v->get<std::int64_t>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(key, "an int");
            out = static_cast<int>(x);
        }
    }
    void get(const char* key, unsigned& out) {
        std::uint64_t x = out;
        get(key, x);
        if (x > std::numeric_limits<unsigned>::max()) fail(key, "a small non-negative integer");
        out = static_cast<unsigned>(x);
    }
    void get(const char* key, std::uint64_t& out) {
        if (const Json* v = take(key)) {
            if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void get(const char* key, std::string& out) {
        if (const Json* v = take(key)) {
            if (!v->is_string()) fail(key, "a string");
            out = v->get<std::string>();
        }
    }
    const Json* sub(const char* key) { return take(key); }
    std::string child(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key '" + k + "' in " + where());
    }

private:
    const Json* take(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ConfigError(child(key) + " must be " + what);
    }
    std::string where() const { return path_.empty() ? "config" : path_; }

    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_camera(const Json& j, const std::string& path, CameraModel& c) {
    Reader r(j, path);
    std::string mode = c.mode == CameraModel::Mode::pinhole ? "pinhole" : "orthographic";
    r.get("mode", mode);
    if (mode == "pinhole") {
        c.mode = CameraModel::Mode::pinhole;
    } else if (mode == "orthographic") {
        c.mode = CameraModel::Mode::orthographic;
    } else {
        throw ConfigError(path + ".mode must be \"pinhole\" or \"orthographic\"");
    }
    r.get("fx", c.fx);
    r.get("fy", c.fy);
    r.get("cx", c.cx);
    r.get("cy", c.cy);
    r.get("scale", c.scale);
    r.get("ox", c.ox);
    r.get("oy", c.oy);
    r.get("width", c.width);
    r.get("height", c.height);
    r.finish();
}

void read_labelgen(const Json& j, const std::string& path, LabelGenConfig& c) {
    Reader r(j, path);
    std::uint64_t n = c.constraints.n_candidates;
    r.get("n_candidates", n);
    c.constraints.n_candidates = n;
    r.get("min_iou_with_bbox", c.constraints.min_iou_with_bbox);
    r.get("area_frac_min", c.constraints.area_frac_min);
    r.get("area_frac_max", c.constraints.area_frac_max);
    r.get("max_aspect", c.constraints.max_aspect);
    n = c.n_trials;
    r.get("n_trials", n);
    c.n_trials = n;
    n = c.top_k;
    r.get("top_k", n);
    c.top_k = n;
    r.get("threads", c.threads);
    if (const Json* o = r.sub("offsets")) {
        Reader ro(*o, r.child("offsets"));
        ro.get("trans_limit_cm", c.offsets.trans_limit);
        ro.get("rot_limit_deg", c.offsets.rot_limit_deg);
        ro.finish();
    }
    if (const Json* s = r.sub("scan")) {
        Reader rs(*s, r.child("scan"));
        rs.get("on_band_px", c.scan.on_band);
        rs.get("near_band_px", c.scan.near_band);
        rs.get("noise_sigma_cm", c.scan.noise_sigma);
        rs.finish();
    }
    if (const Json* i = r.sub("icp")) {
        Reader ri(*i, r.child("icp"));
        ri.get("max_iterations", c.icp.max_iterations);
        ri.get("transform_epsilon", c.icp.transform_epsilon);
        ri.get("max_corr_dist_cm", c.icp.max_corr_dist);
        ri.get("outlier_lambda", c.icp.outlier_lambda);
        ri.get("min_inlier_fraction", c.icp.min_inlier_fraction);
        ri.finish();
    }
    r.finish();
}

Json double_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename Fn>
void validated(const char* what, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

EvalConfig RunConfig::eval() const {
    EvalConfig e;
    e.scan = labelgen.scan;
    e.icp = labelgen.icp;
    e.truth = truth;
    e.exclude_failed = exclude_failed;
    return e;
}

void RunConfig::validate() const {
    validated("camera", [&] { camera.validate(); });
    validated("ingest_camera", [&] { ingest_camera.validate(); });
    validated("labelgen", [&] { labelgen.validate(); });
    validated("narf", [&] { narf.validate(); });
    if (!(range_image.splat_sigma_px > 0.0) || !(range_image.splat_radius_px > 0.0) ||
        !(range_image.min_weight >= 0.0))
        throw ConfigError("range_image: sigma and radius must be positive, min_weight non-negative");
}

RunConfig parse_run_config(const Json& j) {
    RunConfig c;
    Reader r(j, "");
    r.get("seed", c.seed);
    if (const Json* v = r.sub("camera")) read_camera(*v, "camera", c.camera);
    if (const Json* v = r.sub("ingest_camera")) read_camera(*v, "ingest_camera", c.ingest_camera);
    if (const Json* v = r.sub("labelgen")) read_labelgen(*v, "labelgen", c.labelgen);
    if (const Json* v = r.sub("range_image")) {
        Reader ri(*v, "range_image");
        ri.get("splat_sigma_px", c.range_image.splat_sigma_px);
        ri.get("splat_radius_px", c.range_image.splat_radius_px);
        ri.get("min_weight", c.range_image.min_weight);
        ri.finish();
    }
    if (const Json* v = r.sub("narf")) {
        Reader rn(*v, "narf");
        rn.get("support_radius_cm", c.narf.keypoints.support_radius);
        std::uint64_t n = c.narf.keypoints.top_m;
        rn.get("top_m", n);
        c.narf.keypoints.top_m = n;
        rn.get("edge_weight", c.narf.keypoints.edge_weight);
        rn.get("min_interest", c.narf.keypoints.min_interest);
        n = c.narf.n_beams;
        rn.get("n_beams", n);
        c.narf.n_beams = n;
        rn.get("descriptor_radius_cm", c.narf.descriptor_radius);
        rn.get("max_side_ratio", c.narf.max_side_ratio);
        rn.get("equal_sides", c.narf.equal_sides);
        rn.finish();
    }
    if (const Json* v = r.sub("evaluation")) {
        Reader re(*v, "evaluation");
        re.get("exclude_failed", c.exclude_failed);
        std::string truth = c.truth == TruthMode::known_offset ? "known_offset" : "full_scan";
        re.get("truth", truth);
        if (truth == "known_offset") {
            c.truth = TruthMode::known_offset;
        } else if (truth == "full_scan") {
            c.truth = TruthMode::full_scan;
        } else {
            throw ConfigError("evaluation.truth must be \"known_offset\" or \"full_scan\"");
        }
        std::uint64_t n = c.n_proposals;
        re.get("n_proposals", n);
        c.n_proposals = n;
        re.finish();
    }
    r.finish();
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

Json to_json(const CameraModel& c) {
    Json j;
    j["mode"] = c.mode == CameraModel::Mode::pinhole ? "pinhole" : "orthographic";
    j["fx"] = c.fx;
    j["fy"] = c.fy;
    j["cx"] = c.cx;
    j["cy"] = c.cy;
    j["scale"] = c.scale;
    j["ox"] = c.ox;
    j["oy"] = c.oy;
    j["width"] = c.width;
    j["height"] = c.height;
    return j;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["seed"] = c.seed;
    j["camera"] = to_json(c.camera);
    j["ingest_camera"] = to_json(c.ingest_camera);
    const LabelGenConfig& l = c.labelgen;
    Json lg;
    lg["n_candidates"] = l.constraints.n_candidates;
    lg["min_iou_with_bbox"] = l.constraints.min_iou_with_bbox;
    lg["area_frac_min"] = l.constraints.area_frac_min;
    lg["area_frac_max"] = l.constraints.area_frac_max;
    lg["max_aspect"] = l.constraints.max_aspect;
    lg["n_trials"] = l.n_trials;
    lg["top_k"] = l.top_k;
    // `threads` changes speed only and is left out so outputs do not depend
    // on it.
    lg["offsets"] = {{"trans_limit_cm", l.offsets.trans_limit}, {"rot_limit_deg", l.offsets.rot_limit_deg}};
    lg["scan"] = {{"on_band_px", l.scan.on_band},
                  {"near_band_px", l.scan.near_band},
                  {"noise_sigma_cm", l.scan.noise_sigma}};
    lg["icp"] = {{"max_iterations", l.icp.max_iterations},
                 {"transform_epsilon", l.icp.transform_epsilon},
                 {"max_corr_dist_cm", l.icp.max_corr_dist},
                 {"outlier_lambda", l.icp.outlier_lambda},
                 {"min_inlier_fraction", l.icp.min_inlier_fraction}};
    j["labelgen"] = lg;
    j["range_image"] = {{"splat_sigma_px", c.range_image.splat_sigma_px},
                        {"splat_radius_px", c.range_image.splat_radius_px},
                        {"min_weight", c.range_image.min_weight}};
    j["narf"] = {{"support_radius_cm", c.narf.keypoints.support_radius},
                 {"top_m", c.narf.keypoints.top_m},
                 {"edge_weight", c.narf.keypoints.edge_weight},
                 {"min_interest", c.narf.keypoints.min_interest},
                 {"n_beams", c.narf.n_beams},
                 {"descriptor_radius_cm", c.narf.descriptor_radius},
                 {"max_side_ratio", c.narf.max_side_ratio},
                 {"equal_sides", c.narf.equal_sides}};
    j["evaluation"] = {{"exclude_failed", c.exclude_failed},
                       {"truth", c.truth == TruthMode::known_offset ? "known_offset" : "full_scan"},
                       {"n_proposals", c.n_proposals}};
    return j;
}

Json to_json(const RotatedRect& r) {
    return {{"cx", r.cx}, {"cy", r.cy}, {"w", r.w}, {"h", r.h}, {"theta", r.theta}};
}

RotatedRect rect_from_json(const Json& j) {
    Reader r(j, "rect");
    double cx = 0, cy = 0, w = 0, h = 0, theta = 0;
    r.get("cx", cx);
    r.get("cy", cy);
    r.get("w", w);
    r.get("h", h);
    r.get("theta", theta);
    r.finish();
    try {
        return RotatedRect(cx, cy, w, h, theta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Json to_json(const RigidTransform& t) {
    const Mat4 m = t.matrix();
    Json rows = Json::array();
    for (int i = 0; i < 4; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2), m(i, 3)});
    return rows;
}

Json labels_to_json(const std::string& object_id, const RunConfig& cfg, std::span<const LabelRecord> records,
                    bool truncated) {
    Json j;
    j["object_id"] = object_id;
    j["camera"] = to_json(cfg.camera);
    j["config"] = to_json(cfg);
    j["truncated"] = truncated;
    Json recs = Json::array();
    for (const auto& r : records) {
        Json scores = Json::array();
        for (double s : r.trial_scores) scores.push_back(double_or_null(s));
        recs.push_back({{"rect", to_json(r.rect)},
                        {"worst_score_cm", double_or_null(r.worst_score)},
                        {"trial_scores_cm", scores},
                        {"candidate_index", r.candidate_index}});
    }
    j["records"] = recs;
    return j;
}

Json proposals_to_json(const std::string& object_id, const std::string& method, const RunConfig& cfg,
                       std::span<const RegionProposal> proposals) {
    Json j;
    j["object_id"] = object_id;
    j["method"] = method;
    j["camera"] = to_json(cfg.camera);
    j["config"] = to_json(cfg);
    Json arr = Json::array();
    for (const auto& p : proposals) arr.push_back({{"rect", to_json(p.rect)}, {"confidence", p.confidence}});
    j["proposals"] = arr;
    return j;
}

Json report_to_json(const EvalReport& r) {
    Json j;
    j["object_id"] = r.object_id;
    j["proposer"] = r.proposer;
    j["mode"] = r.mode;
    j["mean_cm"] = r.mean;
    j["std_cm"] = r.std;
    j["baseline_error_cm"] = r.baseline_error;
    j["exclude_failed"] = r.exclude_failed;
    Json scans = Json::array();
    for (const auto& s : r.scans)
        scans.push_back({{"scan_index", s.scan_index},
                         {"region", to_json(s.region)},
                         {"pose_error_cm", s.pose_error},
                         {"percent_scanned", s.percent_scanned},
                         {"converged", s.converged},
                         {"failed", s.failed},
                         {"source_points", s.source_points}});
    j["scans"] = scans;
    return j;
}

EvalReport report_from_json(const Json& j) {
    EvalReport r;
    Reader rd(j, "report");
    rd.get("object_id", r.object_id);
    rd.get("proposer", r.proposer);
    rd.get("mode", r.mode);
    rd.get("mean_cm", r.mean);
    rd.get("std_cm", r.std);
    rd.get("baseline_error_cm", r.baseline_error);
    rd.get("exclude_failed", r.exclude_failed);
    if (const Json* scans = rd.sub("scans")) {
        if (!scans->is_array()) throw ConfigError("report.scans must be an array");
        for (const Json& s : *scans) {
            Reader rs(s, "report.scans[]");
            ScanTrialResult t;
            std::uint64_t n = 0;
            rs.get("scan_index", n);
            t.scan_index = n;
            if (const Json* reg = rs.sub("region")) t.region = rect_from_json(*reg);
            rs.get("pose_error_cm", t.pose_error);
            rs.get("percent_scanned", t.percent_scanned);
            rs.get("converged", t.converged);
            rs.get("failed", t.failed);
            n = 0;
            rs.get("source_points", n);
            t.source_points = n;
            rs.finish();
            r.scans.push_back(t);
        }
    }
    rd.finish();
    return r;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
    out << "object_id,proposer,scan_index,percent_scanned,pose_error_cm,converged\n";
    for (const auto& r : reports)
        for (const auto& s : r.scans)
            out << r.object_id << ',' << r.proposer << ',' << s.scan_index << ',' << format_double(s.percent_scanned)
                << ',' << format_double(s.pose_error) << ',' << (s.converged ? "true" : "false") << '\n';
}

}  // namespace pretouch
