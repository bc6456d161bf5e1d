#include "pretouch/baselines.hpp"
#include "pretouch/config.hpp"
#include "pretouch/depth_png.hpp"
#include "pretouch/errors.hpp"
#include "pretouch/eval.hpp"
#include "pretouch/icp.hpp"
#include "pretouch/labelgen.hpp"
#include "pretouch/pcd_io.hpp"
#include "pretouch/scan_sim.hpp"
#include "pretouch/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pretouch;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Stream ids under the run seed. Label generation and the oracle proposer
// use the root generator itself so their candidates coincide.
constexpr std::uint64_t kRandomProposalStream = 0x72616e64;
constexpr std::uint64_t kEvalOffsetStream = 0x6f666673;
constexpr std::uint64_t kEvalScanStream = 0x7363616e;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::optional<unsigned> threads;

    RunConfig resolve() const {
        RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed) c.seed = *seed;
        if (threads) c.labelgen.threads = *threads;
        return c;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

PointCloud load_nonempty(const std::string& path) {
    PointCloud c = load_pcd(path);
    if (c.empty()) throw std::runtime_error(path + " holds no points");
    return c;
}

std::vector<RegionProposal> make_proposals(const std::string& method, const PointCloud& k, const RunConfig& cfg,
                                           std::size_t n) {
    if (method == "oracle") {
        if (n == 0) return {};
        const LabelGenRun run = score_candidates(k, cfg.camera, cfg.labelgen, Rng(cfg.seed));
        return oracle_proposals(run.records, n);
    }
    const RotatedRect bbox = object_bbox(k, cfg.camera);
    if (method == "random") {
        Rng rng = Rng(cfg.seed).split(kRandomProposalStream);
        return random_proposals(bbox, cfg.labelgen.constraints, n, rng);
    }
    if (method == "narf") {
        const RangeImage img = render_range_image(k, cfg.camera, cfg.range_image);
        auto props = narf_variant_proposals(img, bbox, cfg.narf);
        if (props.size() > n) props.resize(n);
        return props;
    }
    throw UsageError("unknown proposal method '" + method + "'");
}

int run_synth(const Common& common, const std::string& kind, const std::vector<double>& dims, double density,
              double bevel, double standoff, const std::string& out) {
    const RunConfig cfg = common.resolve();
    const auto k = parse_fixture_kind(kind);
    if (!k) throw UsageError("unknown fixture kind '" + kind + "'");
    FixtureSpec spec;
    spec.kind = *k;
    spec.dimensions = dims;
    spec.sample_density = density;
    spec.bevel = bevel;
    spec.standoff = standoff;
    spec.seed = cfg.seed;
    try {
        spec = spec.resolved();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    save_pcd(make_fixture(spec), out);
    return kExitOk;
}

int run_ingest(const Common& common, const std::string& depth_path, const std::string& out) {
    const RunConfig cfg = common.resolve();
    const DepthImage img = load_depth_png(depth_path);
    save_pcd(depth_image_to_cloud(img, cfg.ingest_camera), out);
    return kExitOk;
}

int run_labelgen(const Common& common, const std::string& in, std::string object_id,
                 std::optional<std::size_t> n_candidates, std::optional<std::size_t> n_trials,
                 std::optional<std::size_t> top_k, const std::string& out) {
    RunConfig cfg = common.resolve();
    if (n_candidates) cfg.labelgen.constraints.n_candidates = *n_candidates;
    if (n_trials) cfg.labelgen.n_trials = *n_trials;
    if (top_k) cfg.labelgen.top_k = *top_k;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (object_id.empty()) object_id = stem_of(in);
    const PointCloud k = load_nonempty(in);
    const LabelGenRun run = score_candidates(k, cfg.camera, cfg.labelgen, Rng(cfg.seed));
    const bool any_finite = std::any_of(run.records.begin(), run.records.end(),
                                        [](const LabelRecord& r) { return std::isfinite(r.worst_score); });
    if (!any_finite) throw NoViableRegion("no candidate region produced a usable scan");
    const FilteredRecords kept = filter_recs(run.records, cfg.labelgen.top_k);
    write_json(out, labels_to_json(object_id, cfg, kept.records, kept.truncated));
    if (kept.truncated)
        std::cerr << "warning: top_k " << cfg.labelgen.top_k << " exceeds the " << kept.records.size()
                  << " candidates; all were written\n";
    return kExitOk;
}

int run_propose(const Common& common, const std::string& in, std::string object_id, const std::string& method,
                std::optional<std::size_t> n, const std::string& out) {
    const RunConfig cfg = common.resolve();
    if (object_id.empty()) object_id = stem_of(in);
    const PointCloud k = load_nonempty(in);
    const auto props = make_proposals(method, k, cfg, n.value_or(cfg.n_proposals));
    write_json(out, proposals_to_json(object_id, method, cfg, props));
    return kExitOk;
}

int run_align(const Common& common, const std::string& source_path, const std::string& target_path,
              const std::string& out) {
    const RunConfig cfg = common.resolve();
    const PointCloud source = load_nonempty(source_path);
    const PointCloud target = load_nonempty(target_path);
    const IcpResult r = icp_align(source, target, cfg.labelgen.icp);
    static const char* kStatus[] = {"converged", "max_iterations", "no_correspondences", "degenerate"};
    Json j;
    j["source"] = source_path;
    j["target"] = target_path;
    j["config"] = to_json(cfg);
    j["transform"] = to_json(r.transform);
    j["fitness_cm"] = r.failed() ? Json(nullptr) : Json(r.fitness);
    j["converged"] = r.converged;
    j["status"] = kStatus[static_cast<int>(r.status)];
    j["iterations"] = r.iterations;
    j["inlier_fraction"] = r.inlier_fraction;
    const std::string text = j.dump(2) + "\n";
    if (!out.empty()) write_text(out, text);
    const Mat4 m = r.transform.matrix();
    for (int i = 0; i < 4; ++i)
        std::cout << format_double(m(i, 0)) << ' ' << format_double(m(i, 1)) << ' ' << format_double(m(i, 2)) << ' '
                  << format_double(m(i, 3)) << '\n';
    std::cout << "fitness_cm " << (r.failed() ? std::string("null") : format_double(r.fitness)) << "\nconverged "
              << (r.converged ? "true" : "false") << '\n';
    return kExitOk;
}

int run_evaluate(const Common& common, const std::string& in, std::string object_id, const std::string& proposer,
                 const std::string& mode, std::optional<std::size_t> n, const std::string& out_prefix) {
    const RunConfig cfg = common.resolve();
    if (object_id.empty()) object_id = stem_of(in);
    const PointCloud k = load_nonempty(in);
    const auto props = make_proposals(proposer, k, cfg, n.value_or(cfg.n_proposals));
    if (props.empty()) throw std::runtime_error("proposer '" + proposer + "' returned no regions");
    Rng offset_rng = Rng(cfg.seed).split(kEvalOffsetStream);
    const RigidTransform offset = random_offset(cfg.labelgen.offsets, offset_rng).about(centroid(k));
    const Rng scan_rng = Rng(cfg.seed).split(kEvalScanStream);
    EvalReport rep = mode == "sequential" ? sequential_scan_eval(k, cfg.camera, props, offset, cfg.eval(), scan_rng)
                                          : single_scan_eval(k, cfg.camera, props, offset, cfg.eval(), scan_rng);
    rep.object_id = object_id;
    rep.proposer = proposer;

    std::ostringstream csv;
    write_report_csv(csv, std::span<const EvalReport>(&rep, 1));
    write_text(out_prefix + ".csv", csv.str());

    Json j;
    j["config"] = to_json(cfg);
    j["offset"] = to_json(offset);
    j["results"] = Json::array({{{"object_id", rep.object_id},
                                 {"proposer", rep.proposer},
                                 {"mode", rep.mode},
                                 {"mean_cm", rep.mean},
                                 {"std_cm", rep.std},
                                 {"baseline_error_cm", rep.baseline_error}}});
    j["report"] = report_to_json(rep);
    write_json(out_prefix + ".json", j);
    return kExitOk;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Pre-touch scan-region selection and pose re-estimation"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--seed", common.seed, "Root seed (overrides the config file)");
    app.add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--threads", common.threads, "Worker threads (0 = all cores); never changes outputs");

    const std::vector<std::string> kinds = {"plane", "box_top", "l_plate", "disk", "ring", "asym_blob"};
    const std::vector<std::string> methods = {"random", "narf", "oracle"};

    std::string out, in, object_id, kind, method, mode = "single", depth, source, target;
    std::vector<double> dims;
    double density = FixtureSpec{}.sample_density, bevel = FixtureSpec{}.bevel, standoff = FixtureSpec{}.standoff;
    std::optional<std::size_t> n, n_candidates, n_trials, top_k;

    auto* synth = app.add_subcommand("synth", "Write a synthetic fixture cloud as PCD");
    synth->add_option("--kind", kind, "Fixture kind")->required()->check(CLI::IsMember(kinds));
    synth->add_option("--dims", dims, "Dimensions in cm, comma separated")->delimiter(',');
    synth->add_option("--density", density, "Samples per cm^2");
    synth->add_option("--bevel", bevel, "Edge chamfer width in cm");
    synth->add_option("--standoff", standoff, "Depth of the top surface in cm");
    synth->add_option("--out", out, "Output PCD")->required();

    auto* ingest = app.add_subcommand("ingest", "Convert a 16-bit millimeter depth PNG to PCD");
    ingest->add_option("--depth", depth, "Depth PNG")->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", out, "Output PCD")->required();

    auto* labelgen = app.add_subcommand("labelgen", "Score random candidate regions and keep the best");
    labelgen->add_option("--in", in, "Object cloud (PCD)")->required()->check(CLI::ExistingFile);
    labelgen->add_option("--object-id", object_id, "Identifier written to the output (default: file stem)");
    labelgen->add_option("--n-candidates", n_candidates, "Number of candidate rectangles");
    labelgen->add_option("--n-trials", n_trials, "Number of simulated offsets");
    labelgen->add_option("--top-k", top_k, "Records kept");
    labelgen->add_option("--out", out, "Output label JSON")->required();

    auto* propose = app.add_subcommand("propose", "Propose scan regions");
    propose->add_option("--in", in, "Object cloud (PCD)")->required()->check(CLI::ExistingFile);
    propose->add_option("--object-id", object_id, "Identifier written to the output (default: file stem)");
    propose->add_option("--method", method, "Proposer")->required()->check(CLI::IsMember(methods));
    propose->add_option("--n", n, "Number of proposals");
    propose->add_option("--out", out, "Output proposal JSON")->required();

    auto* align = app.add_subcommand("align", "Align a source cloud to a target cloud with ICP");
    align->add_option("--source", source, "Source PCD")->required()->check(CLI::ExistingFile);
    align->add_option("--target", target, "Target PCD")->required()->check(CLI::ExistingFile);
    align->add_option("--out", out, "Output transform JSON");

    auto* evaluate = app.add_subcommand("evaluate", "Run the scan evaluation protocol on one object");
    evaluate->add_option("--in", in, "Object cloud (PCD)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--object-id", object_id, "Identifier written to the output (default: file stem)");
    evaluate->add_option("--proposer", method, "Proposer")->required()->check(CLI::IsMember(methods));
    evaluate->add_option("--mode", mode, "single or sequential")->check(CLI::IsMember({"single", "sequential"}));
    evaluate->add_option("--n", n, "Number of scans");
    evaluate->add_option("--out", out, "Output prefix; writes <prefix>.csv and <prefix>.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(common, kind, dims, density, bevel, standoff, out);
        if (ingest->parsed()) return run_ingest(common, depth, out);
        if (labelgen->parsed()) return run_labelgen(common, in, object_id, n_candidates, n_trials, top_k, out);
        if (propose->parsed()) return run_propose(common, in, object_id, method, n, out);
        if (align->parsed()) return run_align(common, source, target, out);
        if (evaluate->parsed()) return run_evaluate(common, in, object_id, method, mode, n, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
