#pragma once

// End-to-end evaluation setup shared by the eval unit tests and the
// acceptance binary: fixtures, proposers and offsets with pinned seeds.

#include "pretouch/baselines.hpp"
#include "pretouch/eval.hpp"
#include "pretouch/labelgen.hpp"
#include "pretouch/synthetic.hpp"

#include <string>
#include <vector>

namespace pipeline {

using namespace pretouch;

struct NamedFixture {
    std::string name;
    FixtureSpec spec;
};

/// Five fixtures with trivial in-plane symmetry.
inline std::vector<NamedFixture> asymmetric_fixtures() {
    std::vector<NamedFixture> out;
    FixtureSpec l;
    l.kind = FixtureKind::l_plate;
    out.push_back({"l_plate", l});
    FixtureSpec lu = l;
    lu.dimensions = {12, 3, 5, 8};
    out.push_back({"l_plate_uneven", lu});
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        FixtureSpec b;
        b.kind = FixtureKind::asym_blob;
        b.seed = seed;
        out.push_back({"asym_blob_" + std::to_string(seed), b});
    }
    return out;
}

struct Proposers {
    RotatedRect bbox;
    std::vector<RegionProposal> oracle;
    std::vector<RegionProposal> random;
    std::vector<RegionProposal> narf;
};

inline Proposers make_proposers(const PointCloud& k, const CameraModel& cam, const LabelGenConfig& cfg,
                                std::uint64_t seed, std::size_t n) {
    Proposers p;
    const LabelGenRun run = score_candidates(k, cam, cfg, Rng(seed));
    p.bbox = run.bbox;
    p.oracle = oracle_proposals(run.records, n);
    Rng rr(seed + 100);
    p.random = random_proposals(run.bbox, cfg.constraints, n, rr);
    p.narf = narf_variant_proposals(render_range_image(k, cam), run.bbox);
    if (p.narf.size() > n) p.narf.resize(n);
    return p;
}

/// Evaluation offset e for a fixture, drawn in the default regime and
/// applied about the object centroid.
inline RigidTransform eval_offset(const PointCloud& k, std::uint64_t seed) {
    Rng rng(seed);
    return random_offset(OffsetSpec{}, rng).about(centroid(k));
}

inline EvalConfig eval_config(const LabelGenConfig& cfg) {
    EvalConfig ec;
    ec.scan = cfg.scan;
    ec.icp = cfg.icp;
    return ec;
}

}  // namespace pipeline
