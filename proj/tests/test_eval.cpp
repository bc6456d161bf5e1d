#include "pretouch/eval.hpp"

#include "pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pretouch;

namespace {

FixtureSpec l_plate() {
    FixtureSpec s;
    s.kind = FixtureKind::l_plate;
    return s;
}

CameraModel ortho() { return CameraModel::orthographic_default(); }

std::vector<RegionProposal> random_props(const PointCloud& k, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return random_proposals(object_bbox(k, ortho()), CandidateConstraints{}, n, rng);
}

/// Shared oracle setup for the L-plate ordering tests.
struct LPlateRun {
    PointCloud k = make_fixture(l_plate());
    LabelGenConfig cfg;
    pipeline::Proposers props;

    LPlateRun() {
        cfg.constraints.n_candidates = 300;
        props = pipeline::make_proposers(k, ortho(), cfg, 100, 10);
    }
};

const LPlateRun& lplate_run() {
    static const LPlateRun run;
    return run;
}

}  // namespace

TEST(PoseError, Examples) {
    const PointCloud c({Vec3(1, 2, 3), Vec3(-4, 0, 2), Vec3(0, 0, 0)});
    const RigidTransform t = RigidTransform::from_euler_zyx(0.1, 0.2, 0.3, Vec3(1, 1, 1));
    EXPECT_EQ(pose_error(t, t, c), 0.0);
    const Vec3 d(0.3, -0.4, 1.2);
    EXPECT_NEAR(pose_error(RigidTransform::translation_only(d) * t, t, c), d.norm(), 1e-12);
    EXPECT_THROW(pose_error(t, t, PointCloud()), std::invalid_argument);
}

TEST(PoseError, RingChordLength) {
    const double radius = 3.0;
    std::vector<Vec3> ring;
    for (int i = 0; i < 360; ++i) {
        const double a = 2 * std::numbers::pi * i / 360.0;
        ring.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
    }
    const double five = 5 * std::numbers::pi / 180;
    const double err = pose_error(RigidTransform::from_euler_zyx(0, 0, five), RigidTransform::identity(), PointCloud(ring));
    EXPECT_NEAR(err, 2 * std::sin(five / 2) * radius, 1e-12);
    EXPECT_NEAR(err / radius, 0.08724, 1e-5);
}

TEST(SingleScan, ZeroOffsetZeroNoiseIsExact) {
    const PointCloud k = make_fixture(l_plate());
    EvalConfig cfg;
    cfg.scan.noise_sigma = 0;
    const auto rep = single_scan_eval(k, ortho(), random_props(k, 10, 1), RigidTransform::identity(), cfg, Rng(2));
    ASSERT_EQ(rep.scans.size(), 10u);
    for (const auto& s : rep.scans) EXPECT_LE(s.pose_error, 1e-6);
    EXPECT_LE(rep.std, 1e-6);
    EXPECT_EQ(rep.baseline_error, 0.0);
}

TEST(SingleScan, SummaryRecomputesFromScans) {
    const PointCloud k = make_fixture(l_plate());
    const RigidTransform off = pipeline::eval_offset(k, 3);
    auto rep = single_scan_eval(k, ortho(), random_props(k, 10, 4), off, EvalConfig{}, Rng(5));
    double sum = 0;
    for (const auto& s : rep.scans) sum += s.pose_error;
    const double mean = sum / rep.scans.size();
    double var = 0;
    for (const auto& s : rep.scans) var += (s.pose_error - mean) * (s.pose_error - mean);
    EXPECT_DOUBLE_EQ(rep.mean, mean);
    EXPECT_DOUBLE_EQ(rep.std, std::sqrt(var / rep.scans.size()));
    const double stored_mean = rep.mean, stored_std = rep.std;
    rep.summarize();
    EXPECT_EQ(rep.mean, stored_mean);
    EXPECT_EQ(rep.std, stored_std);
}

TEST(SingleScan, FailedScanCountsAsBaselineUnlessExcluded) {
    const PointCloud k = make_fixture(l_plate());
    const RigidTransform off = pipeline::eval_offset(k, 6);
    std::vector<RegionProposal> props = random_props(k, 3, 7);
    props.push_back({RotatedRect(5000, 5000, 10, 10, 0), 0.0});  // misses the object entirely
    EvalConfig cfg;
    const auto incl = single_scan_eval(k, ortho(), props, off, cfg, Rng(8));
    const auto& miss = incl.scans.back();
    EXPECT_TRUE(miss.failed);
    EXPECT_FALSE(miss.converged);
    EXPECT_EQ(miss.pose_error, incl.baseline_error);
    cfg.exclude_failed = true;
    const auto excl = single_scan_eval(k, ortho(), props, off, cfg, Rng(8));
    ASSERT_EQ(excl.scans.size(), 4u);
    double sum = 0;
    for (std::size_t i = 0; i < 3; ++i) sum += excl.scans[i].pose_error;
    EXPECT_DOUBLE_EQ(excl.mean, sum / 3);
}

TEST(SingleScan, OracleBeatsRandomOnLPlate) {
    const LPlateRun& run = lplate_run();
    ASSERT_EQ(run.props.oracle.size(), 10u);
    double oracle = 0, random = 0;
    for (std::uint64_t e = 0; e < 3; ++e) {
        const RigidTransform off = pipeline::eval_offset(run.k, 300 + e);
        const EvalConfig ec = pipeline::eval_config(run.cfg);
        oracle += single_scan_eval(run.k, ortho(), run.props.oracle, off, ec, Rng(400 + e)).mean;
        random += single_scan_eval(run.k, ortho(), run.props.random, off, ec, Rng(400 + e)).mean;
    }
    EXPECT_LT(oracle, random);
}

TEST(Sequential, LPlateReachesHalfCentimeterEarlyAndImprovesOnFirstScan) {
    const LPlateRun& run = lplate_run();
    const RigidTransform off = pipeline::eval_offset(run.k, 300);
    const auto rep = sequential_scan_eval(run.k, ortho(), run.props.oracle, off, pipeline::eval_config(run.cfg), Rng(400));
    ASSERT_EQ(rep.scans.size(), 10u);
    bool reached = false;
    for (std::size_t i = 0; i < rep.scans.size(); ++i) {
        if (i > 0) EXPECT_GE(rep.scans[i].percent_scanned, rep.scans[i - 1].percent_scanned);
        reached |= rep.scans[i].pose_error <= 0.5 && rep.scans[i].percent_scanned <= 0.20;
    }
    EXPECT_TRUE(reached);
    EXPECT_LE(rep.scans[0].pose_error, rep.baseline_error);
}

TEST(Sequential, PercentScannedCountsUniquePoints) {
    const PointCloud k = make_fixture(l_plate());
    auto props = random_props(k, 2, 9);
    props.insert(props.begin() + 1, props[0]);  // same region twice
    props[1].confidence = props[0].confidence;
    EvalConfig cfg;
    const auto rep = sequential_scan_eval(k, ortho(), props, pipeline::eval_offset(k, 10), cfg, Rng(11));
    EXPECT_EQ(rep.scans[0].percent_scanned, rep.scans[1].percent_scanned);
    EXPECT_GE(rep.scans[2].percent_scanned, rep.scans[1].percent_scanned);
    EXPECT_EQ(rep.scans[1].source_points, 2 * rep.scans[0].source_points);
}

TEST(Sequential, UnsortedProposalsRejected) {
    const PointCloud k = make_fixture(l_plate());
    auto props = random_props(k, 3, 12);
    std::swap(props[0], props[2]);
    EXPECT_THROW(sequential_scan_eval(k, ortho(), props, RigidTransform::identity(), EvalConfig{}, Rng(1)),
                 std::invalid_argument);
}

TEST(Protocol, NoOffsetNoNoiseIsExactForEveryProposer) {
    const PointCloud k = make_fixture(l_plate());
    LabelGenConfig lg;
    lg.constraints.n_candidates = 40;
    lg.n_trials = 2;
    const auto props = pipeline::make_proposers(k, ortho(), lg, 13, 5);
    EvalConfig cfg;
    cfg.scan.noise_sigma = 0;
    for (const auto* p : {&props.oracle, &props.random, &props.narf}) {
        ASSERT_FALSE(p->empty());
        for (const auto& s : single_scan_eval(k, ortho(), *p, RigidTransform::identity(), cfg, Rng(1)).scans)
            EXPECT_LE(s.pose_error, 1e-6);
        for (const auto& s : sequential_scan_eval(k, ortho(), *p, RigidTransform::identity(), cfg, Rng(1)).scans)
            EXPECT_LE(s.pose_error, 1e-6);
    }
}

TEST(Protocol, SingleScanMatchesSequentialFirstScan) {
    const PointCloud k = make_fixture(l_plate());
    const auto props = random_props(k, 4, 14);
    const RigidTransform off = pipeline::eval_offset(k, 15);
    const auto a = single_scan_eval(k, ortho(), props, off, EvalConfig{}, Rng(16));
    const auto b = sequential_scan_eval(k, ortho(), props, off, EvalConfig{}, Rng(16));
    EXPECT_EQ(a.scans[0].pose_error, b.scans[0].pose_error);
    EXPECT_EQ(a.baseline_error, b.baseline_error);
}

TEST(Protocol, FullScanTruthMatchesKnownOffsetWithoutNoise) {
    const PointCloud k = make_fixture(l_plate());
    const RigidTransform off = pipeline::eval_offset(k, 17);
    EvalConfig cfg;
    cfg.truth = TruthMode::full_scan;
    cfg.scan.noise_sigma = 0;
    const auto full = single_scan_eval(k, ortho(), random_props(k, 3, 18), off, cfg, Rng(19));
    cfg.truth = TruthMode::known_offset;
    const auto known = single_scan_eval(k, ortho(), random_props(k, 3, 18), off, cfg, Rng(19));
    EXPECT_NEAR(full.baseline_error, known.baseline_error, 1e-3);
    EXPECT_GT(known.baseline_error, 0.0);
}
