#include "pretouch/labelgen.hpp"
#include "pretouch/synthetic.hpp"

#include "fixture_classes.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pretouch;

namespace {

FixtureSpec spec_of(FixtureKind kind) {
    FixtureSpec s;
    s.kind = kind;
    return s;
}

}  // namespace

TEST(MakeFixture, PlaneCountAndFlatness) {
    const PointCloud c = make_fixture(spec_of(FixtureKind::plane));
    EXPECT_NEAR(static_cast<double>(c.size()), 2500.0, 125.0);
    for (const Vec3& p : c.points) EXPECT_EQ(p.z(), c[0].z());
}

TEST(MakeFixture, CountsWithinFivePercentOfDensityTimesArea) {
    for (FixtureKind kind : {FixtureKind::plane, FixtureKind::box_top, FixtureKind::l_plate, FixtureKind::disk,
                             FixtureKind::ring, FixtureKind::asym_blob}) {
        for (double density : {9.0, 25.0}) {
            FixtureSpec s = spec_of(kind);
            s.sample_density = density;
            const double expected = density * fixture_truth(s).footprint_area;
            const double n = static_cast<double>(make_fixture(s).size());
            EXPECT_NEAR(n, expected, 0.05 * expected) << to_string(kind) << " at " << density;
        }
    }
}

TEST(MakeFixture, LPlateConcaveCornerAndFootprint) {
    const FixtureSpec s = spec_of(FixtureKind::l_plate);
    const FixtureTruth t = fixture_truth(s);
    ASSERT_EQ(t.concave_corners.size(), 1u);
    EXPECT_EQ(t.convex_corners.size(), 5u);
    EXPECT_EQ(t.symmetry.kind, SymmetryKind::trivial);
    // Arms 10 x 4 along x and 4 x 10 along y, bounding box centered at 0:
    // they join at (-5 + 4, -5 + 4).
    EXPECT_NEAR(t.concave_corners[0].x(), -1.0, 1e-12);
    EXPECT_NEAR(t.concave_corners[0].y(), -1.0, 1e-12);
    for (const Vec3& p : make_fixture(s).points) {
        const bool arm_a = p.x() >= -5 && p.x() <= 5 && p.y() >= -5 && p.y() <= -1;
        const bool arm_b = p.x() >= -5 && p.x() <= -1 && p.y() >= -5 && p.y() <= 5;
        EXPECT_TRUE(arm_a || arm_b) << p.transpose();
        EXPECT_GE(p.z(), t.top_depth);
        EXPECT_LE(p.z(), t.top_depth + s.resolved().bevel + 1e-12);
    }
}

TEST(MakeFixture, Deterministic) {
    for (FixtureKind kind : {FixtureKind::l_plate, FixtureKind::asym_blob}) {
        FixtureSpec s = spec_of(kind);
        s.seed = 7;
        EXPECT_EQ(make_fixture(s).points, make_fixture(s).points);
    }
    FixtureSpec a = spec_of(FixtureKind::asym_blob), b = a;
    a.seed = 1;
    b.seed = 2;
    EXPECT_NE(make_fixture(a).size(), 0u);
    EXPECT_NE(make_fixture(a).points, make_fixture(b).points);
}

TEST(MakeFixture, BadSpecsRejected) {
    FixtureSpec s = spec_of(FixtureKind::plane);
    s.dimensions = {10};
    EXPECT_THROW(make_fixture(s), std::invalid_argument);
    s.dimensions = {10, -1};
    EXPECT_THROW(make_fixture(s), std::invalid_argument);
    s = spec_of(FixtureKind::ring);
    s.dimensions = {2, 3};
    EXPECT_THROW(make_fixture(s), std::invalid_argument);
    s = spec_of(FixtureKind::disk);
    s.sample_density = 0;
    EXPECT_THROW(make_fixture(s), std::invalid_argument);
}

TEST(FixtureTruth, SymmetryFlags) {
    EXPECT_EQ(fixture_truth(spec_of(FixtureKind::disk)).symmetry.kind, SymmetryKind::continuous);
    EXPECT_EQ(fixture_truth(spec_of(FixtureKind::ring)).symmetry.kind, SymmetryKind::continuous);
    FixtureSpec square = spec_of(FixtureKind::box_top);
    square.dimensions = {6, 6};
    EXPECT_EQ(fixture_truth(square).symmetry.kind, SymmetryKind::discrete);
    EXPECT_EQ(fixture_truth(square).symmetry.order, 4);
    EXPECT_EQ(fixture_truth(spec_of(FixtureKind::plane)).symmetry.order, 4);
    EXPECT_EQ(fixture_truth(spec_of(FixtureKind::box_top)).symmetry.order, 2);
    EXPECT_EQ(fixture_truth(spec_of(FixtureKind::asym_blob)).symmetry.kind, SymmetryKind::trivial);
}

TEST(FixtureKindNames, RoundTrip) {
    for (FixtureKind kind : {FixtureKind::plane, FixtureKind::box_top, FixtureKind::l_plate, FixtureKind::disk,
                             FixtureKind::ring, FixtureKind::asym_blob})
        EXPECT_EQ(parse_fixture_kind(to_string(kind)), kind);
    EXPECT_FALSE(parse_fixture_kind("teapot").has_value());
}

// No angular position on a disk is privileged when the offsets are pure
// rotations about its center.
TEST(DiskProperty, ScoresUncorrelatedWithAngularPosition) {
    const FixtureSpec s = spec_of(FixtureKind::disk);
    const PointCloud k = make_fixture(s);
    const CameraModel cam = CameraModel::orthographic_default();
    const Vec2 center = cam.project(centroid(k));
    LabelGenConfig cfg;
    cfg.constraints.n_candidates = 200;
    cfg.n_trials = 3;
    cfg.offsets = OffsetSpec{0.0, 5.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LabelGenRun run = score_candidates(k, cam, cfg, Rng(seed));
        std::vector<double> angle, score;
        for (const auto& r : run.records) {
            if (!std::isfinite(r.worst_score)) continue;
            angle.push_back(std::atan2(r.rect.cy - center.y(), r.rect.cx - center.x()));
            score.push_back(r.worst_score);
        }
        ASSERT_GT(angle.size(), 100u);
        EXPECT_LT(std::abs(oracle::spearman(angle, score)), 0.2) << "seed " << seed;
    }
}

TEST(LPlateProperty, CornerBeatsEdgeOverSeeds) {
    const FixtureSpec s = spec_of(FixtureKind::l_plate);
    const PointCloud k = make_fixture(s);
    const FixtureTruth t = fixture_truth(s);
    const CameraModel cam = CameraModel::orthographic_default();
    LabelGenConfig cfg;
    cfg.constraints.n_candidates = 100;
    cfg.n_trials = 3;
    double corner = 0, edge = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = fixture_classes::class_means(score_candidates(k, cam, cfg, Rng(1000 + seed)).records, t, cam);
        ASSERT_GT(m.n_corner, 0u);
        ASSERT_GT(m.n_edge, 0u);
        corner += m.corner;
        edge += m.edge;
    }
    EXPECT_LT(corner / 20, edge / 20);
}

TEST(Oracles, SpearmanKnownValues) {
    EXPECT_NEAR(oracle::spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-12);
    EXPECT_NEAR(oracle::spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-12);
    // Hand-computed: ranks (1,2,3,4) vs (2,1,4,3): 1 - 6*4/(4*15) = 0.6.
    EXPECT_NEAR(oracle::spearman({1, 2, 3, 4}, {2, 1, 4, 3}), 0.6, 1e-12);
}
