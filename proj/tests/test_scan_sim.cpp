#include "pretouch/scan_sim.hpp"
#include "pretouch/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace pretouch;

namespace {

PointCloud plane_10() {
    FixtureSpec s;
    s.kind = FixtureKind::plane;
    return make_fixture(s);
}

CameraModel ortho() { return CameraModel::orthographic_default(); }

/// Inset rectangle in pixels, centered on the plane's projection.
RotatedRect inset_rect(const CameraModel& cam) {
    const Vec2 c = cam.project(Vec3(0, 0, 50));
    return RotatedRect(c.x(), c.y(), 100, 60, 0.3);
}

}  // namespace

TEST(RandomOffset, ZeroSpecIsIdentity) {
    Rng rng(1);
    const RigidTransform t = random_offset(OffsetSpec{0.0, 0.0}, rng);
    EXPECT_EQ(t.matrix(), Mat4::Identity());
}

TEST(RandomOffset, BoundsMeanAndDeterminism) {
    const OffsetSpec spec{2.0, 5.0};
    Rng rng(2);
    Vec3 mean = Vec3::Zero();
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const RigidTransform t = random_offset(spec, rng);
        ASSERT_TRUE(t.is_valid());
        EXPECT_LE(t.translation().cwiseAbs().maxCoeff(), 2.0);
        // Each Euler angle within 5 degrees bounds the total angle by 5 * sqrt(3).
        const double angle = std::acos(std::clamp((t.rotation().trace() - 1) / 2, -1.0, 1.0));
        EXPECT_LE(angle, 5.0 * std::sqrt(3.0) * std::numbers::pi / 180.0 + 1e-12);
        mean += t.translation();
    }
    mean /= n;
    EXPECT_LE(mean.cwiseAbs().maxCoeff(), 0.05);
    Rng a(3), b(3);
    EXPECT_EQ(random_offset(spec, a).matrix(), random_offset(spec, b).matrix());
}

TEST(RandomOffset, NegativeSpecRejected) {
    Rng rng(1);
    EXPECT_THROW(random_offset(OffsetSpec{-1.0, 0.0}, rng), std::invalid_argument);
}

TEST(ScanConfig, BandsMustNest) {
    ScanConfig c;
    c.on_band = 5;
    c.near_band = 2;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ScanConfig{};
    c.on_band = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ExtractTarget, OffCloudRectIsEmpty) {
    const Extraction e = extract_target(plane_10(), RotatedRect(5000, 5000, 10, 10, 0), ortho(), ScanConfig{});
    EXPECT_TRUE(e.empty());
    EXPECT_TRUE(e.cloud.empty());
}

TEST(ExtractTarget, InsetRectSelectsExactlyTheBand) {
    const PointCloud k = plane_10();
    const CameraModel cam = ortho();
    ScanConfig cfg;
    cfg.near_band = 5;
    const RotatedRect r = inset_rect(cam);
    const Extraction e = extract_target(k, r, cam, cfg);
    ASSERT_FALSE(e.empty());
    const auto pix = project_pixels(k, cam);
    std::vector<bool> chosen(k.size(), false);
    for (std::size_t j = 0; j < e.indices.size(); ++j) {
        chosen[e.indices[j]] = true;
        EXPECT_EQ(e.cloud[j], k[e.indices[j]]);
        EXPECT_LE(perimeter_distance(r, pix[e.indices[j]]), cfg.near_band);
    }
    bool interior_gap = false;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!chosen[i]) EXPECT_GT(perimeter_distance(r, pix[i]), cfg.near_band - 1e-9);
        interior_gap |= !chosen[i] && r.contains(pix[i]);
    }
    EXPECT_TRUE(interior_gap) << "selection should be a ring, not a filled rectangle";
}

TEST(ExtractTarget, WiderBandNeverShrinks) {
    const PointCloud k = plane_10();
    const CameraModel cam = ortho();
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        const RotatedRect r(rng.uniform(150, 450), rng.uniform(100, 350), rng.uniform(20, 200), rng.uniform(20, 200),
                            rng.uniform(-2, 2));
        ScanConfig a;
        a.near_band = rng.uniform(1, 20);
        ScanConfig b = a;
        b.near_band = 2 * a.near_band;
        const auto sa = extract_target(k, r, cam, a).indices;
        const auto sb = extract_target(k, r, cam, b).indices;
        EXPECT_TRUE(std::includes(sb.begin(), sb.end(), sa.begin(), sa.end()));
    }
}

TEST(ExtractSource, NestedInTargetAndOrthographicDistance) {
    const PointCloud k = plane_10();
    const CameraModel cam = ortho();
    const RotatedRect r = inset_rect(cam);
    ScanConfig cfg;
    cfg.on_band = 2;
    cfg.near_band = 3;
    const auto src = extract_source(k, r, cam, cfg);
    const auto tgt = extract_target(k, r, cam, cfg);
    ASSERT_FALSE(src.empty());
    EXPECT_TRUE(std::includes(tgt.indices.begin(), tgt.indices.end(), src.indices.begin(), src.indices.end()));
    // Rect in world units: pixel -> cm through the orthographic scale.
    const RotatedRect world((r.cx - cam.ox) / cam.scale, (r.cy - cam.oy) / cam.scale, r.w / cam.scale,
                            r.h / cam.scale, r.theta);
    for (const Vec3& p : src.cloud.points)
        EXPECT_LE(perimeter_distance(world, Vec2(p.x(), p.y())), cfg.on_band / cam.scale + 1e-9);
    EXPECT_TRUE(extract_source(PointCloud(), r, cam, cfg).empty());
}

TEST(Selection, InvariantToDepthShiftUnderOrthographic) {
    const PointCloud k = plane_10();
    const PointCloud shifted = apply_transform(k, RigidTransform::translation_only({0, 0, 13.5}));
    const CameraModel cam = ortho();
    const RotatedRect r = inset_rect(cam);
    EXPECT_EQ(extract_target(k, r, cam, ScanConfig{}).indices, extract_target(shifted, r, cam, ScanConfig{}).indices);
    EXPECT_EQ(extract_source(k, r, cam, ScanConfig{}).indices, extract_source(shifted, r, cam, ScanConfig{}).indices);
}

TEST(SimulateScan, IdentityNoiselessIsSubsetOfObject) {
    const PointCloud k = plane_10();
    ScanConfig cfg;
    cfg.noise_sigma = 0;
    Rng rng(5);
    const SimulatedScan s = simulate_scan(k, inset_rect(ortho()), RigidTransform::identity(), ortho(), cfg, rng);
    ASSERT_FALSE(s.empty());
    EXPECT_EQ(s.source.points, s.ground_truth_aligned.points);
    for (std::size_t j = 0; j < s.indices.size(); ++j) EXPECT_EQ(s.source[j], k[s.indices[j]]);
}

TEST(SimulateScan, KnownOffsetIsDefinitional) {
    const PointCloud k = plane_10();
    const RigidTransform t = RigidTransform::from_euler_zyx(0.02, -0.03, 0.05, Vec3(1, -0.5, 0.2)).about(centroid(k));
    for (double sigma : {0.0, 0.15}) {
        ScanConfig cfg;
        cfg.noise_sigma = sigma;
        Rng rng(6);
        const SimulatedScan s = simulate_scan(k, inset_rect(ortho()), t, ortho(), cfg, rng);
        ASSERT_EQ(s.source.size(), s.ground_truth_aligned.size());
        ASSERT_EQ(s.source.size(), s.indices.size());
        for (std::size_t j = 0; j < s.source.size(); ++j)
            EXPECT_LE((t.apply(s.ground_truth_aligned[j]) - s.source[j]).norm(), 1e-9);
        if (sigma == 0.0)
            for (std::size_t j = 0; j < s.source.size(); ++j)
                EXPECT_LE((s.ground_truth_aligned[j] - k[s.indices[j]]).norm(), 1e-9);
    }
}

TEST(SimulateScan, SeedFixesOutput) {
    const PointCloud k = plane_10();
    const RigidTransform t = RigidTransform::translation_only({0.5, 0.5, 0});
    Rng a(7), b(7);
    EXPECT_EQ(simulate_scan(k, inset_rect(ortho()), t, ortho(), ScanConfig{}, a).source.points,
              simulate_scan(k, inset_rect(ortho()), t, ortho(), ScanConfig{}, b).source.points);
}
