#include "pretouch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pretouch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Gradient {
    std::vector<double> gx, gy;  // cm per cm
};

// Central differences where both neighbors are valid, one-sided otherwise.
Gradient depth_gradient(const RangeImage& img) {
    Gradient g;
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    g.gx.assign(n, 0.0);
    g.gy.assign(n, 0.0);
    auto diff = [&](int u, int v, int du, int dv) {
        const bool fwd = img.valid(u + du, v + dv);
        const bool back = img.valid(u - du, v - dv);
        if (fwd && back) return 0.5 * (img.at(u + du, v + dv) - img.at(u - du, v - dv));
        if (fwd) return img.at(u + du, v + dv) - img.at(u, v);
        if (back) return img.at(u, v) - img.at(u - du, v - dv);
        return 0.0;
    };
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            if (!img.valid(u, v)) continue;
            const std::size_t i = static_cast<std::size_t>(v) * img.width + u;
            g.gx[i] = diff(u, v, 1, 0) * img.px_per_cm;
            g.gy[i] = diff(u, v, 0, 1) * img.px_per_cm;
        }
    }
    return g;
}

// Sum of `field` over the disk of radius r (px) around every pixel, using
// per-row prefix sums.
std::vector<double> disk_sum(const std::vector<double>& field, int width, int height, double r,
                             const RangeImage& img) {
    std::vector<double> prefix(static_cast<std::size_t>(width + 1) * height, 0.0);
    for (int v = 0; v < height; ++v) {
        double acc = 0.0;
        for (int u = 0; u < width; ++u) {
            acc += field[static_cast<std::size_t>(v) * width + u];
            prefix[static_cast<std::size_t>(v) * (width + 1) + u + 1] = acc;
        }
    }
    const int ri = static_cast<int>(std::floor(r));
    std::vector<int> half(2 * ri + 1);
    for (int dy = -ri; dy <= ri; ++dy)
        half[dy + ri] = static_cast<int>(std::floor(std::sqrt(std::max(0.0, r * r - double(dy) * dy))));
    std::vector<double> out(field.size(), 0.0);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            if (!img.valid(u, v)) continue;
            double acc = 0.0;
            for (int dy = -ri; dy <= ri; ++dy) {
                const int y = v + dy;
                if (y < 0 || y >= height) continue;
                const int lo = std::max(0, u - half[dy + ri]);
                const int hi = std::min(width - 1, u + half[dy + ri]);
                const double* row = &prefix[static_cast<std::size_t>(y) * (width + 1)];
                acc += row[hi + 1] - row[lo];
            }
            out[static_cast<std::size_t>(v) * width + u] = acc;
        }
    }
    return out;
}

// Bilinear depth at a subpixel position; invalid unless all four cells are.
bool sample_depth(const RangeImage& img, const Vec2& p, double& z) {
    const int u0 = static_cast<int>(std::floor(p.x()));
    const int v0 = static_cast<int>(std::floor(p.y()));
    if (!img.valid(u0, v0) || !img.valid(u0 + 1, v0) || !img.valid(u0, v0 + 1) || !img.valid(u0 + 1, v0 + 1))
        return false;
    const double fx = p.x() - u0, fy = p.y() - v0;
    // Difference form: exact on constant patches.
    const double z00 = img.at(u0, v0), z10 = img.at(u0 + 1, v0), z01 = img.at(u0, v0 + 1), z11 = img.at(u0 + 1, v0 + 1);
    z = z00 + fx * (z10 - z00) + fy * (z01 - z00) + fx * fy * (z11 - z10 - z01 + z00);
    return true;
}

}  // namespace

std::vector<RegionProposal> random_proposals(const RotatedRect& bbox, const CandidateConstraints& cc, std::size_t n,
                                             Rng& rng) {
    CandidateConstraints c = cc;
    c.n_candidates = std::max<std::size_t>(1, n);
    c.validate();
    std::vector<RegionProposal> out;
    if (n == 0) return out;
    const auto rects = sample_rects(bbox, c, n, rng);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({rects[i], static_cast<double>(n - i)});
    return out;
}

std::vector<RegionProposal> oracle_proposals(std::span<const LabelRecord> records, std::size_t n) {
    std::vector<RegionProposal> out;
    if (n == 0 || records.empty()) return out;
    for (const LabelRecord& r : filter_recs(records, records.size()).records) {
        if (out.size() >= n || !std::isfinite(r.worst_score)) break;
        out.push_back({r.rect, -r.worst_score});
    }
    return out;
}

RangeImage::RangeImage(const CameraModel& cam, double ppc)
    : width(cam.width), height(cam.height), depth(static_cast<std::size_t>(cam.width) * cam.height, 0.0), camera(cam),
      px_per_cm(ppc) {
    if (!(ppc > 0.0)) throw std::invalid_argument("RangeImage: px_per_cm must be positive");
}

RangeImage render_range_image(const PointCloud& cloud, const CameraModel& cam, const RangeImageParams& params) {
    cam.validate();
    if (!(params.splat_sigma_px > 0.0) || !(params.splat_radius_px > 0.0) || !(params.min_weight >= 0.0))
        throw std::invalid_argument("RangeImageParams: sigma and radius must be positive");
    double ppc = cam.pixels_per_cm(1.0);
    if (!cloud.empty()) {
        std::vector<double> z;
        z.reserve(cloud.size());
        for (const auto& p : cloud.points) z.push_back(p.z());
        std::nth_element(z.begin(), z.begin() + z.size() / 2, z.end());
        ppc = cam.pixels_per_cm(z[z.size() / 2]);
    }
    RangeImage img(cam, ppc);
    const std::size_t n = img.depth.size();
    std::vector<double> wsum(n, 0.0), zsum(n, 0.0);
    const double inv2s2 = 1.0 / (2.0 * params.splat_sigma_px * params.splat_sigma_px);
    const double r = params.splat_radius_px;
    const auto pixels = project_pixels(cloud, cam);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const Vec2& px = pixels[i];
        const int u0 = static_cast<int>(std::ceil(px.x() - r)), u1 = static_cast<int>(std::floor(px.x() + r));
        const int v0 = static_cast<int>(std::ceil(px.y() - r)), v1 = static_cast<int>(std::floor(px.y() + r));
        for (int v = std::max(0, v0); v <= std::min(img.height - 1, v1); ++v) {
            for (int u = std::max(0, u0); u <= std::min(img.width - 1, u1); ++u) {
                const double d2 = (u - px.x()) * (u - px.x()) + (v - px.y()) * (v - px.y());
                if (d2 > r * r) continue;
                const double w = std::exp(-d2 * inv2s2);
                const std::size_t k = static_cast<std::size_t>(v) * img.width + u;
                wsum[k] += w;
                zsum[k] += w * cloud[i].z();
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (wsum[k] > params.min_weight && zsum[k] > 0.0) img.depth[k] = zsum[k] / wsum[k];
    return img;
}

std::vector<double> interest_map(const RangeImage& img, const KeypointParams& params) {
    if (!(params.support_radius > 0.0)) throw std::invalid_argument("KeypointParams: support_radius must be > 0");
    const Gradient g = depth_gradient(img);
    const std::size_t n = g.gx.size();
    std::vector<double> xx(n), xy(n), yy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = g.gx[i] * g.gx[i];
        xy[i] = g.gx[i] * g.gy[i];
        yy[i] = g.gy[i] * g.gy[i];
    }
    const double r = params.support_radius * img.px_per_cm;
    const auto sxx = disk_sum(xx, img.width, img.height, r, img);
    const auto sxy = disk_sum(xy, img.width, img.height, r, img);
    const auto syy = disk_sum(yy, img.width, img.height, r, img);
    // Normalize by the disk area so interest is independent of resolution.
    const double area = std::numbers::pi * r * r;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sxx[i] / area, b = sxy[i] / area, c = syy[i] / area;
        const double mean = 0.5 * (a + c);
        const double dev = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        const double lmin = std::max(0.0, mean - dev), lmax = mean + dev;
        out[i] = lmin + params.edge_weight * lmax;
    }
    return out;
}

std::vector<Keypoint> surface_change_keypoints(const RangeImage& img, const KeypointParams& params) {
    const auto interest = interest_map(img, params);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < interest.size(); ++i)
        if (interest[i] > params.min_interest) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return interest[a] > interest[b]; });
    const double r = params.support_radius * img.px_per_cm;
    std::vector<Keypoint> kept;
    for (std::size_t i : order) {
        if (kept.size() >= params.top_m) break;
        const int u = static_cast<int>(i % img.width), v = static_cast<int>(i / img.width);
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Keypoint& k) {
            const double du = k.u - u, dv = k.v - v;
            return du * du + dv * dv <= r * r;
        });
        if (!suppressed) kept.push_back({u, v, interest[i]});
    }
    return kept;
}

std::vector<Keypoint> surface_change_keypoints(const RangeImage& img, double support_radius, std::size_t top_m) {
    KeypointParams p;
    p.support_radius = support_radius;
    p.top_m = top_m;
    return surface_change_keypoints(img, p);
}

std::vector<double> radial_descriptor(const RangeImage& img, const Vec2& kp, std::size_t n_beams, double radius) {
    if (n_beams == 0 || n_beams % 4 != 0) throw std::invalid_argument("radial_descriptor: n_beams must be 4k, k >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("radial_descriptor: radius must be > 0");
    const double r_px = radius * img.px_per_cm;
    const int steps = static_cast<int>(std::floor(r_px));
    std::vector<double> out(n_beams, 0.0);
    for (std::size_t d = 0; d < n_beams; ++d) {
        const double a = kTwoPi * static_cast<double>(d) / static_cast<double>(n_beams);
        const Vec2 dir(std::cos(a), std::sin(a));
        double acc = 0.0;
        int pairs = 0;
        double prev = 0.0;
        bool have_prev = false;
        for (int s = 0; s <= steps; ++s) {
            double z = 0.0;
            const bool ok = sample_depth(img, kp + static_cast<double>(s) * dir, z);
            if (ok && have_prev) {
                acc += std::abs(z - prev) * img.px_per_cm;
                ++pairs;
            }
            have_prev = ok;
            prev = z;
        }
        out[d] = pairs > 0 ? acc / pairs : 0.0;
    }
    return out;
}

void NarfParams::validate() const {
    if (n_beams == 0 || n_beams % 4 != 0) throw std::invalid_argument("NarfParams: n_beams must be 4k, k >= 1");
    if (!(descriptor_radius > 0.0)) throw std::invalid_argument("NarfParams: descriptor_radius must be > 0");
    if (!(max_side_ratio >= 1.0)) throw std::invalid_argument("NarfParams: max_side_ratio must be >= 1");
    if (!(keypoints.support_radius > 0.0)) throw std::invalid_argument("NarfParams: support_radius must be > 0");
}

BeamPair choose_beams(const std::vector<double>& descriptor) {
    const std::size_t n = descriptor.size();
    if (n == 0 || n % 4 != 0) throw std::invalid_argument("choose_beams: descriptor size must be 4k, k >= 1");
    BeamPair p;
    p.first = static_cast<std::size_t>(std::max_element(descriptor.begin(), descriptor.end()) - descriptor.begin());
    const std::size_t plus = (p.first + n / 4) % n;
    const std::size_t minus = (p.first + n - n / 4) % n;
    p.second = descriptor[minus] > descriptor[plus] ? minus : plus;
    return p;
}

RotatedRect rect_from_beams(const Vec2& kp, const std::vector<double>& descriptor, const BeamPair& pair, double area,
                            const NarfParams& params) {
    const std::size_t n = descriptor.size();
    double ratio = 1.0;
    if (!params.equal_sides) {
        const double d1 = descriptor[pair.first], d2 = descriptor[pair.second];
        ratio = d2 > 0.0 ? d1 / d2 : params.max_side_ratio;
        ratio = std::clamp(ratio, 1.0 / params.max_side_ratio, params.max_side_ratio);
    }
    const double len1 = std::sqrt(area * ratio);
    const double len2 = area / len1;
    const double a1 = kTwoPi * static_cast<double>(pair.first) / static_cast<double>(n);
    const double a2 = kTwoPi * static_cast<double>(pair.second) / static_cast<double>(n);
    const Vec2 e1(std::cos(a1), std::sin(a1)), e2(std::cos(a2), std::sin(a2));
    const Vec2 c = kp + 0.5 * (len1 * e1 + len2 * e2);
    return RotatedRect(c.x(), c.y(), len1, len2, a1);
}

std::vector<RegionProposal> narf_variant_proposals(const RangeImage& img, const RotatedRect& bbox,
                                                   const NarfParams& params) {
    params.validate();
    auto kps = surface_change_keypoints(img, params.keypoints);
    std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        return a.v != b.v ? a.v < b.v : a.u < b.u;
    });
    const double area = 0.5 * bbox.area();
    std::vector<RegionProposal> out;
    for (const Keypoint& k : kps) {
        const Vec2 kp(k.u, k.v);
        const auto desc = radial_descriptor(img, kp, params.n_beams, params.descriptor_radius);
        if (std::all_of(desc.begin(), desc.end(), [](double x) { return x == 0.0; })) continue;
        const BeamPair pair = choose_beams(desc);
        out.push_back({rect_from_beams(kp, desc, pair, area, params), desc[pair.first] + desc[pair.second]});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RegionProposal& a, const RegionProposal& b) { return a.confidence > b.confidence; });
    return out;
}

}  // namespace pretouch
