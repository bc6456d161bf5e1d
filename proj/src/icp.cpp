#include "pretouch/icp.hpp"

#include "pretouch/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pretouch {

void IcpParams::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("IcpParams: max_iterations must be >= 1");
    if (!(transform_epsilon > 0.0)) throw std::invalid_argument("IcpParams: transform_epsilon must be > 0");
    if (!(max_corr_dist > 0.0)) throw std::invalid_argument("IcpParams: max_corr_dist must be > 0");
    if (!(outlier_lambda > 0.0)) throw std::invalid_argument("IcpParams: outlier_lambda must be > 0");
    if (!(min_inlier_fraction > 0.0) || min_inlier_fraction > 1.0)
        throw std::invalid_argument("IcpParams: min_inlier_fraction must be in (0, 1]");
}

RigidTransform estimate_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
    if (src.size() != dst.size()) throw std::invalid_argument("estimate_rigid: point lists differ in length");
    if (src.size() < 3) throw std::invalid_argument("estimate_rigid: need at least three pairs");
    const double n = static_cast<double>(src.size());
    Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs /= n;
    cd /= n;

    Mat3 cross_cov = Mat3::Zero();
    Mat3 scatter = Mat3::Zero();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vec3 a = src[i] - cs;
        cross_cov += a * (dst[i] - cd).transpose();
        scatter += a * a.transpose();
    }
    // The source must span at least a plane for the rotation to be defined.
    const Eigen::JacobiSVD<Mat3> spread(scatter);
    const Vec3 sv = spread.singularValues();
    if (!(sv[0] > 0.0) || sv[1] <= 1e-12 * sv[0])
        throw DegenerateConfiguration("estimate_rigid: source points are coincident or collinear");

    const Eigen::JacobiSVD<Mat3> svd(cross_cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3& u = svd.matrixU();
    const Mat3& v = svd.matrixV();
    Mat3 fix = Mat3::Identity();
    if ((v * u.transpose()).determinant() < 0.0) fix(2, 2) = -1.0;  // reflection -> nearest rotation
    const Mat3 r = v * fix * u.transpose();
    return {r, cd - r * cs};
}

FractionalSelection select_fractional_inliers(std::span<const double> sorted_residuals, std::size_t total,
                                              double lambda, double min_fraction) {
    const std::size_t m = sorted_residuals.size();
    FractionalSelection best{0, std::numeric_limits<double>::infinity(), 0.0};
    if (m == 0 || total == 0) return best;
    const auto min_count = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::ceil(min_fraction * static_cast<double>(total) - 1e-9)));
    const std::size_t start = std::min(min_count, m);
    double sum_sq = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        sum_sq += sorted_residuals[k - 1] * sorted_residuals[k - 1];
        if (k < start) continue;
        const double rmsd = std::sqrt(sum_sq / static_cast<double>(k));
        const double frac = static_cast<double>(k) / static_cast<double>(total);
        const double frmsd = rmsd / std::pow(frac, lambda);
        if (frmsd <= best.frmsd) best = {k, frmsd, rmsd};
    }
    return best;
}

namespace {

struct Match {
    double dist;
    std::size_t src;
    std::size_t dst;
};

// Gated nearest-neighbor matches at transform t, sorted by (distance, source
// index) so the inlier prefix is deterministic.
std::vector<Match> match(const PointCloud& source, const KdTree& tree, const RigidTransform& t, double gate) {
    std::vector<Match> out;
    out.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const Neighbor nn = tree.nearest(t.apply(source[i]));
        if (nn.distance <= gate) out.push_back({nn.distance, i, nn.index});
    }
    std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.src < b.src);
    });
    return out;
}

FractionalSelection select(const std::vector<Match>& matches, std::size_t total, const IcpParams& p) {
    std::vector<double> dists(matches.size());
    for (std::size_t i = 0; i < matches.size(); ++i) dists[i] = matches[i].dist;
    return select_fractional_inliers(dists, total, p.outlier_lambda, p.min_inlier_fraction);
}

}  // namespace

IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params,
                    const RigidTransform& initial) {
    params.validate();
    if (source.empty() || target.empty()) throw std::invalid_argument("icp_align: empty cloud");
    const KdTree tree(target);
    const std::size_t n = source.size();

    IcpResult result;
    RigidTransform current = initial;
    std::vector<Vec3> src_in, dst_in;

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        const auto matches = match(source, tree, current, params.max_corr_dist);
        if (matches.size() < 3) {
            if (iter == 0) {
                result.status = IcpStatus::no_correspondences;
                result.transform = initial;
                result.fitness = std::numeric_limits<double>::infinity();
                result.iterations = 0;
                return result;
            }
            result.status = IcpStatus::degenerate;
            break;
        }
        const FractionalSelection sel = select(matches, n, params);
        result.frmsd_history.push_back(sel.frmsd);

        src_in.clear();
        dst_in.clear();
        for (std::size_t k = 0; k < sel.count; ++k) {
            src_in.push_back(current.apply(source[matches[k].src]));
            dst_in.push_back(target[matches[k].dst]);
        }
        RigidTransform step;
        try {
            step = estimate_rigid(src_in, dst_in);
        } catch (const DegenerateConfiguration&) {
            result.status = IcpStatus::degenerate;
            if (iter == 0) {
                result.transform = initial;
                result.fitness = std::numeric_limits<double>::infinity();
                return result;
            }
            break;
        }
        const RigidTransform next = step * current;
        const double change = (next.matrix() - current.matrix()).squaredNorm();
        current = next;
        result.iterations = iter + 1;
        if (change < params.transform_epsilon) {
            result.status = IcpStatus::converged;
            break;
        }
    }

    result.transform = current;
    result.converged = result.status == IcpStatus::converged;
    const auto final_matches = match(source, tree, current, params.max_corr_dist);
    if (final_matches.empty()) {
        result.fitness = std::numeric_limits<double>::infinity();
        result.inlier_fraction = 0.0;
        return result;
    }
    const FractionalSelection sel = select(final_matches, n, params);
    result.frmsd_history.push_back(sel.frmsd);
    result.fitness = sel.rmsd;
    result.inlier_fraction = static_cast<double>(sel.count) / static_cast<double>(n);
    return result;
}

}  // namespace pretouch
