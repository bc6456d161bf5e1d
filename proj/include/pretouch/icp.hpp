#pragma once

#include "pretouch/kdtree.hpp"
#include "pretouch/pointcloud.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pretouch {

struct IcpParams {
    int max_iterations = 50;
    /// Convergence when the sum of squared differences between successive
    /// 4x4 transform matrices drops below this.
    double transform_epsilon = 1e-6;
    /// Correspondences farther than this (cm) are never considered.
    double max_corr_dist = 5.0;
    /// Exponent of the inlier fraction in the fractional RMSD objective.
    double outlier_lambda = 3.0;
    /// Lower bound on the inlier fraction searched each iteration.
    double min_inlier_fraction = 0.05;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

enum class IcpStatus {
    converged,           // transform change fell below transform_epsilon
    max_iterations,      // iteration budget exhausted
    no_correspondences,  // fewer than three gated matches at the first iteration
    degenerate,          // inliers no longer determine a rigid fit
};

struct IcpResult {
    RigidTransform transform;  // source frame -> target frame
    bool converged = false;
    IcpStatus status = IcpStatus::max_iterations;
    int iterations = 0;
    double fitness = 0.0;          // RMS inlier residual at the final transform, cm
    double inlier_fraction = 0.0;  // of source points; 0 only for failed runs
    /// Fractional RMSD at the start of every iteration, plus one entry for
    /// the final transform.
    std::vector<double> frmsd_history;

    /// True when no rigid fit was ever computed; `transform` is then the
    /// initial guess.
    bool failed() const { return iterations == 0; }
};

/// Least-squares rigid motion taking src[i] onto dst[i] (Kabsch, no scale,
/// det R = +1). Throws std::invalid_argument for mismatched or too-short
/// inputs and DegenerateConfiguration for coincident or collinear sources.
RigidTransform estimate_rigid(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Inlier selection for one iteration. `sorted_residuals` ascending, `total`
/// the source size the fraction is measured against. Returns the count k that
/// minimizes RMSD(first k) / (k / total)^lambda; exact ties keep the larger k.
struct FractionalSelection {
    std::size_t count = 0;
    double frmsd = 0.0;
    double rmsd = 0.0;
};
FractionalSelection select_fractional_inliers(std::span<const double> sorted_residuals, std::size_t total,
                                              double lambda, double min_fraction);

/// Point-to-point ICP with fractional-RMSD outlier trimming, starting from
/// `initial` (identity by default). Throws std::invalid_argument for empty
/// clouds or invalid params.
IcpResult icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params,
                    const RigidTransform& initial = RigidTransform::identity());

}  // namespace pretouch
