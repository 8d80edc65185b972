#include "tripose/ransac.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "tripose/parallel.h"
#include "tripose/rng.h"

namespace tripose {

namespace {

// Iterations are evaluated in fixed-size chunks so the adaptive stopping
// rule is independent of the thread count.
constexpr int kChunk = 32;

struct Hypothesis {
    CameraPose pose;
    std::size_t inlier_count = 0;
    double inlier_rms = 0.0;
    int iteration = 0;
    bool valid = false;
};

bool better(const Hypothesis& a, const Hypothesis& b) {
    if (!a.valid || !b.valid) return a.valid;
    if (a.inlier_count != b.inlier_count) return a.inlier_count > b.inlier_count;
    if (a.inlier_rms != b.inlier_rms) return a.inlier_rms < b.inlier_rms;
    return a.iteration < b.iteration;
}

CorrespondenceSet subset(const CorrespondenceSet& set, const std::vector<std::size_t>& point_idx,
                         const std::vector<std::size_t>& line_idx) {
    CorrespondenceSet out;
    out.points.reserve(point_idx.size());
    out.lines.reserve(line_idx.size());
    for (std::size_t i : point_idx) out.points.push_back(set.points[i]);
    for (std::size_t i : line_idx) out.lines.push_back(set.lines[i]);
    return out;
}

int adaptive_iterations(double inlier_ratio, int sample_size, double confidence,
                        int max_iterations) {
    if (inlier_ratio <= 0.0) return max_iterations;
    const double w = std::min(inlier_ratio, 1.0 - 1e-12);
    const double p_sample = std::pow(w, sample_size);
    if (p_sample >= 1.0 - 1e-12) return 1;
    const double n = std::log(1.0 - confidence) / std::log(1.0 - p_sample);
    if (!std::isfinite(n) || n >= static_cast<double>(max_iterations)) return max_iterations;
    return std::max(1, static_cast<int>(std::ceil(n)));
}

}  // namespace

RansacResult estimate_ransac(const CorrespondenceSet& set, const CameraPose& pose2,
                             const Intrinsics& intrinsics, const RansacConfig& config) {
    const std::size_t n_points = set.points.size();
    const std::size_t n_lines = set.lines.size();
    if (config.sample_points < 0 || config.sample_lines < 0 ||
        4 * config.sample_points + 2 * config.sample_lines < 8)
        throw RobustFailure("minimal sample must yield at least 8 constraint rows");
    if (n_points < static_cast<std::size_t>(config.sample_points) ||
        n_lines < static_cast<std::size_t>(config.sample_lines))
        throw RobustFailure("fewer features than the minimal sample size");
    if (config.inlier_threshold_px <= 0.0)
        throw RobustFailure("inlier threshold must be positive");

    // Candidate-independent reconstructions, shared by every iteration.
    const TriangulatedFeatures tri = triangulate_features(set, pose2);

    const int sample_size = config.sample_points + config.sample_lines;
    const double threshold = config.inlier_threshold_px;
    const std::size_t n_features = n_points + n_lines;

    Hypothesis best;
    int iterations_run = 0;
    int target = config.max_iterations;

    while (iterations_run < target) {
        const int chunk = std::min(kChunk, target - iterations_run);
        std::vector<Hypothesis> results(static_cast<std::size_t>(chunk));

        parallel_for(static_cast<std::size_t>(chunk), config.threads, [&](std::size_t c) {
            const int iteration = iterations_run + static_cast<int>(c);
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(iteration)));
            Hypothesis& hyp = results[c];
            hyp.iteration = iteration;
            try {
                const auto pts = rng.sample_without_replacement(
                    n_points, static_cast<std::size_t>(config.sample_points));
                const auto lns = rng.sample_without_replacement(
                    n_lines, static_cast<std::size_t>(config.sample_lines));
                const EstimationResult est =
                    solve_relative_pose(subset(set, pts, lns), pose2, intrinsics);

                const std::vector<double> errors =
                    feature_errors(est.pose, tri, set, intrinsics);
                double sq = 0.0;
                std::size_t inliers = 0;
                for (double e : errors) {
                    if (e <= threshold) {
                        ++inliers;
                        sq += e * e;
                    }
                }
                hyp.pose = est.pose;
                hyp.inlier_count = inliers;
                hyp.inlier_rms = inliers > 0 ? std::sqrt(sq / static_cast<double>(inliers)) : 0.0;
                hyp.valid = true;
            } catch (const Error&) {
                hyp.valid = false;
            }
        });

        for (const auto& h : results)
            if (better(h, best)) best = h;
        iterations_run += chunk;

        if (best.valid) {
            const double ratio =
                static_cast<double>(best.inlier_count) / static_cast<double>(n_features);
            target = std::min(target,
                              std::max(iterations_run,
                                       adaptive_iterations(ratio, sample_size,
                                                           config.confidence,
                                                           config.max_iterations)));
        }
    }

    if (!best.valid) throw RobustFailure("no RANSAC iteration produced a valid pose");

    struct Classification {
        std::vector<bool> mask;
        std::vector<std::size_t> point_idx, line_idx;
        std::size_t count = 0;
        double rms = 0.0;
    };
    auto classify = [&](const CameraPose& pose) {
        Classification c;
        const std::vector<double> errors = feature_errors(pose, tri, set, intrinsics);
        c.mask.resize(n_features);
        double sq = 0.0;
        for (std::size_t i = 0; i < n_features; ++i) {
            c.mask[i] = errors[i] <= threshold;
            if (!c.mask[i]) continue;
            ++c.count;
            sq += errors[i] * errors[i];
            if (i < n_points) c.point_idx.push_back(i);
            else c.line_idx.push_back(i - n_points);
        }
        c.rms = c.count > 0 ? std::sqrt(sq / static_cast<double>(c.count)) : 0.0;
        return c;
    };

    // Refit the linear solve on the consensus set, iterating classify/refit
    // while the consensus keeps growing; a round that shrinks it is
    // rejected, so one bad refit cannot cascade.
    CameraPose final_pose = best.pose;
    Classification current = classify(final_pose);
    for (int round = 0; round < 4; ++round) {
        if (current.count == 0) break;
        CameraPose refit_pose = final_pose;
        try {
            refit_pose =
                solve_relative_pose(subset(set, current.point_idx, current.line_idx),
                                    pose2, intrinsics)
                    .pose;
        } catch (const Error&) {
            break;
        }
        Classification next = classify(refit_pose);
        if (next.count < current.count ||
            (next.count == current.count && next.rms >= current.rms))
            break;
        const bool converged = next.mask == current.mask;
        final_pose = refit_pose;
        current = std::move(next);
        if (converged) break;
    }

    RansacResult result;
    result.pose = final_pose;
    result.iterations_run = iterations_run;
    result.inlier_mask = current.mask;
    result.best_score = static_cast<double>(current.count);
    return result;
}

}  // namespace tripose
