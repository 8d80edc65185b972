#ifndef TRIPOSE_RANSAC_H_
#define TRIPOSE_RANSAC_H_

#include <cstdint>
#include <vector>

#include "tripose/correspondences.h"
#include "tripose/solver.h"

namespace tripose {

struct RansacConfig {
    int sample_lines = 3;
    int sample_points = 3;
    int max_iterations = 1000;
    double inlier_threshold_px = 2.0;
    double confidence = 0.99;
    std::uint64_t seed = 0;
    int threads = 1;  // 1: serial reference path; 0: OpenMP default
};

struct RansacResult {
    CameraPose pose;
    std::vector<bool> inlier_mask;  // points first, then lines
    int iterations_run = 0;
    double best_score = 0.0;  // final inlier count
};

// Hypothesize-and-test estimation: seeded minimal samples, full solve per
// sample, third-view reprojection classification, adaptive iteration count,
// and a final linear refit on the best consensus set. Results are identical
// for any thread count. Throws RobustFailure when no iteration yields a
// valid pose.
RansacResult estimate_ransac(const CorrespondenceSet& set, const CameraPose& pose2,
                             const Intrinsics& intrinsics, const RansacConfig& config);

}  // namespace tripose

#endif  // TRIPOSE_RANSAC_H_
