#ifndef TRIPOSE_SOLVER_H_
#define TRIPOSE_SOLVER_H_

#include "tripose/correspondences.h"
#include "tripose/pose_select.h"

namespace tripose {

struct EstimationResult {
    CameraPose pose;
    ScoredPose scored;
    int candidate_count = 0;
    bool prescreen_fallback = false;
    std::vector<int> skipped_lines;
};

// Full pipeline: constraint assembly, null-space candidates, translation,
// reprojection-based selection. pose2 is the known second view relative to
// the first; intrinsics belong to the third view.
EstimationResult solve_relative_pose(const CorrespondenceSet& set, const CameraPose& pose2,
                                     const Intrinsics& intrinsics);

}  // namespace tripose

#endif  // TRIPOSE_SOLVER_H_
