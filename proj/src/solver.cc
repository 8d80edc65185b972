#include "tripose/solver.h"

#include "tripose/beta_solver.h"
#include "tripose/constraints.h"

namespace tripose {

EstimationResult solve_relative_pose(const CorrespondenceSet& set, const CameraPose& pose2,
                                     const Intrinsics& intrinsics) {
    const ConstraintSystem system = assemble(line_triplets(set), set.points, pose2);
    const std::vector<PoseCandidate> candidates = all_candidates(system);
    const Selection sel = select(candidates, set, pose2, intrinsics);

    EstimationResult result;
    result.pose = sel.pose;
    result.scored = sel.scored;
    result.candidate_count = static_cast<int>(candidates.size());
    result.prescreen_fallback = sel.prescreen_fallback;
    result.skipped_lines = system.skipped_lines;
    return result;
}

}  // namespace tripose
