#ifndef TRIPOSE_POSE_SELECT_H_
#define TRIPOSE_POSE_SELECT_H_

#include <optional>
#include <vector>

#include "tripose/beta_solver.h"
#include "tripose/correspondences.h"
#include "tripose/geometry.h"

namespace tripose {

// Features reconstructed from the two known views; independent of the
// candidate under evaluation, so computed once per selection run.
struct TriangulatedFeatures {
    std::vector<std::optional<Vec3>> points;  // nullopt: degenerate pair
    std::vector<std::optional<Line3>> lines;
    std::size_t usable() const;
};

TriangulatedFeatures triangulate_features(const CorrespondenceSet& set,
                                          const CameraPose& pose2);

struct ScoredPose {
    CameraPose pose;
    double point_rms = 0.0;  // pixels; 0 when no points scored
    double line_rms = 0.0;   // pixels; 0 when no lines scored
    double combined = 0.0;   // RMS over all pooled per-coordinate errors
    double positive_depth_fraction = 1.0;
    bool has_points = false;
    bool has_lines = false;
};

// Reprojection error of one candidate in the third view, in pixels, plus the
// fraction of reconstructed points with positive depth there. Throws
// ScoreUnavailable when every feature is degenerate.
ScoredPose score(const PoseCandidate& candidate, const TriangulatedFeatures& tri,
                 const CorrespondenceSet& set, const Intrinsics& intrinsics);

// Per-feature third-view errors (points first, then lines), used for inlier
// classification. Degenerate features report a large sentinel error.
std::vector<double> feature_errors(const CameraPose& pose, const TriangulatedFeatures& tri,
                                   const CorrespondenceSet& set,
                                   const Intrinsics& intrinsics);

struct Selection {
    CameraPose pose;
    ScoredPose scored;
    bool prescreen_fallback = false;  // everyone failed the depth prescreen
};

// Discards candidates whose reconstructed points are mostly behind the third
// camera, then picks the lowest combined reprojection error. Falls back to
// the full list when the prescreen eliminates every candidate.
Selection select(const std::vector<PoseCandidate>& candidates,
                 const CorrespondenceSet& set, const CameraPose& pose2,
                 const Intrinsics& intrinsics);

}  // namespace tripose

#endif  // TRIPOSE_POSE_SELECT_H_
