#include "tripose/pose_select.h"

#include <cmath>

namespace tripose {

namespace {

constexpr double kSentinelErrorPx = 1e6;

Mat34 identity_camera() {
    Mat34 P = Mat34::Zero();
    P.leftCols<3>().setIdentity();
    return P;
}

// Perpendicular pixel distances from the observed view-3 segment endpoints
// to the candidate's projected line.
std::array<double, 2> line_endpoint_errors(const CameraPose& pose, const Line3& line,
                                           const LineObservation& obs,
                                           const Intrinsics& intrinsics) {
    const HomLine2 projected = project_line(pose.matrix(), line);
    const HomLine2 in_pixels = intrinsics.line_to_pixel(projected);
    const Segment2& seg3 = obs.segments[2];
    return {in_pixels.distance_to(seg3.p), in_pixels.distance_to(seg3.q)};
}

}  // namespace

std::size_t TriangulatedFeatures::usable() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.has_value();
    for (const auto& l : lines) n += l.has_value();
    return n;
}

TriangulatedFeatures triangulate_features(const CorrespondenceSet& set,
                                          const CameraPose& pose2) {
    const Mat34 P1 = identity_camera();
    const Mat34 P2 = pose2.matrix();

    TriangulatedFeatures tri;
    tri.points.reserve(set.points.size());
    for (const auto& p : set.points) {
        try {
            tri.points.emplace_back(triangulate_point(P1, P2, p.x1, p.x2));
        } catch (const TriangulationDegenerate&) {
            tri.points.emplace_back(std::nullopt);
        }
    }
    tri.lines.reserve(set.lines.size());
    for (const auto& l : set.lines) {
        try {
            tri.lines.emplace_back(triangulate_line(P1, P2, l.triplet.l1, l.triplet.l2));
        } catch (const TriangulationDegenerate&) {
            tri.lines.emplace_back(std::nullopt);
        }
    }
    return tri;
}

ScoredPose score(const PoseCandidate& candidate, const TriangulatedFeatures& tri,
                 const CorrespondenceSet& set, const Intrinsics& intrinsics) {
    if (tri.usable() == 0)
        throw ScoreUnavailable("no feature could be reconstructed from views 1-2");

    ScoredPose out;
    out.pose = candidate.pose;

    double point_sq = 0.0;
    std::size_t point_terms = 0;
    std::size_t positive_depth = 0;
    std::size_t depth_total = 0;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        if (!tri.points[i]) continue;
        const Vec3 in_view3 = candidate.pose.apply(*tri.points[i]);
        ++depth_total;
        if (in_view3[2] > 0.0) ++positive_depth;
        double err = kSentinelErrorPx;
        try {
            const Vec2 reprojected = intrinsics.to_pixel(HomPoint2(in_view3));
            const Vec2 observed = intrinsics.to_pixel(set.points[i].x3);
            err = (reprojected - observed).norm();
        } catch (const DegenerateConfiguration&) {
            // point on the candidate's principal plane
        }
        point_sq += err * err;
        ++point_terms;
    }

    double line_sq = 0.0;
    std::size_t line_terms = 0;
    for (std::size_t i = 0; i < set.lines.size(); ++i) {
        if (!tri.lines[i]) continue;
        double e1 = kSentinelErrorPx, e2 = kSentinelErrorPx;
        try {
            const auto errs = line_endpoint_errors(candidate.pose, *tri.lines[i],
                                                   set.lines[i], intrinsics);
            e1 = errs[0];
            e2 = errs[1];
        } catch (const TriangulationDegenerate&) {
        } catch (const DegenerateConfiguration&) {
        }
        line_sq += e1 * e1 + e2 * e2;
        line_terms += 2;
    }

    out.has_points = point_terms > 0;
    out.has_lines = line_terms > 0;
    if (out.has_points) out.point_rms = std::sqrt(point_sq / static_cast<double>(point_terms));
    if (out.has_lines) out.line_rms = std::sqrt(line_sq / static_cast<double>(line_terms));
    const std::size_t all_terms = point_terms + line_terms;
    out.combined = std::sqrt((point_sq + line_sq) / static_cast<double>(all_terms));
    out.positive_depth_fraction =
        depth_total > 0 ? static_cast<double>(positive_depth) / static_cast<double>(depth_total)
                        : 1.0;
    return out;
}

std::vector<double> feature_errors(const CameraPose& pose, const TriangulatedFeatures& tri,
                                   const CorrespondenceSet& set,
                                   const Intrinsics& intrinsics) {
    std::vector<double> errors;
    errors.reserve(set.points.size() + set.lines.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        double err = kSentinelErrorPx;
        if (tri.points[i]) {
            const Vec3 in_view3 = pose.apply(*tri.points[i]);
            try {
                const Vec2 reprojected = intrinsics.to_pixel(HomPoint2(in_view3));
                const Vec2 observed = intrinsics.to_pixel(set.points[i].x3);
                err = (reprojected - observed).norm();
                if (in_view3[2] <= 0.0) err = kSentinelErrorPx;  // behind the camera
            } catch (const DegenerateConfiguration&) {
            }
        }
        errors.push_back(err);
    }
    for (std::size_t i = 0; i < set.lines.size(); ++i) {
        double err = kSentinelErrorPx;
        if (tri.lines[i]) {
            try {
                const auto errs =
                    line_endpoint_errors(pose, *tri.lines[i], set.lines[i], intrinsics);
                err = std::max(errs[0], errs[1]);
            } catch (const TriangulationDegenerate&) {
            } catch (const DegenerateConfiguration&) {
            }
        }
        errors.push_back(err);
    }
    return errors;
}

Selection select(const std::vector<PoseCandidate>& candidates,
                 const CorrespondenceSet& set, const CameraPose& pose2,
                 const Intrinsics& intrinsics) {
    if (candidates.empty()) throw NoValidPose("candidate list is empty");

    const TriangulatedFeatures tri = triangulate_features(set, pose2);

    std::vector<ScoredPose> scored;
    scored.reserve(candidates.size());
    for (const auto& cand : candidates) scored.push_back(score(cand, tri, set, intrinsics));

    // Order-independent comparison: combined error, then pose entries.
    auto better = [](const ScoredPose& a, const ScoredPose& b) {
        if (a.combined != b.combined) return a.combined < b.combined;
        for (int i = 0; i < 9; ++i) {
            const double ea = a.pose.R.data()[i], eb = b.pose.R.data()[i];
            if (ea != eb) return ea < eb;
        }
        for (int i = 0; i < 3; ++i)
            if (a.pose.t[i] != b.pose.t[i]) return a.pose.t[i] < b.pose.t[i];
        return false;
    };

    const bool prescreen_applies = !set.points.empty();
    const ScoredPose* best = nullptr;
    for (const auto& s : scored) {
        if (prescreen_applies && s.positive_depth_fraction <= 0.5) continue;
        if (!best || better(s, *best)) best = &s;
    }

    Selection sel;
    if (!best) {
        sel.prescreen_fallback = true;
        for (const auto& s : scored)
            if (!best || better(s, *best)) best = &s;
    }
    sel.pose = best->pose;
    sel.scored = *best;
    return sel;
}

}  // namespace tripose
