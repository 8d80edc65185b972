#ifndef TRIPOSE_CORRESPONDENCES_H_
#define TRIPOSE_CORRESPONDENCES_H_

#include <array>
#include <vector>

#include "tripose/geometry.h"

namespace tripose {

// A point observed in all three views, in calibrated coordinates.
struct PointTriplet {
    HomPoint2 x1;
    HomPoint2 x2;
    HomPoint2 x3;
};

// A line observed in all three views, in calibrated coordinates.
struct LineTriplet {
    HomLine2 l1;
    HomLine2 l2;
    HomLine2 l3;
};

// Line triplet together with the measured segments (pixels) that produced
// it; the view-3 endpoints are what line reprojection errors are scored
// against.
struct LineObservation {
    LineTriplet triplet;
    std::array<Segment2, 3> segments;
};

// All correspondences shared by the three views.
struct CorrespondenceSet {
    std::vector<PointTriplet> points;
    std::vector<LineObservation> lines;

    std::size_t feature_count() const { return points.size() + lines.size(); }
    std::size_t row_count() const { return 4 * points.size() + 2 * lines.size(); }
};

inline std::vector<LineTriplet> line_triplets(const CorrespondenceSet& set) {
    std::vector<LineTriplet> out;
    out.reserve(set.lines.size());
    for (const auto& l : set.lines) out.push_back(l.triplet);
    return out;
}

// Builds a calibrated line observation from pixel-space segments.
inline LineObservation make_line_observation(const std::array<Segment2, 3>& segments,
                                             const Intrinsics& K) {
    return LineObservation{
        LineTriplet{K.calibrate(segments[0].line()), K.calibrate(segments[1].line()),
                    K.calibrate(segments[2].line())},
        segments};
}

// Builds a calibrated point triplet from pixel coordinates.
inline PointTriplet make_point_triplet(const Vec2& px1, const Vec2& px2, const Vec2& px3,
                                       const Intrinsics& K) {
    return PointTriplet{K.calibrate(HomPoint2(px1[0], px1[1])),
                        K.calibrate(HomPoint2(px2[0], px2[1])),
                        K.calibrate(HomPoint2(px3[0], px3[1]))};
}

}  // namespace tripose

#endif  // TRIPOSE_CORRESPONDENCES_H_
