#ifndef TRIPOSE_CONSTRAINTS_H_
#define TRIPOSE_CONSTRAINTS_H_

#include <array>
#include <vector>

#include "tripose/correspondences.h"
#include "tripose/geometry.h"

namespace tripose {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using RowVec12 = Eigen::Matrix<double, 1, 12>;
using MatX12 = Eigen::Matrix<double, Eigen::Dynamic, 12>;

// Stacking order of the unknown vector: v = [r1; r2; r3; t] with r_i the
// columns of the third-view rotation.
inline Vec12 stack_pose(const Mat3& R, const Vec3& t) {
    Vec12 v;
    v.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R.data());
    v.tail<3>() = t;
    return v;
}

struct RowTag {
    enum class Source { kPoint, kLine };
    Source source;
    int feature_index;  // index into the input list of its class
    int row_index;      // 0..3 for points, 0..1 for lines
};

// The stacked n x 12 homogeneous system C v = 0.
struct ConstraintSystem {
    MatX12 C;
    std::vector<RowTag> row_tags;
    std::vector<int> skipped_lines;  // degenerate line triplets left out

    Eigen::Index rows() const { return C.rows(); }
};

// Two unit-norm constraint rows from one line triplet: the bottom rows of
// the symbolic third column of the stacked back-projected-plane matrix after
// two Householder reflections computed from its known columns. Throws
// DegenerateLine when the first two planes coincide.
std::array<RowVec12, 2> line_rows(const LineTriplet& triplet, const CameraPose& pose2);

// Four unit-norm constraint rows from one point triplet: the trilinearities
// expanded over the entries of the third camera matrix in Hartley-normalized
// coordinates, then mapped back onto v.
std::array<RowVec12, 4> point_rows(const PointTriplet& triplet, const CameraPose& pose2,
                                   const NormalizingTransform& norms);

// Stacks all rows in input order (lines first), skipping degenerate line
// triplets. Throws InsufficientConstraints when fewer than 8 usable rows
// remain.
ConstraintSystem assemble(const std::vector<LineTriplet>& lines,
                          const std::vector<PointTriplet>& points,
                          const CameraPose& pose2);

}  // namespace tripose

#endif  // TRIPOSE_CONSTRAINTS_H_
