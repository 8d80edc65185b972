#include "tripose/constraints.h"

#include <cmath>

namespace tripose {

namespace {

// Householder vector that reflects x onto +-||x|| e1, sign chosen away from
// cancellation.
template <int N>
Eigen::Matrix<double, N, 1> householder_vector(const Eigen::Matrix<double, N, 1>& x) {
    Eigen::Matrix<double, N, 1> u = x;
    const double nx = x.norm();
    u[0] += (x[0] >= 0.0 ? nx : -nx);
    return u;
}

template <int N, typename Derived>
void apply_reflection(const Eigen::Matrix<double, N, 1>& u,
                      Eigen::MatrixBase<Derived>& block) {
    const double uu = u.squaredNorm();
    if (uu == 0.0) return;
    block -= u * ((2.0 / uu) * (u.transpose() * block));
}

// 12x12 map taking v = [r1;r2;r3;t] to the column-stacked entries of the
// normalized third camera H [R|t] diag(F^-1, 1).
Eigen::Matrix<double, 12, 12> normalized_unknown_map(const Mat3& F, const Mat3& H) {
    const Mat3 F_inv = F.inverse();
    Eigen::Matrix<double, 12, 12> L = Eigen::Matrix<double, 12, 12>::Zero();
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
            L.block<3, 3>(3 * c, 3 * d) = F_inv(d, c) * H;
    L.block<3, 3>(9, 9) = H;
    return L;
}

RowVec12 unit_row(const RowVec12& row) {
    const double n = row.norm();
    if (n == 0.0 || !row.allFinite())
        throw NumericalFailure("constraint row vanished or is not finite");
    return row / n;
}

}  // namespace

std::array<RowVec12, 2> line_rows(const LineTriplet& triplet, const CameraPose& pose2) {
    const Vec3& l1 = triplet.l1.v;
    const Vec3& l2 = triplet.l2.v;
    const Vec3& l3 = triplet.l3.v;

    // Known back-projected planes of views 1 and 2 (P1 = [I|0]).
    Vec4 c1, c2;
    c1 << l1, 0.0;
    c2 << pose2.R.transpose() * l2, pose2.t.dot(l2);

    const double g = c1.dot(c2);
    const double cross_gram = c1.squaredNorm() * c2.squaredNorm() - g * g;
    if (cross_gram < 1e-10 * c1.squaredNorm() * c2.squaredNorm())
        throw DegenerateLine("back-projected planes of views 1-2 are parallel");

    // Symbolic third plane [R^T l3; t^T l3] as a linear map of v.
    Eigen::Matrix<double, 4, 12> S = Eigen::Matrix<double, 4, 12>::Zero();
    for (int c = 0; c < 4; ++c) S.block<1, 3>(c, 3 * c) = l3.transpose();

    // Two reflections triangularize the known columns; the residual rows of
    // the third column are the constraints.
    const Vec4 u1 = householder_vector<4>(c1);
    apply_reflection<4>(u1, c2);
    apply_reflection<4>(u1, S);

    Vec3 tail = c2.tail<3>();
    const Vec3 u2 = householder_vector<3>(tail);
    auto S_tail = S.bottomRows<3>();
    apply_reflection<3>(u2, S_tail);

    return {unit_row(S.row(2)), unit_row(S.row(3))};
}

std::array<RowVec12, 4> point_rows(const PointTriplet& triplet, const CameraPose& pose2,
                                   const NormalizingTransform& norms) {
    const Vec3 x1 = norms.F * triplet.x1.v;
    const Vec3 x2 = norms.G * triplet.x2.v;
    const Vec3 x3 = norms.H * triplet.x3.v;

    // Second camera in normalized coordinates: G [R0|t0] diag(F^-1, 1).
    const Mat3 A2 = norms.G * pose2.R * norms.F.inverse();
    const Vec3 a4 = norms.G * pose2.t;

    const Vec3 p = A2 * x1;
    const Vec3& q = a4;

    const Eigen::Matrix<double, 12, 12> L = normalized_unknown_map(norms.F, norms.H);

    std::array<RowVec12, 4> rows;
    int out = 0;
    for (int i = 0; i < 2; ++i) {
        const double alpha = x2[i] * p[2] - x2[2] * p[i];
        const double gamma = x2[i] * q[2] - x2[2] * q[i];
        for (int m = 0; m < 2; ++m) {
            RowVec12 row = RowVec12::Zero();
            row[9 + 2] += alpha * x3[m];
            row[9 + m] -= alpha * x3[2];
            for (int c = 0; c < 3; ++c) {
                row[3 * c + 2] -= gamma * x1[c] * x3[m];
                row[3 * c + m] += gamma * x1[c] * x3[2];
            }
            rows[out++] = unit_row(row * L);
        }
    }
    return rows;
}

ConstraintSystem assemble(const std::vector<LineTriplet>& lines,
                          const std::vector<PointTriplet>& points,
                          const CameraPose& pose2) {
    if (4 * points.size() + 2 * lines.size() < 8)
        throw InsufficientConstraints(
            "need at least 8 constraint rows, have " +
            std::to_string(4 * points.size() + 2 * lines.size()));

    NormalizingTransform norms;
    if (!points.empty()) {
        std::vector<HomPoint2> v1, v2, v3;
        v1.reserve(points.size());
        v2.reserve(points.size());
        v3.reserve(points.size());
        for (const auto& p : points) {
            v1.push_back(p.x1);
            v2.push_back(p.x2);
            v3.push_back(p.x3);
        }
        norms.F = normalize_view(v1, {}).transform;
        norms.G = normalize_view(v2, {}).transform;
        norms.H = normalize_view(v3, {}).transform;
    }

    ConstraintSystem system;
    std::vector<RowVec12> rows;
    rows.reserve(2 * lines.size() + 4 * points.size());

    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            auto lr = line_rows(lines[i], pose2);
            for (int r = 0; r < 2; ++r) {
                rows.push_back(lr[r]);
                system.row_tags.push_back({RowTag::Source::kLine, static_cast<int>(i), r});
            }
        } catch (const DegenerateLine&) {
            system.skipped_lines.push_back(static_cast<int>(i));
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto pr = point_rows(points[i], pose2, norms);
        for (int r = 0; r < 4; ++r) {
            rows.push_back(pr[r]);
            system.row_tags.push_back({RowTag::Source::kPoint, static_cast<int>(i), r});
        }
    }

    if (rows.size() < 8)
        throw InsufficientConstraints("need at least 8 constraint rows, have " +
                                      std::to_string(rows.size()));

    system.C.resize(static_cast<Eigen::Index>(rows.size()), 12);
    for (std::size_t r = 0; r < rows.size(); ++r)
        system.C.row(static_cast<Eigen::Index>(r)) = rows[r];
    return system;
}

}  // namespace tripose
