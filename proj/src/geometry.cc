#include "tripose/geometry.h"

#include <algorithm>
#include <cmath>

namespace tripose {

namespace {

bool all_finite(const Vec3& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

HomPoint2::HomPoint2(const Vec3& coords) : v(coords) {
    if (!all_finite(v) || v.norm() == 0.0)
        throw DegenerateConfiguration("homogeneous point must be finite and nonzero");
}

bool HomPoint2::is_finite_point(double tol) const {
    return std::abs(v[2]) > tol * v.norm();
}

Vec2 HomPoint2::euclidean() const {
    if (!is_finite_point())
        throw DegenerateConfiguration("point at infinity has no euclidean coordinates");
    return v.head<2>() / v[2];
}

HomLine2::HomLine2(const Vec3& coeffs) : v(coeffs) {
    double n = v.norm();
    if (!all_finite(v) || n == 0.0)
        throw DegenerateConfiguration("homogeneous line must be finite and nonzero");
    v /= n;
}

double HomLine2::distance_to(const Vec2& p) const {
    double denom = v.head<2>().norm();
    if (denom == 0.0)
        throw DegenerateConfiguration("line at infinity has no point distance");
    return std::abs(v[0] * p[0] + v[1] * p[1] + v[2]) / denom;
}

Segment2::Segment2(const Vec2& p_in, const Vec2& q_in) : p(p_in), q(q_in) {
    if (p == q) throw DegenerateConfiguration("segment endpoints coincide");
}

HomLine2 Segment2::line() const {
    Vec3 a(p[0], p[1], 1.0);
    Vec3 b(q[0], q[1], 1.0);
    return HomLine2(a.cross(b));
}

Intrinsics::Intrinsics(const Mat3& K_in) : K(K_in) {
    if (std::abs(K(1, 0)) > 0 || std::abs(K(2, 0)) > 0 || std::abs(K(2, 1)) > 0)
        throw DegenerateConfiguration("intrinsic matrix must be upper triangular");
    if (K(2, 2) != 1.0)
        throw DegenerateConfiguration("intrinsic matrix must have K(2,2) == 1");
    if (std::abs(K(0, 0) * K(1, 1)) < 1e-12)
        throw DegenerateConfiguration("intrinsic matrix must be invertible");
    K_inv_ = K.inverse();
}

Intrinsics Intrinsics::simple(double focal, double cx, double cy) {
    Mat3 K = Mat3::Identity();
    K(0, 0) = K(1, 1) = focal;
    K(0, 2) = cx;
    K(1, 2) = cy;
    return Intrinsics(K);
}

HomPoint2 Intrinsics::calibrate(const HomPoint2& pixel) const {
    return HomPoint2(K_inv_ * pixel.v);
}

HomLine2 Intrinsics::calibrate(const HomLine2& pixel) const {
    return HomLine2(K.transpose() * pixel.v);
}

Vec2 Intrinsics::to_pixel(const HomPoint2& calibrated) const {
    return HomPoint2(K * calibrated.v).euclidean();
}

HomLine2 Intrinsics::line_to_pixel(const HomLine2& calibrated) const {
    return HomLine2(K_inv_.transpose() * calibrated.v);
}

CameraPose::CameraPose(const Mat3& R_in, const Vec3& t_in) : R(R_in), t(t_in) {
    const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho >= 1e-9 || std::abs(R.determinant() - 1.0) >= 1e-9)
        throw DegenerateConfiguration("rotation matrix violates SO(3) invariants");
}

Mat34 CameraPose::matrix() const {
    Mat34 P;
    P.leftCols<3>() = R;
    P.col(3) = t;
    return P;
}

CameraPose CameraPose::relative_to(const CameraPose& reference) const {
    Mat3 R_rel = R * reference.R.transpose();
    return CameraPose(R_rel, t - R_rel * reference.t);
}

ViewNormalization normalize_view(const std::vector<HomPoint2>& points,
                                 const std::vector<HomLine2>& lines) {
    if (points.empty() && lines.empty())
        throw DegenerateConfiguration("normalize_view needs at least one feature");

    Mat3 T = Mat3::Identity();
    if (!points.empty()) {
        Vec2 centroid = Vec2::Zero();
        for (const auto& p : points) centroid += p.euclidean();
        centroid /= static_cast<double>(points.size());

        double mean_dist = 0.0;
        for (const auto& p : points) mean_dist += (p.euclidean() - centroid).norm();
        mean_dist /= static_cast<double>(points.size());
        if (points.size() > 1 && mean_dist < 1e-12)
            throw DegenerateConfiguration("all points coincident; view cannot be normalized");

        // A single point can only be centered; the sqrt(2) radius condition
        // needs spread.
        const double s = mean_dist < 1e-12 ? 1.0 : std::sqrt(2.0) / mean_dist;
        T << s, 0, -s * centroid[0], 0, s, -s * centroid[1], 0, 0, 1;
    }

    ViewNormalization out;
    out.transform = T;
    out.points.reserve(points.size());
    for (const auto& p : points) out.points.emplace_back(T * p.v);
    const Mat3 T_inv_t = T.inverse().transpose();
    out.lines.reserve(lines.size());
    for (const auto& l : lines) out.lines.emplace_back(T_inv_t * l.v);
    return out;
}

TrifocalTensor trifocal_from_cameras(const Mat34& P2, const Mat34& P3) {
    TrifocalTensor T;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                T(i, j, k) = P2(j, i) * P3(k, 3) - P2(j, 3) * P3(k, i);
    return T;
}

HomPoint2 project_point(const Mat34& P, const Vec3& X) {
    return HomPoint2(P * X.homogeneous());
}

Vec3 triangulate_point(const Mat34& P1, const Mat34& P2, const HomPoint2& x1,
                       const HomPoint2& x2) {
    Eigen::Matrix4d A;
    const Mat34* Ps[2] = {&P1, &P2};
    const HomPoint2* xs[2] = {&x1, &x2};
    for (int v = 0; v < 2; ++v) {
        const auto& P = *Ps[v];
        const Vec3& x = xs[v]->v;
        A.row(2 * v) = x[0] * P.row(2) - x[2] * P.row(0);
        A.row(2 * v + 1) = x[1] * P.row(2) - x[2] * P.row(1);
    }
    for (int r = 0; r < 4; ++r) {
        double n = A.row(r).norm();
        if (n > 0) A.row(r) /= n;
    }

    Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A second near-zero singular value means the solution ray is ambiguous
    // (identical camera centers).
    if (sv[2] < 1e-10 * sv[0])
        throw TriangulationDegenerate("triangulation system is rank deficient");

    Vec4 Xh = svd.matrixV().col(3);
    if (std::abs(Xh[3]) < 1e-10 * Xh.norm())
        throw TriangulationDegenerate("triangulated point at infinity (parallel rays)");
    return Xh.head<3>() / Xh[3];
}

Line3 triangulate_line(const Mat34& P1, const Mat34& P2, const HomLine2& l1,
                       const HomLine2& l2) {
    Line3 line;
    line.plane1 = P1.transpose() * l1.v;
    line.plane2 = P2.transpose() * l2.v;

    const double n1 = line.plane1.norm();
    const double n2 = line.plane2.norm();
    if (n1 == 0.0 || n2 == 0.0)
        throw TriangulationDegenerate("back-projected plane vanished");
    const double gram = line.plane1.dot(line.plane2) / (n1 * n2);
    if (1.0 - gram * gram < 1e-20)
        throw TriangulationDegenerate("back-projected planes coincide");
    return line;
}

HomLine2 project_line(const Mat34& P, const Line3& line) {
    // Two homogeneous points spanning the 3D line: the null space of the
    // stacked plane equations.
    Eigen::Matrix<double, 2, 4> W;
    W.row(0) = line.plane1.normalized().transpose();
    W.row(1) = line.plane2.normalized().transpose();
    Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(W, Eigen::ComputeFullV);
    Vec4 Xa = svd.matrixV().col(2);
    Vec4 Xb = svd.matrixV().col(3);

    Vec3 pa = P * Xa;
    Vec3 pb = P * Xb;
    Vec3 l = pa.cross(pb);
    if (l.norm() < 1e-12 * std::max(1.0, pa.norm() * pb.norm()))
        throw TriangulationDegenerate("3D line projects to a point in this view");
    return HomLine2(l);
}

double rotation_error_deg(const Mat3& R_est, const Mat3& R_gt) {
    const double c = ((R_est.transpose() * R_gt).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
}

TranslationError translation_error(const Vec3& t_est, const Vec3& t_gt) {
    const double n_gt = t_gt.norm();
    if (n_gt == 0.0)
        throw DegenerateConfiguration("ground-truth translation must be nonzero");
    const double n_est = t_est.norm();
    TranslationError err;
    err.ratio_error = std::abs(n_est / n_gt - 1.0);
    if (n_est == 0.0) {
        err.angle_deg = 90.0;  // sentinel: direction undefined
        return err;
    }
    const double c = std::clamp(t_est.dot(t_gt) / (n_est * n_gt), -1.0, 1.0);
    err.angle_deg = std::acos(c) * 180.0 / M_PI;
    return err;
}

Mat3 project_to_rotation(const Mat3& M) {
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    return R;
}

}  // namespace tripose
