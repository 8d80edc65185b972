#ifndef TRIPOSE_GEOMETRY_H_
#define TRIPOSE_GEOMETRY_H_

#include <Eigen/Dense>
#include <vector>

#include "tripose/errors.h"

namespace tripose {

using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

// Homogeneous 2D point. Coordinates are dimensionless once the view has been
// calibrated by K^-1.
struct HomPoint2 {
    Vec3 v;

    explicit HomPoint2(const Vec3& coords);
    HomPoint2(double x, double y) : v(x, y, 1.0) {}

    bool is_finite_point(double tol = 1e-12) const;

    // Euclidean coordinates; throws DegenerateConfiguration for points at
    // (or numerically on) the plane at infinity instead of dividing.
    Vec2 euclidean() const;
};

// Homogeneous 2D line l with l.v dot x.v == 0 for incident points x.
// Canonicalized to unit Euclidean norm on construction.
struct HomLine2 {
    Vec3 v;

    explicit HomLine2(const Vec3& coeffs);

    double distance_to(const Vec2& p) const;  // perpendicular, same units as p
};

// Line segment given by its two endpoints in pixels.
struct Segment2 {
    Vec2 p;
    Vec2 q;

    Segment2(const Vec2& p_in, const Vec2& q_in);

    HomLine2 line() const;  // infinite line through the endpoints
};

// Upper-triangular camera intrinsic matrix, K(2,2) == 1.
struct Intrinsics {
    Mat3 K;

    explicit Intrinsics(const Mat3& K_in);
    static Intrinsics simple(double focal, double cx, double cy);

    HomPoint2 calibrate(const HomPoint2& pixel) const;   // x_cal = K^-1 x_pix
    HomLine2 calibrate(const HomLine2& pixel) const;     // l_cal = K^T l_pix
    Vec2 to_pixel(const HomPoint2& calibrated) const;    // dehomogenized K x
    HomLine2 line_to_pixel(const HomLine2& calibrated) const;  // K^-T l

  private:
    Mat3 K_inv_;
};

// Rigid camera pose [R | t], world-to-camera. R in SO(3), t in meters.
struct CameraPose {
    Mat3 R;
    Vec3 t;

    CameraPose() : R(Mat3::Identity()), t(Vec3::Zero()) {}
    CameraPose(const Mat3& R_in, const Vec3& t_in);

    Mat34 matrix() const;
    Vec3 apply(const Vec3& x) const { return R * x + t; }

    // Pose of this camera expressed relative to `reference`.
    CameraPose relative_to(const CameraPose& reference) const;
};

// Trifocal tensor slice layout: T(i,j,k) = T_i^{jk}.
struct TrifocalTensor {
    double T[3][3][3];

    double operator()(int i, int j, int k) const { return T[i][j][k]; }
    double& operator()(int i, int j, int k) { return T[i][j][k]; }
};

// Per-view Hartley similarity transforms for the three views.
struct NormalizingTransform {
    Mat3 F = Mat3::Identity();  // view 1
    Mat3 G = Mat3::Identity();  // view 2
    Mat3 H = Mat3::Identity();  // view 3
};

// Result of normalizing one view: the similarity transform plus the
// transformed observations (points as x' = Tx, lines as l' = T^-T l).
struct ViewNormalization {
    Mat3 transform;
    std::vector<HomPoint2> points;
    std::vector<HomLine2> lines;
};

// 3D line stored as the intersection of two planes.
struct Line3 {
    Vec4 plane1;
    Vec4 plane2;
};

// Maps the view's points to centroid 0 and mean radius sqrt(2). Views with no
// points get the identity transform; lines ride along via T^-T so incidence
// is preserved. Throws DegenerateConfiguration when all points coincide.
ViewNormalization normalize_view(const std::vector<HomPoint2>& points,
                                 const std::vector<HomLine2>& lines);

// T_i^{jk} = a_i^j b_4^k - a_4^j b_i^k with a_i, b_i the columns of P2, P3.
TrifocalTensor trifocal_from_cameras(const Mat34& P2, const Mat34& P3);

// Homogeneous pinhole projection P [X; 1]. No dehomogenization happens here;
// use HomPoint2::euclidean() or Intrinsics::to_pixel() and let them flag
// points on the principal plane.
HomPoint2 project_point(const Mat34& P, const Vec3& X);

// Linear (DLT) two-view triangulation. Throws TriangulationDegenerate when
// the rays are parallel or the homogeneous solution lies at infinity.
Vec3 triangulate_point(const Mat34& P1, const Mat34& P2, const HomPoint2& x1,
                       const HomPoint2& x2);

// Back-projects both lines to planes P_i^T l_i and returns their
// intersection. Throws TriangulationDegenerate when the planes coincide.
Line3 triangulate_line(const Mat34& P1, const Mat34& P2, const HomLine2& l1,
                       const HomLine2& l2);

// Image of a 3D line in the view with camera matrix P. Throws
// TriangulationDegenerate when the line projects to a point (it passes
// through the camera center).
HomLine2 project_line(const Mat34& P, const Line3& line);

// Geodesic angle of R_est^T R_gt in degrees, clamped to [0, 180].
double rotation_error_deg(const Mat3& R_est, const Mat3& R_gt);

struct TranslationError {
    double angle_deg;
    double ratio_error;  // | ||t_est|| / ||t_gt|| - 1 |
};

// Direction angle and norm-ratio error. A zero estimate against a nonzero
// ground truth reports the 90 degree sentinel.
TranslationError translation_error(const Vec3& t_est, const Vec3& t_gt);

// Closest rotation in the Frobenius sense (orthogonal polar factor with
// determinant +1).
Mat3 project_to_rotation(const Mat3& M);

}  // namespace tripose

#endif  // TRIPOSE_GEOMETRY_H_
