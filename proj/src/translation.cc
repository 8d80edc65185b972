#include "tripose/translation.h"

namespace tripose {

SplitSystem split_system(const ConstraintSystem& system) {
    SplitSystem s;
    s.A_r = system.C.leftCols<9>();
    s.B_t = system.C.rightCols<3>();
    return s;
}

Vec3 solve_translation(const ConstraintSystem& system, const Mat3& R) {
    const SplitSystem s = split_system(system);

    Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(
        s.B_t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv[0] <= 0.0 || sv[2] < 1e-12 * sv[0])
        throw TranslationDegenerate("translation block is rank deficient");

    const Eigen::Matrix<double, 9, 1> r =
        Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R.data());
    return svd.solve(-(s.A_r * r));
}

}  // namespace tripose
