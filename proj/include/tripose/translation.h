#ifndef TRIPOSE_TRANSLATION_H_
#define TRIPOSE_TRANSLATION_H_

#include "tripose/constraints.h"
#include "tripose/geometry.h"

namespace tripose {

// Constraint matrix split into its rotation and translation coefficient
// blocks: [A_r | B_t] v = 0 with v = [r; t].
struct SplitSystem {
    Eigen::Matrix<double, Eigen::Dynamic, 9> A_r;
    Eigen::Matrix<double, Eigen::Dynamic, 3> B_t;
};

SplitSystem split_system(const ConstraintSystem& system);

// Least-squares translation given a recovered rotation: minimizes
// ||A_r r + B_t t|| over t via an orthogonal factorization. Throws
// TranslationDegenerate when the translation block is rank deficient.
Vec3 solve_translation(const ConstraintSystem& system, const Mat3& R);

}  // namespace tripose

#endif  // TRIPOSE_TRANSLATION_H_
