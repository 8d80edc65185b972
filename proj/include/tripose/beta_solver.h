#ifndef TRIPOSE_BETA_SOLVER_H_
#define TRIPOSE_BETA_SOLVER_H_

#include <array>
#include <vector>

#include "tripose/constraints.h"
#include "tripose/geometry.h"
#include "tripose/polynomial.h"

namespace tripose {

// Right singular vectors of the constraint matrix belonging to its k
// smallest singular values. Columns are in descending singular-value order,
// so the last column pairs with the smallest value.
struct NullBasis {
    Eigen::Matrix<double, 12, Eigen::Dynamic> V;  // 12 x k
    Eigen::Matrix<double, 12, 1> sigma;           // full spectrum, descending

    int k() const { return static_cast<int>(V.cols()); }
};

// Combination coefficients for one candidate. betas.size() == case_n, in
// the same order as the last case_n basis columns.
struct BetaSolution {
    std::vector<double> betas;
    int case_n = 0;       // 1..4
    int root_index = 0;   // which real root of the case-4 cost derivative
    double consistency = 0.0;  // relinearization residual; 0 when exact
};

struct PoseCandidate {
    CameraPose pose;
    BetaSolution source;
    double residual = 0.0;  // ||C v|| for the unit-normalized stacked pose
};

// Full SVD of the constraint matrix; the k smallest right singular vectors
// plus the whole spectrum for diagnostics.
NullBasis null_basis(const ConstraintSystem& system, int k);

// Case N = 1: the smallest singular vector itself, both signs.
std::vector<BetaSolution> solve_case1(const NullBasis& basis);

// Case N = 2: linearized monomial system over [b1^2, b2^2, b1 b2] from the
// two equal-norm and three orthogonality constraints, solved by SVD.
std::vector<BetaSolution> solve_case2(const NullBasis& basis);

// Case N = 3: square 6x6 system over the six degree-2 monomials using the
// three unit-norm and three orthogonality constraints.
std::vector<BetaSolution> solve_case3(const NullBasis& basis);

// Case N = 4: relinearization. Scale is dropped by fixing beta4 = 1, the five
// constraints become a 5x6 polynomial matrix in beta3, its null vector is
// expressed through signed 5x5 determinants, and the minima of the squared
// compatibility residual are found as roots of a degree-11 polynomial.
std::vector<BetaSolution> solve_case4(const NullBasis& basis);

// Intermediate case-4 quantities, exposed so the determinant identity and
// root residuals can be verified independently.
struct Case4Diagnostics {
    std::array<std::array<Poly, 6>, 5> system;  // rows over [b1^2,b2^2,b1b2,b1,b2,1]
    std::array<Poly, 6> null_vector;            // signed maximal minors
    Poly cost;                                  // squared compatibility residual F
    Poly cost_derivative;                       // F', unscaled
    std::vector<double> roots;                  // accepted real roots of F'
};
Case4Diagnostics case4_diagnostics(const NullBasis& basis);

struct RotationReconstruction {
    Mat3 R;       // polar-projected rotation
    Vec12 raw_v;  // determinant-scaled combination before projection
};

// v = sum beta_i V_i over the last case_n basis columns; the 3x3 block is
// scaled so its determinant is +1 and then polar-projected onto SO(3).
RotationReconstruction reconstruct_rotation(const NullBasis& basis,
                                            const BetaSolution& solution);

// Runs all four cases on one k = 4 basis, attaches least-squares
// translations, deduplicates, and returns every distinct candidate in
// deterministic order.
std::vector<PoseCandidate> all_candidates(const ConstraintSystem& system);

}  // namespace tripose

#endif  // TRIPOSE_BETA_SOLVER_H_
