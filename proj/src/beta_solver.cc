#include "tripose/beta_solver.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "tripose/polynomial.h"
#include "tripose/translation.h"

namespace tripose {

namespace {

constexpr int kEqualNorm12 = 0;  // ||r1||^2 - ||r2||^2
constexpr int kEqualNorm23 = 1;  // ||r2||^2 - ||r3||^2
constexpr int kOrtho12 = 2;      // r1 . r2
constexpr int kOrtho23 = 3;      // r2 . r3
constexpr int kOrtho31 = 4;      // r3 . r1

// Symmetric quadratic form of one orthonormality constraint over the local
// basis columns: constraint value = beta^T Q beta.
Eigen::MatrixXd constraint_quadric(const Eigen::Matrix<double, 12, Eigen::Dynamic>& V,
                                   int first_col, int n, int which) {
    auto block = [&](int col, int b) {
        return V.col(first_col + col).segment<3>(3 * b);
    };
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double q = 0.0;
            switch (which) {
                case kEqualNorm12:
                    q = block(i, 0).dot(block(j, 0)) - block(i, 1).dot(block(j, 1));
                    break;
                case kEqualNorm23:
                    q = block(i, 1).dot(block(j, 1)) - block(i, 2).dot(block(j, 2));
                    break;
                case kOrtho12:
                    q = 0.5 * (block(i, 0).dot(block(j, 1)) + block(j, 0).dot(block(i, 1)));
                    break;
                case kOrtho23:
                    q = 0.5 * (block(i, 1).dot(block(j, 2)) + block(j, 1).dot(block(i, 2)));
                    break;
                case kOrtho31:
                    q = 0.5 * (block(i, 2).dot(block(j, 0)) + block(j, 2).dot(block(i, 0)));
                    break;
            }
            Q(i, j) = q;
        }
    }
    return Q;
}

double sign_of(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// Unit-norm constraint ||r_b||^2 as a quadratic form (case 3 uses these).
Eigen::MatrixXd norm_quadric(const Eigen::Matrix<double, 12, Eigen::Dynamic>& V,
                             int first_col, int n, int b) {
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Q(i, j) = V.col(first_col + i).segment<3>(3 * b)
                          .dot(V.col(first_col + j).segment<3>(3 * b));
    return Q;
}

// Determinant of a small matrix of polynomials by cofactor expansion along
// the first column.
Poly poly_det(const std::vector<std::vector<Poly>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    Poly det;
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::vector<Poly>> sub;
        sub.reserve(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r) continue;
            std::vector<Poly> row(m[i].begin() + 1, m[i].end());
            sub.push_back(std::move(row));
        }
        const Poly term = m[r][0] * poly_det(sub);
        if (r % 2 == 0) det += term;
        else det -= term;
    }
    return det;
}

}  // namespace

NullBasis null_basis(const ConstraintSystem& system, int k) {
    if (k < 1 || k > 4)
        throw NumericalFailure("null-basis size must be between 1 and 4");
    if (!system.C.allFinite())
        throw NumericalFailure("constraint matrix contains non-finite entries");

    Eigen::JacobiSVD<MatX12> svd(system.C, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
        throw NumericalFailure("SVD of the constraint matrix failed");

    NullBasis basis;
    basis.sigma.setZero();
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size() && i < 12; ++i) basis.sigma[i] = sv[i];
    basis.V = svd.matrixV().rightCols(k);
    return basis;
}

std::vector<BetaSolution> solve_case1(const NullBasis& basis) {
    const auto& v = basis.V.col(basis.k() - 1);
    const double r_norm = v.head<9>().norm();
    if (r_norm < 1e-12)
        throw DegenerateCandidate("case 1: singular vector has no rotation part");

    std::vector<BetaSolution> out;
    for (double sign : {1.0, -1.0}) {
        BetaSolution s;
        s.case_n = 1;
        s.betas = {sign / r_norm};
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<BetaSolution> solve_case2(const NullBasis& basis) {
    if (basis.k() < 2) throw DegenerateCandidate("case 2 needs two basis columns");
    const int first = basis.k() - 2;

    // Five constraints over the monomials [b1^2, b2^2, b1 b2].
    Eigen::Matrix<double, 5, 3> M;
    for (int c = 0; c < 5; ++c) {
        const Eigen::MatrixXd Q = constraint_quadric(basis.V, first, 2, c);
        M.row(c) << Q(0, 0), Q(1, 1), 2.0 * Q(0, 1);
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 3>> svd(M, Eigen::ComputeFullV);
    Vec3 m = svd.matrixV().col(2);
    if (m[0] + m[1] < 0.0) m = -m;

    const double scale = m.cwiseAbs().maxCoeff();
    if (std::max(m[0], m[1]) < 1e-12 * scale)
        throw DegenerateCandidate("case 2: monomial vector has no positive squares");

    BetaSolution s;
    s.case_n = 2;
    const double b1 = std::sqrt(std::max(m[0], 0.0));
    const double b2 = sign_of(m[2]) * std::sqrt(std::max(m[1], 0.0));
    s.betas = {b1, b2};
    s.consistency = std::abs(m[2] * m[2] - m[0] * m[1]) / (scale * scale);
    return {s};
}

std::vector<BetaSolution> solve_case3(const NullBasis& basis) {
    if (basis.k() < 3) throw DegenerateCandidate("case 3 needs three basis columns");
    const int first = basis.k() - 3;

    // Six constraints over [b1^2, b2^2, b3^2, b1b2, b1b3, b2b3]; the three
    // orthogonality rows have zero right-hand side, the unit norms one.
    Eigen::Matrix<double, 6, 6> M;
    Eigen::Matrix<double, 6, 1> b;
    std::array<Eigen::MatrixXd, 6> quadrics = {
        constraint_quadric(basis.V, first, 3, kOrtho12),
        constraint_quadric(basis.V, first, 3, kOrtho23),
        constraint_quadric(basis.V, first, 3, kOrtho31),
        norm_quadric(basis.V, first, 3, 0),
        norm_quadric(basis.V, first, 3, 1),
        norm_quadric(basis.V, first, 3, 2),
    };
    for (int c = 0; c < 6; ++c) {
        const auto& Q = quadrics[static_cast<std::size_t>(c)];
        M.row(c) << Q(0, 0), Q(1, 1), Q(2, 2), 2.0 * Q(0, 1), 2.0 * Q(0, 2), 2.0 * Q(1, 2);
        b[c] = c < 3 ? 0.0 : 1.0;
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(
        M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[0] <= 0.0 || sv[5] < 1e-12 * sv[0])
        throw DegenerateCandidate("case 3: monomial system is singular");
    const Eigen::Matrix<double, 6, 1> m = svd.solve(b);

    int dominant = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(m[i]) > std::abs(m[dominant])) dominant = i;
    if (m[dominant] <= 0.0)
        throw DegenerateCandidate("case 3: no positive squared monomial");

    const double bd = std::sqrt(m[dominant]);
    auto pair_index = [](int i, int j) {
        if (i > j) std::swap(i, j);
        if (i == 0) return j == 1 ? 3 : 4;
        return 5;  // (1,2)
    };
    Vec3 betas = Vec3::Zero();
    betas[dominant] = bd;
    double consistency = 0.0;
    for (int j = 0; j < 3; ++j) {
        if (j == dominant) continue;
        betas[j] = m[pair_index(dominant, j)] / bd;
        consistency += std::abs(betas[j] * betas[j] - m[j]);
    }

    BetaSolution s;
    s.case_n = 3;
    s.betas = {betas[0], betas[1], betas[2]};
    s.consistency = consistency / std::max(1.0, std::abs(m[dominant]));
    return {s};
}

Case4Diagnostics case4_diagnostics(const NullBasis& basis) {
    if (basis.k() < 4) throw DegenerateCandidate("case 4 needs four basis columns");
    const int first = basis.k() - 4;

    Case4Diagnostics diag;

    // With beta4 = 1 each constraint becomes a row of the 5x6 system over
    // [b1^2, b2^2, b1 b2, b1, b2, 1] whose entries are polynomials in b3.
    for (int c = 0; c < 5; ++c) {
        const Eigen::MatrixXd q = constraint_quadric(basis.V, first, 4, c);
        diag.system[static_cast<std::size_t>(c)] = {
            Poly::constant(q(0, 0)),
            Poly::constant(q(1, 1)),
            Poly::constant(2.0 * q(0, 1)),
            Poly({2.0 * q(0, 3), 2.0 * q(0, 2)}),
            Poly({2.0 * q(1, 3), 2.0 * q(1, 2)}),
            Poly({q(3, 3), 2.0 * q(2, 3), q(2, 2)}),
        };
    }

    // Null vector components as signed maximal minors (Cramer identity).
    for (int col = 0; col < 6; ++col) {
        std::vector<std::vector<Poly>> minor(5);
        for (int r = 0; r < 5; ++r)
            for (int cc = 0; cc < 6; ++cc)
                if (cc != col) minor[r].push_back(diag.system[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)]);
        diag.null_vector[static_cast<std::size_t>(col)] =
            poly_det(minor) * (col % 2 == 0 ? 1.0 : -1.0);
    }

    // Product-consistency residuals among the null-vector components.
    const auto& u = diag.null_vector;
    const Poly f1 = u[3] * u[4] - u[2] * u[5];
    const Poly f2 = u[3] * u[3] - u[0] * u[5];
    const Poly f3 = u[4] * u[4] - u[1] * u[5];
    diag.cost = f1 * f1 + f2 * f2 + f3 * f3;
    diag.cost_derivative = diag.cost.derivative();

    const double grad_scale = diag.cost_derivative.max_abs_coeff();
    if (grad_scale == 0.0)
        throw DegenerateCandidate("case 4: degenerate compatibility polynomials");
    const Poly scaled_grad = diag.cost_derivative * (1.0 / grad_scale);

    diag.roots = find_real_roots(scaled_grad);

    // A guarded Newton step against the derivative tightens each root.
    const Poly grad2 = scaled_grad.derivative();
    for (double& r : diag.roots) {
        for (int it = 0; it < 2; ++it) {
            const double g = scaled_grad.eval(r);
            const double h = grad2.eval(r);
            if (h == 0.0) break;
            const double next = r - g / h;
            if (!std::isfinite(next) || std::abs(scaled_grad.eval(next)) >= std::abs(g)) break;
            r = next;
        }
    }
    return diag;
}

namespace {

// Monomial vector [b1^2, b2^2, b1b2, b1, b2, 1] (up to scale) solving
// M(b3) m = 0. Generically this is the signed-minor vector; when the matrix
// drops to nullity two (all minors vanish together) the member of the null
// family with the smallest product-consistency residual is taken.
std::optional<Eigen::Matrix<double, 6, 1>> monomials_at_root(
    const Case4Diagnostics& diag, double b3) {
    Eigen::Matrix<double, 5, 6> M;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 6; ++c)
            M(r, c) = diag.system[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                          .eval(b3);

    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[0] <= 0.0) return std::nullopt;

    Eigen::Matrix<double, 6, 1> m = svd.matrixV().col(5);
    if (sv[4] < 1e-8 * sv[0]) {
        // two-dimensional null family m(s) = a + s b; minimize the quartic
        // consistency residual over s
        const Eigen::Matrix<double, 6, 1> a = svd.matrixV().col(5);
        const Eigen::Matrix<double, 6, 1> b = svd.matrixV().col(4);
        std::array<Poly, 6> ms;
        for (int i = 0; i < 6; ++i) ms[static_cast<std::size_t>(i)] = Poly({a[i], b[i]});
        const Poly r1 = ms[3] * ms[4] - ms[2] * ms[5];
        const Poly r2 = ms[3] * ms[3] - ms[0] * ms[5];
        const Poly r3 = ms[4] * ms[4] - ms[1] * ms[5];
        const Poly residual = r1 * r1 + r2 * r2 + r3 * r3;

        double best_s = 0.0;
        double best_val = residual.eval(0.0);
        for (double s : find_real_roots(residual.derivative())) {
            const double val = residual.eval(s);
            if (val < best_val) {
                best_val = val;
                best_s = s;
            }
        }
        m = a + best_s * b;
        m.normalize();
    }
    return m;
}

}  // namespace

namespace {

// Case-4 body for one choice of unit-coefficient column (already moved to
// the last basis position).
std::vector<BetaSolution> case4_for_basis(const NullBasis& basis) {
    const Case4Diagnostics diag = case4_diagnostics(basis);
    const std::vector<double>& roots = diag.roots;
    const int first = basis.k() - 4;

    std::vector<BetaSolution> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double b3 = roots[i];
        const auto monomials = monomials_at_root(diag, b3);
        if (!monomials) continue;
        const Eigen::Matrix<double, 6, 1>& m = *monomials;
        if (std::abs(m[5]) < 1e-10 * m.norm()) continue;

        Eigen::Vector4d betas(m[3] / m[5], m[4] / m[5], b3, 1.0);

        // Restore the dropped scale: average column norm of the rotation
        // block back to one.
        Vec12 v = Vec12::Zero();
        for (int c = 0; c < 4; ++c) v += betas[c] * basis.V.col(first + c);
        const double norm_avg = (v.segment<3>(0).norm() + v.segment<3>(3).norm() +
                                 v.segment<3>(6).norm()) / 3.0;
        if (norm_avg < 1e-12) continue;

        BetaSolution s;
        s.case_n = 4;
        s.root_index = static_cast<int>(i);
        const double scale = 1.0 / norm_avg;
        s.betas = {betas[0] * scale, betas[1] * scale, betas[2] * scale, scale};
        s.consistency = std::abs(diag.cost.eval(b3)) / (1.0 + diag.cost.max_abs_coeff());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<BetaSolution> solve_case4(const NullBasis& basis) {
    if (basis.k() < 4) throw DegenerateCandidate("case 4 needs four basis columns");
    const int first = basis.k() - 4;

    // The SVD basis of an exact null space is an arbitrary rotation of it,
    // so the solution's coefficient on any particular column can vanish.
    // Each column takes the unit-coefficient role in turn; at least one
    // division is well conditioned.
    std::vector<BetaSolution> out;
    for (int div = 3; div >= 0; --div) {
        std::array<int, 4> order{};
        int at = 0;
        for (int c = 0; c < 4; ++c)
            if (c != div) order[static_cast<std::size_t>(at++)] = c;
        order[3] = div;

        NullBasis permuted = basis;
        for (int c = 0; c < 4; ++c)
            permuted.V.col(first + c) = basis.V.col(first + order[static_cast<std::size_t>(c)]);

        for (BetaSolution s : case4_for_basis(permuted)) {
            BetaSolution mapped = s;
            for (int c = 0; c < 4; ++c)
                mapped.betas[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] =
                    s.betas[static_cast<std::size_t>(c)];
            mapped.root_index = (3 - div) * 16 + s.root_index;
            out.push_back(std::move(mapped));
        }
    }
    if (out.empty())
        throw DegenerateCandidate("case 4: no usable real root in any division");
    return out;
}

RotationReconstruction reconstruct_rotation(const NullBasis& basis,
                                            const BetaSolution& solution) {
    const int n = static_cast<int>(solution.betas.size());
    if (n < 1 || n > basis.k())
        throw DegenerateCandidate("beta solution does not match the basis");
    const int first = basis.k() - n;

    Vec12 v = Vec12::Zero();
    for (int i = 0; i < n; ++i) v += solution.betas[static_cast<std::size_t>(i)] * basis.V.col(first + i);

    Mat3 Q = Eigen::Map<const Mat3>(v.data());
    const double det = Q.determinant();
    const double scale_ref = std::pow(std::max(Q.norm() / std::sqrt(3.0), 1e-300), 3);
    if (std::abs(det) < 1e-12 * scale_ref)
        throw DegenerateCandidate("rotation block is singular");

    const double s = 1.0 / std::cbrt(det);
    RotationReconstruction rec;
    rec.raw_v = s * v;
    rec.R = project_to_rotation(s * Q);
    return rec;
}

std::vector<PoseCandidate> all_candidates(const ConstraintSystem& system) {
    const NullBasis basis = null_basis(system, 4);

    std::vector<BetaSolution> solutions;
    for (int case_n = 1; case_n <= 4; ++case_n) {
        try {
            std::vector<BetaSolution> s;
            switch (case_n) {
                case 1: s = solve_case1(basis); break;
                case 2: s = solve_case2(basis); break;
                case 3: s = solve_case3(basis); break;
                default: s = solve_case4(basis); break;
            }
            solutions.insert(solutions.end(), s.begin(), s.end());
        } catch (const DegenerateCandidate&) {
            // a case with no usable candidate does not block the others
        }
    }

    std::vector<PoseCandidate> candidates;
    for (const auto& sol : solutions) {
        try {
            const RotationReconstruction rec = reconstruct_rotation(basis, sol);
            const Vec3 t = solve_translation(system, rec.R);

            bool duplicate = false;
            for (const auto& kept : candidates) {
                const double dt = (kept.pose.t - t).norm() /
                                  (1.0 + std::max(kept.pose.t.norm(), t.norm()));
                if (rotation_error_deg(kept.pose.R, rec.R) < 0.01 && dt < 1e-6) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;

            PoseCandidate cand{CameraPose(rec.R, t), sol, 0.0};
            const Vec12 v = stack_pose(rec.R, t).normalized();
            cand.residual = (system.C * v).norm();
            candidates.push_back(std::move(cand));
        } catch (const DegenerateCandidate&) {
        } catch (const TranslationDegenerate&) {
        }
    }

    if (candidates.empty())
        throw NoCandidates("no pose candidate survived any solution case");
    return candidates;
}

}  // namespace tripose
