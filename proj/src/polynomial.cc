#include "tripose/polynomial.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tripose/errors.h"

namespace tripose {

Poly::Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
    trim();
}

void Poly::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double Poly::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

double Poly::eval(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i)
        d[i - 1] = static_cast<double>(i) * c_[i];
    return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& other) const {
    std::vector<double> r(std::max(c_.size(), other.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < other.c_.size(); ++i) r[i] += other.c_[i];
    return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& other) const {
    std::vector<double> r(std::max(c_.size(), other.c_.size()), 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (std::size_t i = 0; i < other.c_.size(); ++i) r[i] -= other.c_[i];
    return Poly(std::move(r));
}

Poly Poly::operator*(const Poly& other) const {
    std::vector<double> r(c_.size() + other.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < other.c_.size(); ++j)
            r[i + j] += c_[i] * other.c_[j];
    return Poly(std::move(r));
}

Poly Poly::operator*(double s) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= s;
    return Poly(std::move(r));
}

namespace {

// Parlett-Reinsch style balancing: scale row/column pairs by powers of two
// until the 1-norms stop improving.
void balance_in_place(Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd off = m;
    off.diagonal().setZero();
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double row_norm = off.row(i).lpNorm<1>();
            const double col_norm = off.col(i).lpNorm<1>();
            if (row_norm == 0.0 || col_norm == 0.0) continue;
            int exponent = 0;
            std::frexp(row_norm / col_norm, &exponent);
            exponent /= 2;
            if (exponent == 0) continue;
            const double scaled_col = std::ldexp(col_norm, exponent);
            const double scaled_row = std::ldexp(row_norm, -exponent);
            if (scaled_col + scaled_row < 0.9 * (col_norm + row_norm)) {
                changed = true;
                off.row(i) *= std::ldexp(1.0, -exponent);
                off.col(i) *= std::ldexp(1.0, exponent);
            }
        }
    }
    off.diagonal() = m.diagonal();
    m = off;
}

}  // namespace

std::vector<double> find_real_roots(const Poly& p, double imag_tol) {
    std::vector<double> coeffs = p.coeffs();
    const double max_abs = p.max_abs_coeff();
    if (max_abs == 0.0) return {};

    // deflate negligible leading coefficients
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13 * max_abs)
        coeffs.pop_back();

    const int degree = static_cast<int>(coeffs.size()) - 1;
    std::vector<double> roots;
    if (degree < 1) return roots;
    if (degree == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    if (degree == 2) {
        const double a = coeffs[2], b = coeffs[1], c = coeffs[0];
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return roots;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
        roots.push_back(q / a);
        if (q != 0.0) roots.push_back(c / q);
        else roots.push_back(-b / (2.0 * a));
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    companion.diagonal(-1).setOnes();
    for (int i = 0; i < degree; ++i)
        companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();

    balance_in_place(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("companion-matrix eigenvalue computation failed");

    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const auto ev = solver.eigenvalues()[i];
        if (std::abs(ev.imag()) < imag_tol * (1.0 + std::abs(ev.real())))
            roots.push_back(ev.real());
    }

    // Guarded Newton polish against the deflated polynomial.
    const Poly deflated(coeffs);
    const Poly deriv = deflated.derivative();
    for (double& r : roots) {
        for (int it = 0; it < 2; ++it) {
            const double f = deflated.eval(r);
            const double df = deriv.eval(r);
            if (df == 0.0) break;
            const double next = r - f / df;
            if (!std::isfinite(next) || std::abs(deflated.eval(next)) >= std::abs(f)) break;
            r = next;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace tripose
