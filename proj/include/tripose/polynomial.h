#ifndef TRIPOSE_POLYNOMIAL_H_
#define TRIPOSE_POLYNOMIAL_H_

#include <initializer_list>
#include <vector>

namespace tripose {

// Dense univariate polynomial, coefficients in ascending degree order.
class Poly {
  public:
    Poly() : c_{0.0} {}
    explicit Poly(std::vector<double> coeffs);
    Poly(std::initializer_list<double> coeffs) : Poly(std::vector<double>(coeffs)) {}
    static Poly constant(double value) { return Poly({value}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coeffs() const { return c_; }
    double operator[](int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
    double max_abs_coeff() const;

    double eval(double x) const;  // Horner
    Poly derivative() const;

    Poly operator+(const Poly& other) const;
    Poly operator-(const Poly& other) const;
    Poly operator*(const Poly& other) const;
    Poly operator*(double s) const;
    Poly& operator+=(const Poly& other) { return *this = *this + other; }
    Poly& operator-=(const Poly& other) { return *this = *this - other; }

  private:
    void trim();
    std::vector<double> c_;
};

// All real roots via companion-matrix eigenvalues (balanced). Eigenvalues
// with |imag| < imag_tol * (1 + |real|) count as real. Near-zero leading
// coefficients (relative to the largest) are deflated first.
std::vector<double> find_real_roots(const Poly& p, double imag_tol = 1e-8);

}  // namespace tripose

#endif  // TRIPOSE_POLYNOMIAL_H_
