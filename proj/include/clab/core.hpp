#pragma once

// Shared scalar types, a 2x2 complex matrix and the error hierarchy.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace clab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Square root with Im >= 0 on all of C. On the negative real axis this is
/// the boundary value from the upper half-plane, i.e. sqrt(-r) = i sqrt(r).
inline cplx sqrt_upper(cplx z) {
  if (z.imag() == 0.0) {
    return z.real() >= 0.0 ? cplx(std::sqrt(z.real()), 0.0) : cplx(0.0, std::sqrt(-z.real()));
  }
  cplx r = std::sqrt(z);
  return r.imag() < 0.0 ? -r : r;
}

struct Mat2 {
  cplx a{}, b{}, c{}, d{};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  cplx det() const { return a * d - b * c; }
  Mat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend Mat2 operator*(const Mat2& x, double s) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend Mat2 operator*(double s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  Mat2& operator+=(const Mat2& y) { return *this = *this + y; }
};

inline double max_abs(const Mat2& m) {
  return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

/// Entrywise max-norm; lets Mat2 flow through the generic quadrature.
inline double abs(const Mat2& m) { return max_abs(m); }

/// Smallest eigenvalue of the Hermitian part (M + M*)/2.
inline double min_hermitian_eigenvalue(const Mat2& m) {
  const double p = m.a.real();
  const double q = m.d.real();
  const cplx off = 0.5 * (m.b + std::conj(m.c));
  const double half = 0.5 * (p - q);
  return 0.5 * (p + q) - std::sqrt(half * half + std::norm(off));
}

/// Largest deviation of M from M*.
inline double hermitian_defect(const Mat2& m) { return max_abs(m - m.adjoint()); }

/// The symplectic form j = [[0,-1],[1,0]].
inline Mat2 j_matrix() { return {0.0, -1.0, 1.0, 0.0}; }

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation past the end of tabulated data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// ODE integration gave up (step size underflow).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double position)
      : Error(what + " at x = " + std::to_string(position)), position_(position) {}
  double position() const { return position_; }

 private:
  double position_;
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace clab
