#pragma once

// The Schrodinger equation as a canonical system J Y' = (z A + B) Y with
// A = diag(1, 0): j-forms of the transfer matrix, the kernel read off from
// them, and the Hermite-Biehler function E_L = v(L, .) + i v'(L, .).

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "clab/cd_kernel.hpp"
#include "clab/core.hpp"
#include "clab/potential.hpp"
#include "clab/schrodinger.hpp"

namespace clab {

struct JForm {
  double x1 = 0.0, x2 = 0.0;
  cplx z{};
  /// i (T*(x2) j T(x2) - T*(x1) j T(x1))
  Mat2 matrix;
  /// 2 Im z int_{x1}^{x2} T* A T, computed by quadrature.
  Mat2 quadrature;
  double quadrature_error = 0.0;

  double hermitian_defect() const { return clab::hermitian_defect(matrix); }
  double min_eigenvalue() const { return min_hermitian_eigenvalue(matrix); }
  double factorization_defect() const { return max_abs(matrix - quadrature); }
};

namespace detail {

// int T(s,w)* A T(s,z) ds expressed through the solution Gram matrix.
inline Mat2 integrated_tat(const GramResult& g) { return {g.G.a, -g.G.c, -g.G.b, g.G.d}; }

}  // namespace detail

inline JForm j_form(const Potential& V, cplx z, double x1, double x2, double tol = 1e-12) {
  if (!(x1 >= 0.0 && x2 >= x1)) throw DomainError("j_form: need 0 <= x1 <= x2");
  Propagator p(V, z, {tol});
  p.advance_to(x1);
  const Mat2 T1 = p.frame().transfer();
  p.advance_to(x2);
  const Mat2 T2 = p.frame().transfer();
  const Mat2 j = j_matrix();
  JForm out;
  out.x1 = x1;
  out.x2 = x2;
  out.z = z;
  out.matrix = cplx(0.0, 1.0) * (T2.adjoint() * j * T2 - T1.adjoint() * j * T1);
  const GramResult g = solution_gram(V, z, z, x1, x2, tol);
  out.quadrature = 2.0 * z.imag() * detail::integrated_tat(g);
  out.quadrature_error = 2.0 * std::abs(z.imag()) * g.error;
  return out;
}

/// (T(L,w)* j T(L,z) - j)_{11} / (conj w - z). Near the diagonal the
/// quotient is handed to the derivative route of kernel_boundary.
inline cplx kernel_via_jform(const Potential& V, double L, cplx z, cplx w, double tol = 1e-12) {
  if (!(L > 0.0)) throw DomainError("kernel_via_jform: L must be positive");
  const cplx delta = std::conj(w) - z;
  if (std::abs(delta) < near_diagonal_threshold) return kernel_boundary(V, L, z, w, tol).value;
  const Mat2 Tz = integrate_frame(V, z, L, tol).transfer();
  const Mat2 Tw = integrate_frame(V, w, L, tol).transfer();
  const Mat2 form = Tw.adjoint() * j_matrix() * Tz - j_matrix();
  return form.a / delta;
}

struct HermiteBiehler {
  double L = 0.0;
  cplx z{};
  cplx E_value{};  // v(L, z) + i v'(L, z)
  cplx E_sharp{};  // conj(E(conj z)) = v(L, z) - i v'(L, z)
  double ratio() const { return std::abs(E_sharp) / std::abs(E_value); }
};

inline HermiteBiehler hermite_biehler(const Potential& V, double L, cplx z, double tol = 1e-12) {
  const SolutionFrame f = integrate_frame(V, z, L, tol);
  const cplx i(0.0, 1.0);
  return {L, z, f.v + i * f.dv, f.v - i * f.dv};
}

struct HBReport {
  bool ok = true;
  double worst_ratio = 0.0;
  std::vector<cplx> violations;
};

/// |E^#(z) / E(z)| <= 1 + 1e-12 at every sample; E(z) = 0 counts as a violation.
inline HBReport hb_check_report(const Potential& V, double L, const std::vector<cplx>& samples, double tol = 1e-12) {
  HBReport rep;
  for (cplx z : samples) {
    if (!(z.imag() > 0.0)) throw DomainError("hb_check: samples must lie in the open upper half-plane");
    const HermiteBiehler h = hermite_biehler(V, L, z, tol);
    if (h.E_value == 0.0) {
      rep.ok = false;
      rep.violations.push_back(z);
      continue;
    }
    const double r = h.ratio();
    rep.worst_ratio = std::max(rep.worst_ratio, r);
    if (!(r <= 1.0 + 1e-12)) {
      rep.ok = false;
      rep.violations.push_back(z);
    }
  }
  return rep;
}

inline bool hb_check(const Potential& V, double L, const std::vector<cplx>& samples) {
  return hb_check_report(V, L, samples).ok;
}

}  // namespace clab
