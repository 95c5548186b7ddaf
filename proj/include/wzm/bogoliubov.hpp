#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "wzm/modes.hpp"
#include "wzm/moments.hpp"

namespace wzm {

using complexd = std::complex<double>;

// Reflection amplitude r = sqrt(1 - t^2). Tiny negative radicands from
// rounding at t = 1 are clamped to zero so the endpoint stays exact.
inline double reflection_amplitude(double t) {
  const double rad = 1.0 - t * t;
  return rad > 0.0 ? std::sqrt(rad) : 0.0;
}

// Linear map on the mode operators,
//   a'_j = sum_k [ A(j,k) a_k + B(j,k) a^dag_k ].
// Valid transforms preserve the commutation relations:
//   A A^H - B B^H = I   and   A B^T - B A^T = 0.
struct BogoliubovTransform {
  Eigen::Matrix4cd A;  // coefficients of annihilation operators
  Eigen::Matrix4cd B;  // coefficients of creation operators
};

inline BogoliubovTransform identity_transform(const ModeLayout& = {}) {
  return {Eigen::Matrix4cd::Identity(), Eigen::Matrix4cd::Zero()};
}

// Two-mode squeezer exp[-i chi (a b + a^dag b^dag)] on (mode_a, mode_b):
//   a'_a = a_a cosh(chi) - i a^dag_b sinh(chi)
//   a'_b = a_b cosh(chi) - i a^dag_a sinh(chi)
inline BogoliubovTransform two_mode_squeezer(const ModeLayout& layout,
                                             ModeId mode_a, ModeId mode_b,
                                             double chi) {
  if (mode_a == mode_b)
    throw std::invalid_argument("two_mode_squeezer: modes must be distinct");
  if (!std::isfinite(chi))
    throw std::invalid_argument("two_mode_squeezer: chi must be finite");

  BogoliubovTransform T = identity_transform(layout);
  const int a = layout.index(mode_a);
  const int b = layout.index(mode_b);
  const double ch = std::cosh(chi);
  const complexd mish{0.0, -std::sinh(chi)};
  T.A(a, a) = ch;
  T.A(b, b) = ch;
  T.B(a, b) = mish;
  T.B(b, a) = mish;
  return T;
}

// Beam splitter coupling `mode_from` into `mode_to` with transmission
// amplitude t and r = sqrt(1 - t^2):
//   a'_to   = t a_from + r a_to
//   a'_from = r a_from - t a_to
// The sign convention is pinned by the coefficient regression on the
// composed chain (see build_chain); t = 0 is the identity and t = 1 swaps
// the modes up to sign.
inline BogoliubovTransform beam_splitter(const ModeLayout& layout,
                                         ModeId mode_from, ModeId mode_to,
                                         double t) {
  if (mode_from == mode_to)
    throw std::invalid_argument("beam_splitter: modes must be distinct");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("beam_splitter: t must lie in [0, 1]");

  BogoliubovTransform T = identity_transform(layout);
  const int f = layout.index(mode_from);
  const int to = layout.index(mode_to);
  const double r = reflection_amplitude(t);
  T.A(to, f) = t;
  T.A(to, to) = r;
  T.A(f, f) = r;
  T.A(f, to) = -t;
  return T;
}

// Heisenberg-picture substitution: `first` acts on the state before
// `second`, and the output operators of `second` are rewritten in terms of
// the initial operators via `first`. Equivalent unitary order: U_second
// applied after U_first.
inline BogoliubovTransform compose(const BogoliubovTransform& second,
                                   const BogoliubovTransform& first) {
  BogoliubovTransform T;
  T.A = second.A * first.A + second.B * first.B.conjugate();
  T.B = second.A * first.B + second.B * first.A.conjugate();
  return T;
}

// Max elementwise residual of A A^H - B B^H = I.
inline double commutator_residual(const BogoliubovTransform& T) {
  const Eigen::Matrix4cd R =
      T.A * T.A.adjoint() - T.B * T.B.adjoint() - Eigen::Matrix4cd::Identity();
  return R.cwiseAbs().maxCoeff();
}

// Max elementwise residual of A B^T - B A^T = 0.
inline double symmetry_residual(const BogoliubovTransform& T) {
  const Eigen::Matrix4cd R = T.A * T.B.transpose() - T.B * T.A.transpose();
  return R.cwiseAbs().maxCoeff();
}

// Vacuum expectation values of the transformed modes:
//   N_jk = <a'^dag_j a'_k> = sum_m conj(B_jm) B_km
//   M_jk = <a'_j a'_k>     = sum_m A_jm B_km
inline MomentSet vacuum_moments(const BogoliubovTransform& T) {
  MomentSet m;
  m.number = T.B.conjugate() * T.B.transpose();
  m.anomalous = T.A * T.B.transpose();
  const int s1 = ModeLayout::index(ModeId::s1);
  const int s2 = ModeLayout::index(ModeId::s2);
  m.n_s1 = m.number(s1, s1).real();
  m.n_s2 = m.number(s2, s2).real();
  m.cross = m.number(s1, s2);
  return m;
}

}  // namespace wzm
