#pragma once

// Nearly Kaehler structures on a tube around the singular orbit S3 (mu = 2).
//
// Odd solutions h of the h-system are written as h_i = s p_i (i = 1, 2, 4)
// and h3 = s (p3 - p1) with even p. With P = (p1..p4), Q = P' the p-system
// reads Q' = A(P)/s^2 + B(P, Q)/s + C(s, P, Q), where (Delta = p3 - p1,
// d = p2^2 - Delta^2 - p4^2)
//
//   A1 = -2 (9 p1^2 Delta + p4^2) / (9 d),            A2 = A3 = A4 = 0,
//   B1 = -2 [q1 + (18 p1 q1 Delta + p4 q4) / (9 d)],  Bi = -2 qi (i > 1),
//   C1 = -2 q1^2 Delta / d,
//   C2 = -48 p1 p2 - 48 s q1 p2,
//   C3 = -48 p1 Delta - 48 s q1 Delta,
//   C4 = -4 p4 (12 p1 - 1) - 48 s q1 p4.
//
// The even power series P = sum P_2n s^2n / (2n)! is fixed by c1 = p1(0) > 0
// through P_0 = (c1, -3 c1 sqrt c1, 0, 3 c1 sqrt c1), and each further
// coefficient solves L_2n P_{2n+2} = D_2n with
//   L_2n = Id - dA / ((2n+2)(2n+1)) - dB/dQ / (2n+1).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nk/models.hpp"
#include "nk/nk_ode.hpp"
#include "nk/taylor.hpp"

namespace nk {

inline constexpr double kSingularMu = 2.0;

// ---- extension conditions ---------------------------------------------------

struct ExtensionJet {
  std::array<double, 5> alpha{};  // f_i(0)
  std::array<double, 5> beta{};   // f_i'(0)
  // Declared parity: f1, f4 even and f2, f3, f5 odd.
  std::string parity = "EOOEO";
};

struct ExtensionReport {
  bool ok = false;             // parity values and both beta relations
  bool nondegenerate = false;  // alpha1 != 0
  bool parity_ok = false;      // alpha2 = alpha3 = alpha5 = 0 and alpha4 = 0
  double beta3_residual = 0.0;  // beta3 - (alpha1/2 + beta2)
  double beta5_residual = 0.0;  // beta5 - (-alpha1/4 - beta2)
};

ExtensionReport extension_conditions(const ExtensionJet& j, double tol = 1e-10);

// Extension jet of an odd h-solution from its data at s = 0 (h4 = 2 f5).
ExtensionJet extension_jet_from_h(const HState& x0);

// ---- p-system ---------------------------------------------------------------

using P4 = std::array<double, 4>;

// Second derivatives of the p-system; throws on s = 0 or a vanishing
// denominator.
P4 p_system_rhs(double s, const P4& p, const P4& q);

namespace detail {

template <class T>
std::array<T, 4> abc_A(const std::array<T, 4>& p) {
  const T delta = p[2] - p[0];
  const T d = p[1] * p[1] - delta * delta - p[3] * p[3];
  const T a1 = -2.0 * (9.0 * p[0] * p[0] * delta + p[3] * p[3]) / (9.0 * d);
  const T zero = 0.0 * p[0];
  return {a1, zero, zero, zero};
}

template <class T>
std::array<T, 4> abc_B(const std::array<T, 4>& p, const std::array<T, 4>& q) {
  const T delta = p[2] - p[0];
  const T d = p[1] * p[1] - delta * delta - p[3] * p[3];
  const T b1 = -2.0 * (q[0] + (18.0 * p[0] * q[0] * delta + p[3] * q[3]) / (9.0 * d));
  return {b1, T(-2.0 * q[1]), T(-2.0 * q[2]), T(-2.0 * q[3])};
}

template <class T>
std::array<T, 4> abc_C(const T& s, const std::array<T, 4>& p, const std::array<T, 4>& q) {
  const T delta = p[2] - p[0];
  const T d = p[1] * p[1] - delta * delta - p[3] * p[3];
  const T sq1 = s * q[0];
  const T c1 = -2.0 * q[0] * q[0] * delta / d;
  const T c2 = -48.0 * p[0] * p[1] - 48.0 * sq1 * p[1];
  const T c3 = -48.0 * p[0] * delta - 48.0 * sq1 * delta;
  const T c4 = -4.0 * p[3] * (12.0 * p[0] - 1.0) - 48.0 * sq1 * p[3];
  return {c1, c2, c3, c4};
}

}  // namespace detail

struct AbcSeries {
  std::array<Series, 4> A, B, C;
};

// A, B, C composed with truncated series P and Q; throws when the constant
// term of the denominator vanishes.
AbcSeries abc_decomposition(const std::array<Series, 4>& p, const std::array<Series, 4>& q);

// Pointwise A, B, C.
AbcSeries abc_pointwise(double s, const P4& p, const P4& q);

P4 initial_p(double c1);

struct AbcJacobians {
  Eigen::Matrix4d dA;     // dA/dP at P_0
  Eigen::Matrix4d dB_dQ;  // dB/dQ at (P_0, 0)
};
AbcJacobians abc_jacobians(double c1);

Eigen::Matrix4d l_matrix(int n, double c1);
// (2n+5)(n+2) / ((n+1)(2n+1)) * ((2n+3)/(2n+1))^3, the determinant of
// l_matrix in closed form.
double l_matrix_det_closed_form(int n);

// ---- power series -----------------------------------------------------------

struct SeriesSolution {
  double c1 = 0.0;
  std::vector<Eigen::Vector4d> coeffs;  // P_0, P_2, ..., P_2N (factorial normalisation)
  double radius_estimate = 0.0;
  // Matrix of the linear system met at each step, divided by (2n+2)(2n+1);
  // equals l_matrix(n, c1).
  std::vector<Eigen::Matrix4d> step_matrices;

  int order() const { return 2 * (static_cast<int>(coeffs.size()) - 1); }
  // Truncated P(s) and Q(s) = P'(s).
  void evaluate(double s, P4& p, P4& q) const;
  // h-state at s built from the series (h_i = s p_i, h3 = s (p3 - p1)).
  HState h_state(double s) const;
};

SeriesSolution series_coefficients(double c1, int N);

// ---- hybrid solver ----------------------------------------------------------

struct SingularOptions {
  double s_max = 0.2;  // may be negative: the solution is then built on [s_max, 0]
  int N = 20;
  std::optional<double> s_switch;  // default min(0.05, 0.25 radius), capped by |s_max|
  double tol = 1e-10;
  int series_nodes = 21;  // grid nodes on the series part, including s = 0
};

struct SingularSolution {
  SolutionCurve curve;  // h-variables, mu = 2, grid covering [0, s_max] (or [s_max, 0])
  SeriesSolution series;
  double s_switch = 0.0;
  double handoff_mismatch = 0.0;  // max |series - ODE| on [s_switch, 1.1 s_switch]
};

// Throws NumericalError when the handoff mismatch exceeds 10 tol. Integrator
// stops are reported in curve.meta.
SingularSolution solve_singular_ivp(double c1, const SingularOptions& opt = {});

// ---- reconstruction and verification ---------------------------------------

struct VerificationReport {
  ExtensionReport extension;

  bool stability_ok = false;
  double max_p_prime = 0.0;       // largest P' over nodes with s != 0 (must be < 0)
  double p_prime_limit_formula = 0.0;  // -4^5 f5'(0)^4 / (9^3 f1(0)^8)
  double p_prime_limit_numeric = 0.0;  // P' at |s| = 1e-4 from the series
  std::string stability_failure;

  bool positivity_ok = false;
  double min_eigenvalue = 0.0;  // over nodes with s != 0
  double max_g_xi_xi_defect = 0.0;

  double s_valid_max = 0.0;  // largest |s| such that every check passes on [0, s]

  bool ok() const { return extension.ok && extension.nondegenerate && stability_ok && positivity_ok; }
};

// P' of d omega relative to the volume form omega^3 (the normalisation in
// which the limit formula holds); needs f4 = 0.
double p_prime(const FJet& j);

struct NkReconstruction {
  SingularSolution solution;
  std::vector<FSample> fcurve;  // f4 = 0, f5 = h4 / 2
  VerificationReport report;
};

NkReconstruction reconstruct_nk(double c1, const SingularOptions& opt = {});

// ---- matching and distinctness ---------------------------------------------

// Sup distance over the curve's nodes between canonical representatives of
// the curve and of the closed-form homogeneous curve.
double singular_model_distance(const SolutionCurve& curve, SingularModel m);
std::optional<SingularModel> match_singular_model(const SolutionCurve& curve, double tol = 1e-6);

// Sup distance of canonical representatives over a uniform grid of n nodes in
// the common range of the two dense curves (s = 0 excluded).
double canonical_curve_distance(const SolutionCurve& x, const SolutionCurve& y, int n = 200);

}  // namespace nk
