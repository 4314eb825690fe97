#pragma once

// The f-system along the normal geodesic, the regular h-system obtained by the
// change of variables s = int dt / f1, its first integrals and constraint
// variety, the finite transformation group T, and an adaptive integrator.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nk/invariant_frame.hpp"

namespace nk {

using State8 = std::array<double, 8>;  // (a1..a4, b1..b4)
using Vec4 = std::array<double, 4>;
// Point of R^7: (a2, a3, a4, b1, b2, b3, b4).
using Point7 = std::array<double, 7>;

struct HState {
  double s = 0.0;
  Vec4 a{};  // h1..h4
  Vec4 b{};  // h1'..h4'
  double mu = 1.0;

  State8 y() const { return {a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]}; }
  static HState from_y(double s, const State8& y, double mu);
  Point7 point7() const { return {a[1], a[2], a[3], b[0], b[1], b[2], b[3]}; }
};

// Residuals of the four second-order equations (frak = sqrt(f4^2 + f5^2)):
//   R1 = [(f2' + f1/4) f1]' + 12 mu f1 f2
//   R2 = [(f3' - f1/4) f1]' + 12 mu f1 f3
//   R3 = (frak' f1)' - 4 frak / f1 + 12 mu f1 frak
//   R4 = f1 (f2' - f3' + f1/2) + 48 mu (f2 f3 - frak^2)
// followed by the algebraic constraint
//   R5 = 4 frak^2 - ((frak')^2 - (f2' + f1/4)(f3' - f1/4)) f1^2.
std::array<double, 5> f_system_residual(const FJet& j, const F5& fpp);

namespace detail {

// Second-order h-system written as a first-order system in (a, b).
template <class T>
std::array<T, 8> h_rhs(const std::array<T, 8>& y, double mu) {
  const T& a2 = y[1];
  const T& a3 = y[2];
  const T& a4 = y[3];
  const T& b1 = y[4];
  const T& b4 = y[7];
  const T den = a2 * a2 - a3 * a3 - a4 * a4;
  const T num = 2.0 * b1 * b1 * a3 + (4.0 / (9.0 * mu)) * b4 * a4;
  const T frac = num / den;
  return {y[4],
          y[5],
          y[6],
          y[7],
          T(-frac),
          T(-24.0 * mu * b1 * a2),
          T(frac - 24.0 * mu * b1 * a3),
          T(-24.0 * mu * b1 * a4 + 4.0 * a4)};
}

}  // namespace detail

double h_denominator(const HState& x);
// |a2^2 - a3^2 - a4^2| < 1e-12 (1 + |a|^2).
bool h_denominator_singular(const HState& x);

// (b, b'); throws SingularError on a vanishing denominator.
State8 h_rhs(const HState& x);

// I1..I4 with the state's mu.
Vec4 first_integrals(const HState& x);

struct MembershipReport {
  Vec4 integrals{};
  bool integrals_vanish = false;
  bool b1_positive = false;
  bool ineq_short = false;  // b2^2 - b3^2 - b4^2 < 0
  bool ineq_long = false;   // b2^2 - b3^2 - b4^2 - b1^2 - 2 b1 b3 < 0
  bool member() const { return integrals_vanish && b1_positive && ineq_short && ineq_long; }
};

MembershipReport membership_report(const HState& x, double tol);
bool n_membership(const HState& x, double tol);

// ---- transformation group --------------------------------------------------

// Element of T acting on R^7, generated by the commuting involutions
//   tau1: (a2, b2) -> -(a2, b2)
//   tau2: (a2, a3, b1, b2, b3) -> -(a2, a3, b1, b2, b3).
// bit 0 = tau1, bit 1 = tau2.
struct TransformTag {
  std::uint8_t bits = 0;
  static constexpr std::uint8_t kOrder = 4;
  static TransformTag identity() { return {0}; }
  static TransformTag tau1() { return {1}; }
  static TransformTag tau2() { return {2}; }
  friend TransformTag operator*(TransformTag x, TransformTag y) {
    return {static_cast<std::uint8_t>(x.bits ^ y.bits)};
  }
  friend bool operator==(TransformTag, TransformTag) = default;
};

// Quadruple curves x(t) = (f1, f2, f3, frak)(t) with the involutions
//   tau1: x(t) -> (-x1(-t), x2(-t), x3(-t), x4(-t))
//   tau2: x(t) -> (-x1, -x2, -x3, x4)(t)
//   tau3: x(t) -> (x1, -x3, -x2, x4)(t)
// bit i = tau_{i+1}; the three commute.
struct QuadrupleTag {
  std::uint8_t bits = 0;
  static constexpr std::uint8_t kOrder = 8;
  static QuadrupleTag identity() { return {0}; }
  static QuadrupleTag tau1() { return {1}; }
  static QuadrupleTag tau2() { return {2}; }
  static QuadrupleTag tau3() { return {4}; }
  friend QuadrupleTag operator*(QuadrupleTag x, QuadrupleTag y) {
    return {static_cast<std::uint8_t>(x.bits ^ y.bits)};
  }
  friend bool operator==(QuadrupleTag, QuadrupleTag) = default;
};

// Value, first and second derivative of a quadruple curve at t.
struct QuadJet {
  Vec4 x{}, xp{}, xpp{};
};
using QuadCurve = std::function<QuadJet(double)>;

Point7 apply_transform(TransformTag tag, const Point7& x);
QuadCurve apply_transform(QuadrupleTag tag, QuadCurve curve);

// (cos, sin) of a phase with round-off below 1e-15 snapped to zero, so that
// theta_o = +-pi/2 gives f4 = 0 exactly.
std::pair<double, double> phase_cos_sin(double theta_o);

// Quadruple jet -> FJet with phase theta_o (f4 = frak cos, f5 = frak sin).
FJet fjet_from_quadruple(double t, const QuadJet& q, double mu, double theta_o, F5* fpp);

// Lexicographically smallest element of the T-orbit; components that differ by
// at most 1e-12 (1 + |x|) are treated as equal.
Point7 canonical_representative(const Point7& x);
double sup_distance(const Point7& x, const Point7& y);

// ---- integration -----------------------------------------------------------

enum class StopReason { Completed, Singularity, StepUnderflow, MaxSteps, NonFinite };
const char* to_string(StopReason r);

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rhs_evaluations = 0;
  StopReason reason = StopReason::Completed;
  std::string message;
};

struct SolutionCurve {
  double mu = 1.0;
  std::vector<double> grid;    // strictly increasing
  std::vector<HState> states;  // one per node
  Vec4 drift{};                // max over the grid of |I^k|
  Vec4 conservation{};         // max over the grid of |I^k(x) - I^k(x_0)|
  SolverStats meta;

  bool completed() const { return meta.reason == StopReason::Completed; }
  bool has_dense() const { return static_cast<bool>(dense_); }
  // Dense evaluation inside [grid.front(), grid.back()].
  HState at(double s) const;

  void set_dense(std::function<State8(double)> f) { dense_ = std::move(f); }
  // Fills drift and conservation from the stored states; x0 is the reference.
  void update_integrals(const HState& x0);

 private:
  std::function<State8(double)> dense_;
};

struct IntegrateOptions {
  std::size_t max_steps = 1'000'000;
  double initial_step = 1e-3;
};

// Integrates from x0 (at x0.s) over [lo, hi], which must contain x0.s; both
// directions are covered when x0.s is interior. Stops before a denominator
// crossing (Singularity) or on step-size collapse (StepUnderflow) and returns
// the part computed so far.
SolutionCurve integrate(const HState& x0, double lo, double hi, double tol, IntegrateOptions opt = {});

// ---- change of variables ---------------------------------------------------

// h-data of a jet at parameter s (a1 is supplied because h1 is a primitive).
HState h_state_from_jet(const FJet& j, double s, double a1);
// h'' obtained by the chain rule from (f, f', f''); independent of h_rhs.
Vec4 h_second_derivatives(const FJet& j, const F5& fpp);

struct FSample {
  double s = 0.0;
  FJet jet;
  F5 fpp{};
};

// s(t) = int_{t_o}^t du / f1, h1 = (1/2) int_{t_o}^t f1 du, h2 = f2 + f3,
// h3 = f2 - f3, h4 = 2 frak. Quadratures are adaptive Gauss-Kronrod with
// relative tolerance quad_tol. The returned grid is sorted in s.
SolutionCurve to_h(const std::function<FJet(double)>& jet, std::span<const double> t_grid, double t_o,
                   double mu, double quad_tol = 1e-13);

// Inverse map at a single state: f1 = -sqrt(2 b1), f2 = (h2 + h3)/2,
// f3 = (h2 - h3)/2, frak = h4/2 placed at phase theta_o; f'' uses the
// derivative of h_rhs along the flow. t is left at 0.
FSample f_sample_from_h(const HState& x, double theta_o = M_PI / 2);

// from_h over a whole curve: t is recovered by integrating dt/ds = f1 from
// the node s_ref (where t = t_ref) using the dense output if present.
std::vector<FSample> from_h(const SolutionCurve& curve, double s_ref, double t_ref, double theta_o = M_PI / 2,
                            double quad_tol = 1e-13);

}  // namespace nk
