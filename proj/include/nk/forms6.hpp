#pragma once

// Exterior algebra on a fixed oriented 6-dimensional real vector space V with
// basis e_0..e_5 and dual basis e^0..e^5, plus Hitchin's invariant theory of
// 3-forms (the endomorphism S, the quartic P, the complex structure J).
//
// A k-form is stored by its coefficients on e^{i1...ik}, i1 < ... < ik, in
// lexicographic order of the index tuples. Indices are 0-based throughout.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nk {

inline constexpr int kDim = 6;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Endo6 = Eigen::Matrix<double, 6, 6>;

// Number of k-subsets of {0..5}.
int binomial6(int k);

class KForm {
 public:
  KForm() : KForm(0) {}
  explicit KForm(int degree);
  KForm(int degree, std::vector<double> coeffs);

  // e^{i1} ^ ... ^ e^{ik}; indices may be given in any order (the sign of the
  // sorting permutation is applied), repeated indices give the zero form.
  static KForm basis(std::initializer_list<int> indices);
  static KForm volume() { return basis({0, 1, 2, 3, 4, 5}); }

  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  // Coefficient on e^{I} for a strictly increasing tuple I.
  double at(std::initializer_list<int> sorted_indices) const;

  // Bitmask (bit i set for index i) of the i-th basis element of this degree.
  std::uint8_t mask(std::size_t i) const;

  // a(v_1, ..., v_k); requires exactly degree() vectors.
  double evaluate(std::span<const Vec6> vectors) const;

  double max_abs() const;

  KForm& operator+=(const KForm& o);
  KForm& operator-=(const KForm& o);
  KForm& operator*=(double c);
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator-(KForm a) { return a *= -1.0; }
  friend KForm operator*(double c, KForm a) { return a *= c; }
  friend KForm operator*(KForm a, double c) { return a *= c; }

 private:
  int degree_;
  std::vector<double> coeffs_;
};

// Index of the basis element with the given bitmask within its degree.
std::size_t form_index(std::uint8_t mask);

KForm wedge(const KForm& a, const KForm& b);
KForm interior(const Vec6& v, const KForm& a);
// (M^* a)(v_1, ..., v_k) = a(M v_1, ..., M v_k).
KForm pullback(const Endo6& m, const KForm& a);

// Coefficient of a top form; the basis element is e^{012345}.
double top_coefficient(const KForm& top);

struct StabilityClass {
  enum class Tag { NegativeOrbit, NullCone, PositiveOrbit };
  Tag tag;
  double value;     // P(theta)
  double residual;  // max off-diagonal / diagonal spread of S^2 - P Id
};

const char* to_string(StabilityClass::Tag tag);

// S_theta defined by (iota_v theta ^ theta) ^ beta = beta(S_theta v) vol for
// every covector beta. Columns are the images of the basis vectors.
Endo6 hitchin_endomorphism(const KForm& theta, const KForm& vol);

// P read off from the diagonal of S^2 and classified with the relative
// tolerance 1e-9 |theta|^4 / |vol|^2.
StabilityClass stability_invariant(const KForm& theta, const KForm& vol);

// J = S / sqrt(-P); throws NotStableError when P >= 0.
Endo6 complex_structure(const KForm& theta, const KForm& vol);

// (Re alpha, Im alpha) = (theta/2, J^* theta / 2).
std::pair<KForm, KForm> complex_volume_form(const KForm& theta, const KForm& vol);

}  // namespace nk
