#include "nk/forms6.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "nk/errors.hpp"

namespace nk {

namespace {

struct IndexTables {
  std::array<std::vector<std::uint8_t>, kDim + 1> masks;
  std::array<std::size_t, 64> position{};

  IndexTables() {
    // Lexicographic order on increasing tuples: enumerate tuples recursively.
    for (int k = 0; k <= kDim; ++k) {
      std::vector<int> tuple;
      auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(tuple.size()) == k) {
          std::uint8_t m = 0;
          for (int i : tuple) m |= static_cast<std::uint8_t>(1u << i);
          position[m] = masks[k].size();
          masks[k].push_back(m);
          return;
        }
        for (int i = start; i < kDim; ++i) {
          tuple.push_back(i);
          self(self, i + 1);
          tuple.pop_back();
        }
      };
      rec(rec, 0);
    }
  }
};

const IndexTables& tables() {
  static const IndexTables t;
  return t;
}

// Sign of the shuffle that sorts the concatenation (A, B) of two disjoint
// increasing index sets.
double merge_sign(std::uint8_t a, std::uint8_t b) {
  int inversions = 0;
  for (int y = 0; y < kDim; ++y) {
    if (b & (1u << y)) {
      inversions += std::popcount(static_cast<unsigned>(a) & ~((2u << y) - 1u));
    }
  }
  return (inversions & 1) ? -1.0 : 1.0;
}

void check_same_degree(const KForm& a, const KForm& b) {
  if (a.degree() != b.degree()) throw DomainError("KForm: degree mismatch");
}

}  // namespace

int binomial6(int k) {
  static constexpr std::array<int, 7> c{1, 6, 15, 20, 15, 6, 1};
  if (k < 0 || k > kDim) return 0;
  return c[static_cast<std::size_t>(k)];
}

std::size_t form_index(std::uint8_t mask) { return tables().position[mask & 63u]; }

KForm::KForm(int degree) : degree_(degree) {
  if (degree < 0 || degree > kDim) throw DomainError("KForm: degree " + std::to_string(degree));
  coeffs_.assign(static_cast<std::size_t>(binomial6(degree)), 0.0);
}

KForm::KForm(int degree, std::vector<double> coeffs) : KForm(degree) {
  if (coeffs.size() != coeffs_.size()) {
    throw DomainError("KForm: expected " + std::to_string(coeffs_.size()) + " coefficients, got " +
                      std::to_string(coeffs.size()));
  }
  coeffs_ = std::move(coeffs);
}

KForm KForm::basis(std::initializer_list<int> indices) {
  KForm out(static_cast<int>(indices.size()));
  std::vector<int> idx(indices);
  std::uint8_t m = 0;
  for (int i : idx) {
    if (i < 0 || i >= kDim) throw DomainError("KForm::basis: index out of range");
    if (m & (1u << i)) return out;
    m |= static_cast<std::uint8_t>(1u << i);
  }
  int inversions = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      if (idx[i] > idx[j]) ++inversions;
  out.coeffs_[form_index(m)] = (inversions & 1) ? -1.0 : 1.0;
  return out;
}

double KForm::at(std::initializer_list<int> sorted_indices) const {
  if (static_cast<int>(sorted_indices.size()) != degree_) throw DomainError("KForm::at: wrong arity");
  std::uint8_t m = 0;
  int prev = -1;
  for (int i : sorted_indices) {
    if (i <= prev || i >= kDim) throw DomainError("KForm::at: indices must be increasing in 0..5");
    m |= static_cast<std::uint8_t>(1u << i);
    prev = i;
  }
  return coeffs_[form_index(m)];
}

std::uint8_t KForm::mask(std::size_t i) const { return tables().masks[static_cast<std::size_t>(degree_)][i]; }

double KForm::evaluate(std::span<const Vec6> vectors) const {
  if (static_cast<int>(vectors.size()) != degree_) throw DomainError("KForm::evaluate: wrong number of vectors");
  KForm cur = *this;
  for (const Vec6& v : vectors) cur = interior(v, cur);
  return cur.coeffs_[0];
}

double KForm::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

KForm& KForm::operator+=(const KForm& o) {
  check_same_degree(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

KForm& KForm::operator-=(const KForm& o) {
  check_same_degree(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

KForm& KForm::operator*=(double c) {
  for (double& x : coeffs_) x *= c;
  return *this;
}

KForm wedge(const KForm& a, const KForm& b) {
  const int k = a.degree() + b.degree();
  if (k > kDim) throw DomainError("wedge: degree overflow");
  KForm out(k);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::uint8_t ma = a.mask(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::uint8_t mb = b.mask(j);
      if ((ma & mb) || b[j] == 0.0) continue;
      out[form_index(ma | mb)] += merge_sign(ma, mb) * a[i] * b[j];
    }
  }
  return out;
}

KForm interior(const Vec6& v, const KForm& a) {
  if (a.degree() < 1) throw DomainError("interior: degree 0 form");
  KForm out(a.degree() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    const std::uint8_t m = a.mask(i);
    int pos = 0;
    for (int e = 0; e < kDim; ++e) {
      if (!(m & (1u << e))) continue;
      if (v[e] != 0.0) {
        const double sign = (pos & 1) ? -1.0 : 1.0;
        out[form_index(static_cast<std::uint8_t>(m & ~(1u << e)))] += sign * v[e] * a[i];
      }
      ++pos;
    }
  }
  return out;
}

KForm pullback(const Endo6& m, const KForm& a) {
  KForm out(a.degree());
  std::vector<Vec6> vs(static_cast<std::size_t>(a.degree()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t mk = out.mask(i);
    std::size_t n = 0;
    for (int e = 0; e < kDim; ++e)
      if (mk & (1u << e)) vs[n++] = m.col(e);
    out[i] = a.evaluate(vs);
  }
  return out;
}

double top_coefficient(const KForm& top) {
  if (top.degree() != kDim) throw DomainError("top_coefficient: not a 6-form");
  return top[0];
}

const char* to_string(StabilityClass::Tag tag) {
  switch (tag) {
    case StabilityClass::Tag::NegativeOrbit: return "NegativeOrbit";
    case StabilityClass::Tag::NullCone: return "NullCone";
    case StabilityClass::Tag::PositiveOrbit: return "PositiveOrbit";
  }
  return "?";
}

Endo6 hitchin_endomorphism(const KForm& theta, const KForm& vol) {
  if (theta.degree() != 3) throw DomainError("hitchin_endomorphism: theta must be a 3-form");
  const double v = top_coefficient(vol);
  if (v == 0.0) throw DomainError("hitchin_endomorphism: vol = 0");
  Endo6 s = Endo6::Zero();
  for (int j = 0; j < kDim; ++j) {
    const KForm rho = wedge(interior(Vec6::Unit(j), theta), theta);
    for (int i = 0; i < kDim; ++i) {
      s(i, j) = top_coefficient(wedge(rho, KForm::basis({i}))) / v;
    }
  }
  return s;
}

StabilityClass stability_invariant(const KForm& theta, const KForm& vol) {
  const Endo6 s = hitchin_endomorphism(theta, vol);
  const Endo6 s2 = s * s;
  const double p = s2.trace() / kDim;
  const double residual = (s2 - p * Endo6::Identity()).cwiseAbs().maxCoeff();

  const double th = theta.max_abs();
  const double scale = th * th * th * th / (vol[0] * vol[0]);
  if (residual > 1e-8 * (1.0 + scale)) {
    throw ConsistencyError("stability_invariant: S^2 is not proportional to the identity (residual " +
                           std::to_string(residual) + ")");
  }
  const double eps = 1e-9 * scale;
  StabilityClass::Tag tag = StabilityClass::Tag::NullCone;
  if (p < -eps) tag = StabilityClass::Tag::NegativeOrbit;
  else if (p > eps) tag = StabilityClass::Tag::PositiveOrbit;
  return {tag, p, residual};
}

Endo6 complex_structure(const KForm& theta, const KForm& vol) {
  const StabilityClass c = stability_invariant(theta, vol);
  if (c.tag != StabilityClass::Tag::NegativeOrbit) {
    throw NotStableError("complex_structure: P = " + std::to_string(c.value) + " is not negative");
  }
  return hitchin_endomorphism(theta, vol) / std::sqrt(-c.value);
}

std::pair<KForm, KForm> complex_volume_form(const KForm& theta, const KForm& vol) {
  const Endo6 j = complex_structure(theta, vol);
  return {0.5 * theta, 0.5 * pullback(j, theta)};
}

}  // namespace nk
