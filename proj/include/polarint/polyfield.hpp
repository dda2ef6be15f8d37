#pragma once

// Exact representation and calculus of polynomial vector fields and scalar
// polynomials, as per-component monomial lists. Construction canonicalizes:
// monomials are sorted lexicographically by exponent vector, duplicates are
// merged, zero coefficients are dropped. Structural equality is therefore
// semantic equality.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarint/linalg.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

struct field_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename S>
struct Monomial {
  S coeff;
  std::vector<int> exponents;

  int degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
  }
  bool operator==(const Monomial& o) const {
    return exponents == o.exponents && coeff == o.coeff;
  }
};

namespace detail {

template <typename S>
std::vector<Monomial<S>> canonicalize_monomials(int dimension, std::vector<Monomial<S>> ms) {
  std::map<std::vector<int>, S> merged;
  for (auto& m : ms) {
    if (int(m.exponents.size()) != dimension)
      throw field_error("monomial exponent vector length != dimension");
    for (int e : m.exponents)
      if (e < 0) throw field_error("negative exponent");
    auto it = merged.find(m.exponents);
    if (it == merged.end())
      merged.emplace(std::move(m.exponents), std::move(m.coeff));
    else
      it->second += m.coeff;
  }
  std::vector<Monomial<S>> out;
  for (auto& [e, c] : merged)
    if (!is_zero(c)) out.push_back(Monomial<S>{c, e});
  return out;
}

template <typename S>
S eval_monomials(const std::vector<Monomial<S>>& ms, const Vec<S>& x) {
  S acc(0);
  for (const auto& m : ms) {
    S term = m.coeff;
    for (size_t i = 0; i < x.size(); ++i)
      for (int e = 0; e < m.exponents[i]; ++e) term *= x[i];
    acc += term;
  }
  return acc;
}

}  // namespace detail

template <typename S>
class PolyVectorField {
 public:
  PolyVectorField() = default;
  PolyVectorField(int dimension, std::vector<std::vector<Monomial<S>>> components)
      : dimension_(dimension), components_(std::move(components)) {
    if (int(components_.size()) != dimension_)
      throw field_error("component count != dimension");
    for (auto& comp : components_)
      comp = detail::canonicalize_monomials(dimension_, std::move(comp));
  }

  static PolyVectorField zero(int dimension) {
    return PolyVectorField(dimension, std::vector<std::vector<Monomial<S>>>(dimension));
  }

  int dimension() const { return dimension_; }
  const std::vector<std::vector<Monomial<S>>>& components() const { return components_; }

  bool is_zero_field() const {
    for (const auto& c : components_)
      if (!c.empty()) return false;
    return true;
  }

  Vec<S> evaluate(const Vec<S>& x) const {
    if (int(x.size()) != dimension_) throw field_error("evaluate: point length != dimension");
    Vec<S> out(dimension_, S(0));
    for (int i = 0; i < dimension_; ++i) out[i] = detail::eval_monomials(components_[i], x);
    return out;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& comp : components_)
      for (const auto& m : comp) d = std::max(d, m.degree());
    return d;
  }

  // Degree d such that every monomial has total degree d; nullopt for a
  // mixed-degree field. The zero field reports nullopt (degree undefined).
  std::optional<int> homogeneous_degree() const {
    std::optional<int> d;
    for (const auto& comp : components_)
      for (const auto& m : comp) {
        if (!d)
          d = m.degree();
        else if (*d != m.degree())
          return std::nullopt;
      }
    return d;
  }

  std::map<int, PolyVectorField> degree_split() const {
    std::map<int, std::vector<std::vector<Monomial<S>>>> parts;
    for (int i = 0; i < dimension_; ++i)
      for (const auto& m : components_[i]) {
        auto& p = parts[m.degree()];
        if (p.empty()) p.assign(dimension_, {});
        p[i].push_back(m);
      }
    std::map<int, PolyVectorField> out;
    for (auto& [d, comps] : parts) out.emplace(d, PolyVectorField(dimension_, std::move(comps)));
    return out;
  }

  // Suspends to dimension n+1: appends a coordinate w with zero dynamics and
  // pads every monomial with w^(d - m). The target degree defaults to the
  // maximal degree, floored at 1 so a constant field stays polynomial of
  // degree >= 1.
  PolyVectorField homogenize(int target_degree = -1) const {
    int natural = std::max(max_degree(), 1);
    int d = target_degree < 0 ? natural : target_degree;
    if (d < natural) throw field_error("homogenize: target degree below field degree");
    std::vector<std::vector<Monomial<S>>> comps(dimension_ + 1);
    for (int i = 0; i < dimension_; ++i)
      for (const auto& m : components_[i]) {
        std::vector<int> e = m.exponents;
        e.push_back(d - m.degree());
        comps[i].push_back(Monomial<S>{m.coeff, std::move(e)});
      }
    return PolyVectorField(dimension_ + 1, std::move(comps));
  }

  bool operator==(const PolyVectorField& o) const {
    return dimension_ == o.dimension_ && components_ == o.components_;
  }

 private:
  int dimension_ = 0;
  std::vector<std::vector<Monomial<S>>> components_;
};

template <typename S>
struct ScalarPoly {
  int dimension = 0;
  std::vector<Monomial<S>> monomials;

  ScalarPoly() = default;
  ScalarPoly(int dim, std::vector<Monomial<S>> ms)
      : dimension(dim), monomials(detail::canonicalize_monomials(dim, std::move(ms))) {}

  S evaluate(const Vec<S>& x) const {
    if (int(x.size()) != dimension) throw field_error("evaluate: point length != dimension");
    return detail::eval_monomials(monomials, x);
  }

  bool is_zero_poly() const { return monomials.empty(); }

  std::optional<int> homogeneous_degree() const {
    std::optional<int> d;
    for (const auto& m : monomials) {
      if (!d)
        d = m.degree();
      else if (*d != m.degree())
        return std::nullopt;
    }
    return d;
  }

  bool operator==(const ScalarPoly& o) const {
    return dimension == o.dimension && monomials == o.monomials;
  }
};

template <typename S>
PolyVectorField<S> gradient(const ScalarPoly<S>& h) {
  std::vector<std::vector<Monomial<S>>> comps(h.dimension);
  for (const auto& m : h.monomials)
    for (int i = 0; i < h.dimension; ++i) {
      if (m.exponents[i] == 0) continue;
      std::vector<int> e = m.exponents;
      e[i] -= 1;
      comps[i].push_back(Monomial<S>{m.coeff * S(m.exponents[i]), std::move(e)});
    }
  return PolyVectorField<S>(h.dimension, std::move(comps));
}

template <typename S>
PolyVectorField<S> field_add(const PolyVectorField<S>& a, const PolyVectorField<S>& b) {
  if (a.dimension() != b.dimension()) throw field_error("field_add: dimension mismatch");
  std::vector<std::vector<Monomial<S>>> comps(a.dimension());
  for (int i = 0; i < a.dimension(); ++i) {
    comps[i] = a.components()[i];
    for (const auto& m : b.components()[i]) comps[i].push_back(m);
  }
  return PolyVectorField<S>(a.dimension(), std::move(comps));
}

template <typename S>
PolyVectorField<S> field_scale(const S& c, const PolyVectorField<S>& a) {
  std::vector<std::vector<Monomial<S>>> comps(a.dimension());
  for (int i = 0; i < a.dimension(); ++i)
    for (const auto& m : a.components()[i]) comps[i].push_back(Monomial<S>{c * m.coeff, m.exponents});
  return PolyVectorField<S>(a.dimension(), std::move(comps));
}

// K * gradient-style composition: component i is sum_j K(i,j) * f_j.
template <typename S>
PolyVectorField<S> matrix_apply_field(const Mat<S>& K, const PolyVectorField<S>& f) {
  if (K.cols() != f.dimension()) throw field_error("matrix_apply_field: shape mismatch");
  std::vector<std::vector<Monomial<S>>> comps(K.rows());
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j) {
      if (is_zero(K(i, j))) continue;
      for (const auto& m : f.components()[j])
        comps[i].push_back(Monomial<S>{K(i, j) * m.coeff, m.exponents});
    }
  return PolyVectorField<S>(K.rows(), std::move(comps));
}

template <typename S>
PolyVectorField<S> field_from_scalar_components(int n, std::vector<ScalarPoly<S>> polys) {
  std::vector<std::vector<Monomial<S>>> comps;
  comps.reserve(n);
  for (auto& p : polys) comps.push_back(std::move(p.monomials));
  return PolyVectorField<S>(n, std::move(comps));
}

// Coefficient-wise conversion between scalar modes (used by the reference
// bootstrap, which integrates in double regardless of the run mode).
template <typename To, typename From>
PolyVectorField<To> field_cast(const PolyVectorField<From>& f) {
  std::vector<std::vector<Monomial<To>>> comps(f.dimension());
  for (int i = 0; i < f.dimension(); ++i)
    for (const auto& m : f.components()[i])
      comps[i].push_back(Monomial<To>{To(to_double(m.coeff)), m.exponents});
  return PolyVectorField<To>(f.dimension(), std::move(comps));
}

}  // namespace polarint
