#pragma once

// Polarization of homogeneous polynomial fields: the unique symmetric
// multilinear form F with F(x,...,x) = f(x).
//
// Storage is one symmetric coefficient per exponent multi-index: the
// monomial c * x^e of a degree-m polynomial contributes the coefficient
// c / multinomial(m; e) at index e. Evaluation sums over the distinct
// assignments of arguments to monomial factors (multiset permutations), so
// memory stays O(#monomials) and no symmetric copies are stored.

#include <algorithm>
#include <map>
#include <vector>

#include "polarint/linalg.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

template <typename S>
class SymMultilinearForm {
 public:
  using CoeffMap = std::map<std::vector<int>, S>;

  SymMultilinearForm() = default;
  SymMultilinearForm(int order, int dimension, std::vector<CoeffMap> coeffs)
      : order_(order), dimension_(dimension), coeffs_(std::move(coeffs)) {}

  int order() const { return order_; }          // number of vector arguments
  int dimension() const { return dimension_; }  // n
  int output_arity() const { return int(coeffs_.size()); }  // n (field) or 1 (scalar)
  const std::vector<CoeffMap>& coefficients() const { return coeffs_; }

 private:
  int order_ = 0;
  int dimension_ = 0;
  std::vector<CoeffMap> coeffs_;
};

namespace detail {

inline std::vector<int> index_sequence_of(const std::vector<int>& exps) {
  std::vector<int> idx;
  for (size_t i = 0; i < exps.size(); ++i)
    for (int e = 0; e < exps[i]; ++e) idx.push_back(int(i));
  return idx;
}

// Sum over distinct assignments of the arguments to the factors of x^exps:
// for each distinct permutation p of the coordinate multiset, the product
// args[0][p_0] * ... * args[m-1][p_{m-1}]. |exps| must equal args.size().
template <typename S>
S symmetric_contraction(const std::vector<int>& exps, const std::vector<const Vec<S>*>& args) {
  std::vector<int> idx = index_sequence_of(exps);
  S acc(0);
  do {
    S term(1);
    for (size_t s = 0; s < idx.size(); ++s) term *= (*args[s])[idx[s]];
    acc += term;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return acc;
}

template <typename S>
std::vector<const Vec<S>*> arg_ptrs(const std::vector<Vec<S>>& args) {
  std::vector<const Vec<S>*> p;
  p.reserve(args.size());
  for (const auto& a : args) p.push_back(&a);
  return p;
}

template <typename S>
void check_args(const SymMultilinearForm<S>& F, const std::vector<const Vec<S>*>& args,
                size_t expected) {
  if (args.size() != expected) throw field_error("eval_form: wrong argument count");
  for (const auto* a : args)
    if (int(a->size()) != F.dimension()) throw field_error("eval_form: argument length != dimension");
}

}  // namespace detail

template <typename S>
SymMultilinearForm<S> polarize(const PolyVectorField<S>& f, int order_hint = -1) {
  auto deg = f.homogeneous_degree();
  if (f.is_zero_field()) {
    if (order_hint < 1) throw field_error("polarize: zero field needs an explicit order");
    deg = order_hint;
  }
  if (!deg) throw field_error("polarize: field is not homogeneous");
  if (order_hint > 0 && *deg != order_hint) throw field_error("polarize: order hint mismatch");
  int m = *deg;
  if (m < 1) throw field_error("polarize: degree must be >= 1");
  std::vector<typename SymMultilinearForm<S>::CoeffMap> coeffs(f.dimension());
  for (int i = 0; i < f.dimension(); ++i)
    for (const auto& mono : f.components()[i])
      coeffs[i][mono.exponents] = mono.coeff / S(multinomial(m, mono.exponents));
  return SymMultilinearForm<S>(m, f.dimension(), std::move(coeffs));
}

template <typename S>
SymMultilinearForm<S> polarize(const ScalarPoly<S>& h, int order_hint = -1) {
  auto deg = h.homogeneous_degree();
  if (h.is_zero_poly()) {
    if (order_hint < 1) throw field_error("polarize: zero polynomial needs an explicit order");
    deg = order_hint;
  }
  if (!deg) throw field_error("polarize: polynomial is not homogeneous");
  if (order_hint > 0 && *deg != order_hint) throw field_error("polarize: order hint mismatch");
  int m = *deg;
  if (m < 1) throw field_error("polarize: degree must be >= 1");
  std::vector<typename SymMultilinearForm<S>::CoeffMap> coeffs(1);
  for (const auto& mono : h.monomials)
    coeffs[0][mono.exponents] = mono.coeff / S(multinomial(m, mono.exponents));
  return SymMultilinearForm<S>(m, h.dimension, std::move(coeffs));
}

template <typename S>
Vec<S> eval_form(const SymMultilinearForm<S>& F, const std::vector<const Vec<S>*>& args) {
  detail::check_args(F, args, size_t(F.order()));
  Vec<S> out(F.output_arity(), S(0));
  for (int comp = 0; comp < F.output_arity(); ++comp)
    for (const auto& [e, c] : F.coefficients()[comp])
      out[comp] += c * detail::symmetric_contraction(e, args);
  return out;
}

template <typename S>
Vec<S> eval_form(const SymMultilinearForm<S>& F, const std::vector<Vec<S>>& args) {
  return eval_form(F, detail::arg_ptrs(args));
}

template <typename S>
S eval_scalar_form(const SymMultilinearForm<S>& F, const std::vector<Vec<S>>& args) {
  if (F.output_arity() != 1) throw field_error("eval_scalar_form: form is vector-valued");
  return eval_form(F, args)[0];
}

// Inclusion-exclusion oracle: evaluates the polarization through field
// evaluations at the 2^m - 1 nonempty subset means, rescaled by homogeneity.
// Structurally independent of polarize(); kept as the cross-check path.
template <typename S>
Vec<S> eval_form_subsets(const PolyVectorField<S>& f, const std::vector<Vec<S>>& args) {
  auto deg = f.homogeneous_degree();
  if (!f.is_zero_field() && (!deg || *deg != int(args.size())))
    throw field_error("eval_form_subsets: degree must equal argument count");
  int m = int(args.size());
  int n = f.dimension();
  Vec<S> acc(n, S(0));
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    int sz = __builtin_popcount(mask);
    Vec<S> mean(n, S(0));
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) mean = vec_add(mean, args[i]);
    S inv_sz = S(1) / S(sz);
    mean = vec_scale(inv_sz, mean);
    S weight = pow_int(S(sz), m);
    if ((m - sz) % 2 != 0) weight = -weight;
    acc = vec_add(acc, vec_scale(weight, f.evaluate(mean)));
  }
  long mfact = 1;
  for (int i = 2; i <= m; ++i) mfact *= i;
  S inv_mfact = S(1) / S(mfact);
  return vec_scale(inv_mfact, acc);
}

// M with M v = F(args..., v); args has order-1 entries. Column c collects,
// per multi-index e with e_c > 0, the partial contraction over e - delta_c.
template <typename S>
Mat<S> contract_to_matrix(const SymMultilinearForm<S>& F, const std::vector<Vec<S>>& args) {
  if (F.output_arity() != F.dimension())
    throw field_error("contract_to_matrix: form is not vector-valued");
  auto ptrs = detail::arg_ptrs(args);
  detail::check_args(F, ptrs, size_t(F.order()) - 1);
  int n = F.dimension();
  Mat<S> M(n, n);
  std::vector<int> reduced(n);
  for (int comp = 0; comp < n; ++comp)
    for (const auto& [e, coef] : F.coefficients()[comp])
      for (int c = 0; c < n; ++c) {
        if (e[c] == 0) continue;
        reduced = e;
        reduced[c] -= 1;
        M(comp, c) += coef * detail::symmetric_contraction(reduced, ptrs);
      }
  return M;
}

// Bilinear contraction of the integer-normalized symmetric tensor
// T = m! * F of a scalar form F (m = F.order()): returns the matrix B with
// u^T B v = T(args..., u, v). With k equal arguments x this is k! * H''(x)
// for the source polynomial H.
template <typename S>
Mat<S> contract_to_bilinear(const SymMultilinearForm<S>& F, const std::vector<Vec<S>>& args) {
  if (F.output_arity() != 1) throw field_error("contract_to_bilinear: form is not scalar-valued");
  auto ptrs = detail::arg_ptrs(args);
  detail::check_args(F, ptrs, size_t(F.order()) - 2);
  int n = F.dimension();
  int m = F.order();
  long mfact = 1;
  for (int i = 2; i <= m; ++i) mfact *= i;
  Mat<S> B(n, n);
  std::vector<int> reduced(n);
  for (const auto& [e, coef] : F.coefficients()[0])
    for (int c1 = 0; c1 < n; ++c1) {
      if (e[c1] == 0) continue;
      for (int c2 = 0; c2 < n; ++c2) {
        if (e[c2] - (c1 == c2 ? 1 : 0) <= 0) continue;
        reduced = e;
        reduced[c1] -= 1;
        reduced[c2] -= 1;
        B(c1, c2) += coef * detail::symmetric_contraction(reduced, ptrs);
      }
    }
  return B.scaled(S(mfact));
}

}  // namespace polarint
