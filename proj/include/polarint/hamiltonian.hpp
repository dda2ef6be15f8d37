#pragma once

// Hamiltonian / Poisson structure on top of the polar map.
//
// A spec is a homogeneous polynomial H of degree k+2 together with a
// constant antisymmetric structure matrix K; the field is K grad(H). Let T
// be the integer-normalized symmetric (k+2)-tensor of H (T(x,..,x) =
// (k+2)! H(x), the contract_to_bilinear normalization). The polar step for
// this field solves
//
//     (I - c K S0) x_k = x_0,   S0 = T(x_0,..,x_{k-1},.,.),  c = k h/(k+1)!
//
// and the invariant density of the window map is 1/det(I - c K S0): the
// same matrix the step inverts. Differentiating the step equation gives the
// window-map Jacobian corner block
//
//     dx_k/dx_0 = (I - c K S0)^{-1} (I + c K S1),  S1 = T(x_1,..,x_k,.,.),
//
// and det(I + c K S1) = det(I - c K S1) because K is antisymmetric and S1
// symmetric (transpose + Sylvester), which is exactly the density-ratio
// form. At k = 1 the density reduces to the familiar Kahan form
// 1/det(I - h/2 f'(x)).

#include <optional>
#include <vector>

#include "polarint/linalg.hpp"
#include "polarint/polarize.hpp"
#include "polarint/polarmap.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

template <typename S>
class HamiltonianSpec {
 public:
  // k_hint is only consulted for the zero Hamiltonian, whose degree is
  // undefined.
  static HamiltonianSpec make(ScalarPoly<S> H, Mat<S> K, int k_hint = -1) {
    HamiltonianSpec spec;
    int n = H.dimension;
    if (K.rows() != n || K.cols() != n)
      throw field_error("hamiltonian: K must be n x n for the H dimension");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!(K(i, j) == -K(j, i))) throw field_error("hamiltonian: K must be antisymmetric");
    if (H.is_zero_poly()) {
      if (k_hint < 1) throw field_error("hamiltonian: zero H needs an explicit k");
      spec.k_ = k_hint;
    } else {
      auto deg = H.homogeneous_degree();
      if (!deg) throw field_error("hamiltonian: H must be homogeneous");
      if (*deg < 3) throw field_error("hamiltonian: H must have degree k+2 >= 3");
      spec.k_ = *deg - 2;
      if (k_hint > 0 && spec.k_ != k_hint) throw field_error("hamiltonian: k hint mismatch");
    }
    spec.H_ = std::move(H);
    spec.K_ = std::move(K);
    spec.omega_ = inverse(spec.K_);
    spec.h_form_ = polarize(spec.H_, spec.k_ + 2);
    return spec;
  }

  const ScalarPoly<S>& H() const { return H_; }
  const Mat<S>& K() const { return K_; }
  const SymMultilinearForm<S>& h_form() const { return h_form_; }
  int k() const { return k_; }
  int dimension() const { return H_.dimension; }
  bool has_omega() const { return omega_.has_value(); }
  const Mat<S>& omega() const {
    if (!omega_) throw field_error("hamiltonian: K is not invertible, no symplectic form");
    return *omega_;
  }

  // c = k h / (k+1)!, the coefficient pairing K with the T-contraction in
  // both the step equation and the density.
  S solve_coefficient(const S& h) const {
    long fact = 1;
    for (int i = 2; i <= k_ + 1; ++i) fact *= i;
    return S(k_) * h / S(fact);
  }

  // u^T Omega v, the symplectic pairing of the k-integrals.
  S pairing(const Vec<S>& u, const Vec<S>& v) const { return dot(u, omega().apply(v)); }

 private:
  ScalarPoly<S> H_;
  Mat<S> K_;
  std::optional<Mat<S>> omega_;
  SymMultilinearForm<S> h_form_;
  int k_ = 0;
};

template <typename S>
PolyVectorField<S> hamiltonian_field(const HamiltonianSpec<S>& spec) {
  return matrix_apply_field(spec.K(), gradient(spec.H()));
}

// I - c K S(x_0..x_{k-1}), the matrix the polar step inverts and whose
// determinant the invariant density divides.
template <typename S>
Mat<S> polar_solve_matrix(const HamiltonianSpec<S>& spec, const std::vector<Vec<S>>& window_pts,
                          const S& h) {
  Mat<S> S0 = contract_to_bilinear(spec.h_form(), window_pts);
  S c = spec.solve_coefficient(h);
  return Mat<S>::identity(spec.dimension()) - (spec.K() * S0).scaled(c);
}

// Same step as polar_step(polarize(hamiltonian_field(spec)), w), built from
// the Hamiltonian tensor directly. Kept as a named entry point so the two
// routes can be compared exactly.
template <typename S>
StepResult<S> polar_hamiltonian_step(const HamiltonianSpec<S>& spec, const PolarWindow<S>& w) {
  if (w.k != spec.k()) throw field_error("polar_hamiltonian_step: window size must equal k");
  if (w.dimension() != spec.dimension())
    throw field_error("polar_hamiltonian_step: dimension mismatch");
  if (is_zero(w.h)) throw field_error("polar_hamiltonian_step: zero step size");
  Mat<S> A = polar_solve_matrix(spec, w.points, w.h);
  auto sol = solve_linear(A, w.points.front());
  StepResult<S> out;
  out.solve_condition = sol.condition;
  if (sol.singular) {
    out.singular = true;
    return out;
  }
  out.new_point = std::move(sol.x);
  return out;
}

template <typename S>
struct KIntegralSet {
  std::vector<S> values;      // omega(x_0,x_1), ..., omega(x_{k-1},x_k)
  std::vector<S> normalized;  // values / (h (k+2)); the modified energies
};

// The k pairings along an extended window x_0..x_k. Requires invertible K.
template <typename S>
KIntegralSet<S> k_integrals(const HamiltonianSpec<S>& spec, const std::vector<Vec<S>>& pts,
                            const S& h) {
  if (int(pts.size()) != spec.k() + 1)
    throw field_error("k_integrals: expected k+1 points");
  if (is_zero(h)) throw field_error("k_integrals: zero step size");
  KIntegralSet<S> out;
  S denom = h * S(spec.k() + 2);
  for (int m = 0; m < spec.k(); ++m) {
    S v = spec.pairing(pts[m], pts[m + 1]);
    out.normalized.push_back(v / denom);
    out.values.push_back(std::move(v));
  }
  return out;
}

// All consecutive pairings omega(x_m, x_{m+1}) along a trajectory.
template <typename S>
std::vector<S> k_integral_series(const HamiltonianSpec<S>& spec, const std::vector<Vec<S>>& pts) {
  std::vector<S> out;
  for (size_t m = 0; m + 1 < pts.size(); ++m)
    out.push_back(spec.pairing(pts[m], pts[m + 1]));
  return out;
}

template <typename S>
struct MeasureDensity {
  S c_measure = S(0);  // k h / (k+1)!
  S det = S(0);        // det(I - c K S)
  S density = S(0);    // 1/det when defined
  bool defined = false;
};

// Density of the invariant measure of the window map at (x_0..x_{k-1}).
// K need not be invertible.
template <typename S>
MeasureDensity<S> measure_density(const HamiltonianSpec<S>& spec,
                                  const std::vector<Vec<S>>& window_pts, const S& h) {
  if (int(window_pts.size()) != spec.k())
    throw field_error("measure_density: expected k window points");
  MeasureDensity<S> out;
  out.c_measure = spec.solve_coefficient(h);
  out.det = determinant(polar_solve_matrix(spec, window_pts, h));
  if (is_zero(out.det)) return out;
  out.density = S(1) / out.det;
  out.defined = true;
  return out;
}

template <typename S>
S product_integral(const HamiltonianSpec<S>& spec, const std::vector<Vec<S>>& pts, const S& h) {
  auto ki = k_integrals(spec, pts, h);
  S prod(1);
  for (const auto& v : ki.values) prod *= v;
  return prod;
}

// Even k only: the two alternating pairing products over x_0..x_k.
template <typename S>
std::pair<S, S> even_k_two_integrals(const HamiltonianSpec<S>& spec, const std::vector<Vec<S>>& pts,
                                     const S& h) {
  if (spec.k() % 2 != 0) throw field_error("even_k_two_integrals: k must be even");
  auto ki = k_integrals(spec, pts, h);
  S first(1), second(1);
  for (int m = 0; m + 1 < spec.k(); m += 2) first *= ki.values[m];
  for (int m = 1; m < spec.k(); m += 2) second *= ki.values[m];
  return {first, second};
}

template <typename S>
struct WindowJacobian {
  Mat<S> corner;       // dx_k/dx_0 = (I - cKS0)^{-1} (I + cKS1)
  S det_corner = S(0);
  S det_ratio = S(0);  // det(I - cKS1) / det(I - cKS0)
  int sign = 1;        // full window-map det = sign * det_corner
  bool singular = false;
};

// Closed-form Jacobian data for one step of the window map. The full
// (nk x nk) companion determinant equals det_corner up to the block-cycle
// sign (-1)^{n(k-1)}.
template <typename S>
WindowJacobian<S> window_jacobian(const HamiltonianSpec<S>& spec, const PolarWindow<S>& w) {
  WindowJacobian<S> out;
  int n = spec.dimension();
  int k = spec.k();
  out.sign = (n * (k - 1)) % 2 == 0 ? 1 : -1;
  auto step = polar_hamiltonian_step(spec, w);
  if (step.singular) {
    out.singular = true;
    return out;
  }
  std::vector<Vec<S>> shifted(w.points.begin() + 1, w.points.end());
  shifted.push_back(step.new_point);
  S c = spec.solve_coefficient(w.h);
  Mat<S> KS0 = (spec.K() * contract_to_bilinear(spec.h_form(), w.points)).scaled(c);
  Mat<S> KS1 = (spec.K() * contract_to_bilinear(spec.h_form(), shifted)).scaled(c);
  Mat<S> A0 = Mat<S>::identity(n) - KS0;
  Mat<S> A1_plus = Mat<S>::identity(n) + KS1;
  Mat<S> A1_minus = Mat<S>::identity(n) - KS1;
  auto A0inv = inverse(A0);
  S d0 = determinant(A0);
  if (!A0inv || is_zero(d0)) {
    out.singular = true;
    return out;
  }
  out.corner = (*A0inv) * A1_plus;
  out.det_corner = determinant(out.corner);
  out.det_ratio = determinant(A1_minus) / d0;
  return out;
}

}  // namespace polarint
