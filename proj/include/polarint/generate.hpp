#pragma once

// Seeded generation of random fields, Hamiltonians and windows for the
// verification suites. A small splitmix64 generator keeps runs reproducible
// across platforms and standard libraries.

#include <cstdint>
#include <vector>

#include "polarint/hamiltonian.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [lo, hi], inclusive.
  long int_in(long lo, long hi) {
    return lo + long(next() % uint64_t(hi - lo + 1));
  }

  bool coin() { return (next() & 1) != 0; }

 private:
  uint64_t state_;
};

// num in [-max_num, max_num] (excluding 0 unless allowed), den in [1, max_den].
template <typename S>
S rand_scalar(Rng& rng, long max_num = 5, long max_den = 5, bool allow_zero = false) {
  long num = rng.int_in(-max_num, max_num);
  while (!allow_zero && num == 0) num = rng.int_in(-max_num, max_num);
  long den = rng.int_in(1, max_den);
  return from_ratio<S>(num, den);
}

template <typename S>
Vec<S> rand_point(Rng& rng, int n, bool allow_zero = false) {
  Vec<S> p(n);
  for (int i = 0; i < n; ++i) p[i] = rand_scalar<S>(rng, 5, 5, allow_zero);
  return p;
}

template <typename S>
std::vector<Vec<S>> rand_window_points(Rng& rng, int n, int k) {
  std::vector<Vec<S>> pts;
  for (int m = 0; m < k; ++m) pts.push_back(rand_point<S>(rng, n));
  return pts;
}

inline std::vector<int> rand_exponents(Rng& rng, int n, int degree) {
  std::vector<int> e(n, 0);
  for (int d = 0; d < degree; ++d) e[rng.int_in(0, n - 1)] += 1;
  return e;
}

template <typename S>
PolyVectorField<S> rand_homogeneous_field(Rng& rng, int n, int degree, int terms_per_comp = 3) {
  for (;;) {
    std::vector<std::vector<Monomial<S>>> comps(n);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < terms_per_comp; ++t)
        comps[i].push_back(Monomial<S>{rand_scalar<S>(rng), rand_exponents(rng, n, degree)});
    PolyVectorField<S> f(n, std::move(comps));
    if (!f.is_zero_field()) return f;
  }
}

template <typename S>
ScalarPoly<S> rand_homogeneous_scalar(Rng& rng, int n, int degree, int terms = 4) {
  for (;;) {
    std::vector<Monomial<S>> ms;
    for (int t = 0; t < terms; ++t)
      ms.push_back(Monomial<S>{rand_scalar<S>(rng), rand_exponents(rng, n, degree)});
    ScalarPoly<S> h(n, std::move(ms));
    if (!h.is_zero_poly()) return h;
  }
}

// Mixed degrees <= 2 with both a genuine quadratic part and a lower part.
template <typename S>
PolyVectorField<S> rand_nonhomogeneous_quadratic(Rng& rng, int n) {
  for (;;) {
    std::vector<std::vector<Monomial<S>>> comps(n);
    for (int i = 0; i < n; ++i) {
      comps[i].push_back(Monomial<S>{rand_scalar<S>(rng), rand_exponents(rng, n, 2)});
      comps[i].push_back(Monomial<S>{rand_scalar<S>(rng), rand_exponents(rng, n, rng.int_in(0, 1))});
    }
    PolyVectorField<S> f(n, std::move(comps));
    if (f.max_degree() == 2 && !f.homogeneous_degree()) return f;
  }
}

// Block-diagonal standard structure matrix: [[0,1],[-1,0]] per 2x2 block.
template <typename S>
Mat<S> standard_symplectic(int n) {
  if (n % 2 != 0) throw field_error("standard_symplectic: n must be even");
  Mat<S> K(n, n);
  for (int b = 0; b + 1 < n; b += 2) {
    K(b, b + 1) = S(1);
    K(b + 1, b) = S(-1);
  }
  return K;
}

template <typename S>
HamiltonianSpec<S> rand_hamiltonian(Rng& rng, int n, int k) {
  return HamiltonianSpec<S>::make(rand_homogeneous_scalar<S>(rng, n, k + 2),
                                  standard_symplectic<S>(n));
}

// k factors with exact unit product.
template <typename S>
std::vector<S> rand_unit_product_lambdas(Rng& rng, int k) {
  std::vector<S> l(k, S(1));
  S prod(1);
  for (int i = 0; i + 1 < k; ++i) {
    l[i] = rand_scalar<S>(rng, 4, 4);
    prod *= l[i];
  }
  l[k - 1] = S(1) / prod;
  return l;
}

}  // namespace polarint
