#pragma once

// Verification engines and closed-form oracles: the integrable scalar
// x^{k+1} recurrence, the explicit planar quartic map, self-adjointness /
// measure / scaling checks, drift reporting and the height-growth
// integrability probe.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polarint/hamiltonian.hpp"
#include "polarint/linalg.hpp"
#include "polarint/polarize.hpp"
#include "polarint/polarmap.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

// ---------------------------------------------------------------------------
// Scalar oracle for xdot = x^{k+1}: the polar recurrence divides through to
// I_n := 1/(x_n ... x_{n+k-1}), which steps down by exactly h k. The next
// point is x_{n+k} = 1/(x_{n+1} ... x_{n+k-1} * I_{n+1}).

template <typename S>
class ScalarOracle {
 public:
  static ScalarOracle make(int k, S h, std::vector<S> window) {
    if (int(window.size()) != k) throw field_error("scalar oracle: window must have k points");
    ScalarOracle o;
    o.k_ = k;
    o.h_ = std::move(h);
    S prod(1);
    for (const auto& x : window) {
      if (is_zero(x)) throw field_error("scalar oracle: window points must be nonzero");
      prod *= x;
    }
    o.window_ = std::move(window);
    o.invariant_ = S(1) / prod;
    return o;
  }

  const S& invariant() const { return invariant_; }
  const std::vector<S>& window() const { return window_; }

  struct Step {
    S next = S(0);
    bool singular = false;
  };

  Step step() {
    Step out;
    S next_inv = invariant_ - h_ * S(k_);
    if (is_zero(next_inv)) {
      out.singular = true;  // finite-time blow-up of the discrete flow
      return out;
    }
    S tail(1);
    for (int i = 1; i < k_; ++i) tail *= window_[i];
    out.next = S(1) / (tail * next_inv);
    window_.erase(window_.begin());
    window_.push_back(out.next);
    invariant_ = next_inv;
    return out;
  }

 private:
  int k_ = 0;
  S h_ = S(0);
  std::vector<S> window_;
  S invariant_ = S(0);
};

// ---------------------------------------------------------------------------
// Explicit planar quartic map for H = a q^4 + 4b q^3 p + 6c q^2 p^2 +
// 4d q p^3 + e p^4 with the standard 2x2 structure matrix. Written with
// Delta = B^2 - AC (the discriminant of the contracted quadratic form), so
// that the shared denominator 1 - 4 h^2 Delta is exactly the determinant of
// the step's linear system and iterates conserve the alternating pairings.

template <typename S>
struct ExplicitQuarticMap {
  S a, b, c, d, e;
  S h;

  S delta(const Vec<S>& x0, const Vec<S>& x1) const {
    const S &q0 = x0[0], &p0 = x0[1], &q1 = x1[0], &p1 = x1[1];
    S u = q0 * q1;
    S v = q0 * p1 + p0 * q1;
    S w = p0 * p1;
    return (b * b - a * c) * u * u + (c * c - b * d) * v * v + (d * d - c * e) * w * w +
           (b * c - a * d) * u * v + (S(2) * b * d - a * e - c * c) * u * w +
           (c * d - b * e) * v * w;
  }

  S denominator(const Vec<S>& x0, const Vec<S>& x1) const {
    return S(1) - S(4) * h * h * delta(x0, x1);
  }

  struct Step {
    Vec<S> next;
    bool singular = false;
  };

  Step step(const Vec<S>& x0, const Vec<S>& x1) const {
    const S &q0 = x0[0], &p0 = x0[1], &q1 = x1[0], &p1 = x1[1];
    Step out;
    S den = denominator(x0, x1);
    if (is_zero(den)) {
      out.singular = true;
      return out;
    }
    S two_h = S(2) * h;
    S q2 = (q0 + two_h * (b * q0 * q0 * q1 + c * (S(2) * p0 * q0 * q1 + p1 * q0 * q0) +
                          d * (S(2) * p0 * p1 * q0 + p0 * p0 * q1) + e * p0 * p0 * p1)) /
           den;
    S p2 = (p0 - two_h * (a * q0 * q0 * q1 + b * (S(2) * p0 * q0 * q1 + p1 * q0 * q0) +
                          c * (S(2) * p0 * p1 * q0 + p0 * p0 * q1) + d * p0 * p0 * p1)) /
           den;
    out.next = {std::move(q2), std::move(p2)};
    return out;
  }

  ScalarPoly<S> hamiltonian() const {
    std::vector<Monomial<S>> ms = {{a, {4, 0}},          {S(4) * b, {3, 1}}, {S(6) * c, {2, 2}},
                                   {S(4) * d, {1, 3}},   {e, {0, 4}}};
    return ScalarPoly<S>(2, std::move(ms));
  }
};

// ---------------------------------------------------------------------------
// Self-adjointness: stepping forward from (x_0..x_{k-1}) and then stepping
// the reversed sequence with -h must return x_0.

template <typename S>
struct SelfAdjointReport {
  bool ok = false;
  bool singular = false;
  double residual = 0.0;
  bool exact = scalar_traits<S>::exact;
};

template <typename S>
SelfAdjointReport<S> check_self_adjoint(const SymMultilinearForm<S>& F, const PolarWindow<S>& w) {
  SelfAdjointReport<S> rep;
  auto fwd = polar_step(F, w);
  if (fwd.singular) {
    rep.singular = true;
    return rep;
  }
  std::vector<Vec<S>> rev;
  rev.push_back(fwd.new_point);
  for (int i = w.k - 1; i >= 1; --i) rev.push_back(w.points[i]);
  auto back = polar_step(F, PolarWindow<S>::from_points(std::move(rev), -w.h));
  if (back.singular) {
    rep.singular = true;
    return rep;
  }
  Vec<S> diff = vec_sub(back.new_point, w.points.front());
  rep.residual = inf_norm(diff);
  if constexpr (scalar_traits<S>::exact) {
    rep.ok = true;
    for (const auto& dcomp : diff)
      if (!is_zero(dcomp)) rep.ok = false;
  } else {
    rep.ok = rep.residual <= kStepResidualTol * detail::residual_scale(w.points.front());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Measure / Jacobian consistency. Three determinants of one window-map step:
//   fd      finite-difference Jacobian of the full map on V^k (double only)
//   corner  closed form det[(I - cKS0)^{-1}(I + cKS1)]
//   ratio   det(I - cKS1)/det(I - cKS0), the density ratio
// corner == ratio exactly; fd matches sign * ratio, with the block-cycle
// sign (-1)^{n(k-1)} of the companion structure.

template <typename S>
struct MeasureJacobianReport {
  bool singular = false;
  S det_corner = S(0);
  S det_ratio = S(0);
  int sign = 1;
  bool closed_matches_ratio = false;  // exact in rational mode
  double det_fd = 0.0;                // double mode only
  double fd_rel_error = 0.0;
  bool fd_matches = true;
};

inline constexpr double kMeasureFdTol = 1e-5;

template <typename S>
MeasureJacobianReport<S> check_measure_jacobian(const HamiltonianSpec<S>& spec,
                                                const PolarWindow<S>& w, double fd_step = 1e-6) {
  MeasureJacobianReport<S> rep;
  auto jac = window_jacobian(spec, w);
  if (jac.singular) {
    rep.singular = true;
    return rep;
  }
  rep.det_corner = jac.det_corner;
  rep.det_ratio = jac.det_ratio;
  rep.sign = jac.sign;
  if constexpr (scalar_traits<S>::exact) {
    rep.closed_matches_ratio = (jac.det_corner == jac.det_ratio);
  } else {
    double diff = std::fabs(to_double(jac.det_corner) - to_double(jac.det_ratio));
    rep.closed_matches_ratio = diff <= 1e-9 * std::max(1.0, std::fabs(to_double(jac.det_ratio)));
    // Finite-difference Jacobian of the stacked window map.
    int n = spec.dimension(), k = spec.k();
    int dim = n * k;
    Mat<double> J(dim, dim);
    auto flat_step = [&](const Vec<double>& flat) {
      std::vector<Vec<double>> pts(k, Vec<double>(n));
      for (int m = 0; m < k; ++m)
        for (int i = 0; i < n; ++i) pts[m][i] = flat[m * n + i];
      auto win = PolarWindow<double>::from_points(pts, to_double(w.h));
      auto st = polar_hamiltonian_step(spec, win);
      if (st.singular) throw field_error("fd jacobian: singular step");
      Vec<double> out(dim);
      for (int m = 0; m + 1 < k; ++m)
        for (int i = 0; i < n; ++i) out[m * n + i] = pts[m + 1][i];
      for (int i = 0; i < n; ++i) out[(k - 1) * n + i] = st.new_point[i];
      return out;
    };
    Vec<double> base(dim);
    for (int m = 0; m < k; ++m)
      for (int i = 0; i < n; ++i) base[m * n + i] = to_double(w.points[m][i]);
    for (int j = 0; j < dim; ++j) {
      Vec<double> xp = base, xm = base;
      xp[j] += fd_step;
      xm[j] -= fd_step;
      Vec<double> fp = flat_step(xp), fm = flat_step(xm);
      for (int i = 0; i < dim; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * fd_step);
    }
    rep.det_fd = determinant(J);
    double expected = rep.sign * to_double(jac.det_ratio);
    rep.fd_rel_error = std::fabs(rep.det_fd - expected) / std::max(1e-30, std::fabs(expected));
    rep.fd_matches = rep.fd_rel_error <= kMeasureFdTol;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling k-symmetry: with prod(lambda) = 1, the step output scales by
// lambda_0 while the density, the pairing product and (even k) the two
// alternating products are unchanged.

template <typename S>
struct ScalingReport {
  bool singular = false;
  bool map_equivariant = false;
  bool density_invariant = true;   // checked when a spec is supplied
  bool product_invariant = true;   // requires invertible K
  bool even_pair_invariant = true; // k even only
  bool ok() const {
    return !singular && map_equivariant && density_invariant && product_invariant &&
           even_pair_invariant;
  }
};

template <typename S>
bool scalar_close(const S& x, const S& y, double tol) {
  if constexpr (scalar_traits<S>::exact)
    return x == y;
  else
    return std::fabs(to_double(x) - to_double(y)) <=
           tol * std::max(1.0, std::fabs(to_double(y)));
}

template <typename S>
ScalingReport<S> check_scaling(const SymMultilinearForm<S>& F, const PolarWindow<S>& w,
                               const std::vector<S>& lambdas,
                               const HamiltonianSpec<S>* spec = nullptr, double tol = 1e-10) {
  if (int(lambdas.size()) != w.k) throw field_error("check_scaling: need k scale factors");
  S prod(1);
  for (const auto& l : lambdas) prod *= l;
  if (!(prod == S(1))) throw field_error("check_scaling: scale factors must have unit product");
  ScalingReport<S> rep;
  auto base = polar_step(F, w);
  std::vector<Vec<S>> scaled_pts;
  for (int m = 0; m < w.k; ++m) scaled_pts.push_back(vec_scale(lambdas[m], w.points[m]));
  auto scaled_win = PolarWindow<S>::from_points(scaled_pts, w.h);
  auto scaled = polar_step(F, scaled_win);
  if (base.singular || scaled.singular) {
    rep.singular = true;
    return rep;
  }
  Vec<S> expect = vec_scale(lambdas[0], base.new_point);
  rep.map_equivariant = true;
  for (size_t i = 0; i < expect.size(); ++i)
    if (!scalar_close(scaled.new_point[i], expect[i], tol)) rep.map_equivariant = false;

  if (spec) {
    auto d0 = measure_density(*spec, w.points, w.h);
    auto d1 = measure_density(*spec, scaled_pts, w.h);
    rep.density_invariant = d0.defined && d1.defined && scalar_close(d1.density, d0.density, tol);
    if (spec->has_omega()) {
      std::vector<Vec<S>> ext = w.points;
      ext.push_back(base.new_point);
      std::vector<Vec<S>> ext_scaled = scaled_pts;
      ext_scaled.push_back(scaled.new_point);
      rep.product_invariant = scalar_close(product_integral(*spec, ext_scaled, w.h),
                                           product_integral(*spec, ext, w.h), tol);
      if (spec->k() % 2 == 0) {
        auto pair0 = even_k_two_integrals(*spec, ext, w.h);
        auto pair1 = even_k_two_integrals(*spec, ext_scaled, w.h);
        rep.even_pair_invariant = scalar_close(pair1.first, pair0.first, tol) &&
                                  scalar_close(pair1.second, pair0.second, tol);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Drift reporting: samples a value series at a stride and reports the worst
// departure from each residue class's first sample.

struct DriftReport {
  std::vector<double> series;
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool exact_zero = false;  // rational mode: all drifts exactly zero
  int samples = 0;
};

template <typename S>
DriftReport drift_series(const std::vector<S>& values, int stride) {
  if (stride < 1) throw field_error("drift_series: stride must be >= 1");
  if (int(values.size()) < stride + 1)
    throw field_error("drift_series: series too short for one comparison");
  DriftReport rep;
  rep.exact_zero = scalar_traits<S>::exact;
  for (const auto& v : values) rep.series.push_back(to_double(v));
  for (int r = 0; r < stride; ++r) {
    if (r >= int(values.size())) break;
    const S& ref = values[r];
    double scale = std::max(1.0, std::fabs(to_double(ref)));
    for (size_t j = r + stride; j < values.size(); j += stride) {
      ++rep.samples;
      if constexpr (scalar_traits<S>::exact) {
        if (!(values[j] == ref)) rep.exact_zero = false;
      }
      double d = std::fabs(to_double(values[j]) - to_double(ref));
      rep.max_abs = std::max(rep.max_abs, d);
      rep.max_rel = std::max(rep.max_rel, d / scale);
    }
  }
  if constexpr (scalar_traits<S>::exact) {
    if (rep.exact_zero) {
      rep.max_abs = 0.0;
      rep.max_rel = 0.0;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Height-growth probe. Iterates the polar map exactly and records the
// arithmetic height of each new point after reduction to lowest terms.
// Subexponential height growth is the integrability signature; exponential
// growth fails the entropy test.
//
// Classification (artifact convention, reported with the results): let
// r_n = h_{n+1}/h_n and take the mean over the last max(4, iters/3) ratios.
// A tail mean <= 1.05 is subexponential outright. Otherwise the deciding
// signal at desk depth is whether the ratio tail is stationary: exponential
// growth holds its ratio (the observed block-to-block decay is under 2.5%),
// while polynomial growth of any degree has r_n ~ 1 + p/n drifting toward 1
// (observed decay 5-10% per block at these depths). A stationary tail mean
// >= 1.2 classifies exponential; a decaying tail classifies subexponential;
// anything left falls back to competing fits of log h against n and log n.

enum class GrowthClass { subexponential, exponential, inconclusive };

inline const char* growth_class_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::subexponential: return "subexponential";
    case GrowthClass::exponential: return "exponential";
    default: return "inconclusive";
  }
}

struct EntropyEstimate {
  std::vector<double> heights;        // log height of each new point
  std::vector<double> growth_ratios;  // h_{n+1}/h_n
  GrowthClass classification = GrowthClass::inconclusive;
  double tail_mean_ratio = 0.0;
  double tail_decay = 0.0;  // relative drop from the previous ratio block
  double sub_threshold = 1.05;
  double exp_threshold = 1.2;
  int iters_done = 0;
  bool low_iteration_count = false;
  std::optional<long> singular_at;
  double elapsed_seconds = 0.0;
};

namespace detail {

struct LineFit {
  double slope = 0.0, intercept = 0.0, sse = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit f;
  size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double den = double(n) * sxx - sx * sx;
  if (std::fabs(den) < 1e-300) return f;
  f.slope = (double(n) * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / double(n);
  for (size_t i = 0; i < n; ++i) {
    double r = ys[i] - (f.slope * xs[i] + f.intercept);
    f.sse += r * r;
  }
  return f;
}

inline constexpr double kRatioStationaryTol = 0.025;

inline GrowthClass classify_heights(const std::vector<double>& heights, double sub_thr,
                                    double exp_thr, double* tail_mean, double* tail_decay,
                                    std::vector<double>* ratios) {
  ratios->clear();
  for (size_t i = 0; i + 1 < heights.size(); ++i) {
    if (heights[i] < 0.5 * std::log(2.0)) continue;  // below one bit: skip
    ratios->push_back(heights[i + 1] / heights[i]);
  }
  *tail_mean = 0.0;
  *tail_decay = 0.0;
  if (ratios->size() < 2) return GrowthClass::inconclusive;
  size_t tail = std::max<size_t>(4, heights.size() / 3);
  tail = std::min(tail, ratios->size());
  auto block_mean = [&](size_t lo, size_t hi) {  // [lo, hi)
    double s = 0.0;
    for (size_t i = lo; i < hi; ++i) s += (*ratios)[i];
    return s / double(hi - lo);
  };
  size_t late_lo = ratios->size() - tail;
  *tail_mean = block_mean(late_lo, ratios->size());
  if (*tail_mean <= sub_thr) return GrowthClass::subexponential;

  size_t mid_n = std::min(tail, late_lo);
  if (mid_n >= 2) {
    double mid_mean = block_mean(late_lo - mid_n, late_lo);
    *tail_decay = (mid_mean - *tail_mean) / *tail_mean;
    if (*tail_mean >= exp_thr && *tail_decay <= kRatioStationaryTol)
      return GrowthClass::exponential;
    if (*tail_decay > kRatioStationaryTol) return GrowthClass::subexponential;
  }
  // Residual gray band: competing fits of log h over the tail 2/3.
  std::vector<double> ns, logn, logh;
  size_t first = heights.size() / 3;
  for (size_t i = first; i < heights.size(); ++i) {
    if (heights[i] <= 0.0) continue;
    ns.push_back(double(i + 1));
    logn.push_back(std::log(double(i + 1)));
    logh.push_back(std::log(heights[i]));
  }
  if (ns.size() < 4) return GrowthClass::inconclusive;
  LineFit poly = fit_line(logn, logh);
  LineFit expo = fit_line(ns, logh);
  if (poly.sse <= expo.sse) return GrowthClass::subexponential;
  if (std::exp(expo.slope) >= exp_thr) return GrowthClass::exponential;
  return GrowthClass::inconclusive;
}

}  // namespace detail

struct HeightGrowthOptions {
  int iters = 14;
  size_t max_height_bits = 0;  // 0 = unlimited
};

template <typename S>
EntropyEstimate height_growth(const SymMultilinearForm<S>& F, PolarWindow<S> w,
                              const HeightGrowthOptions& opts = {}) {
  static_assert(scalar_traits<S>::exact, "height_growth requires rational mode");
  EntropyEstimate est;
  auto t0 = std::chrono::steady_clock::now();
  for (int it = 0; it < opts.iters; ++it) {
    auto r = polar_step(F, w);
    if (r.singular) {
      est.singular_at = w.step_index + 1;
      break;
    }
    double hmax = 0.0;
    size_t hbits = 0;
    for (const auto& c : r.new_point) {
      hmax = std::max(hmax, log_height(c));
      hbits = std::max(hbits, height_bits(c));
    }
    est.heights.push_back(hmax);
    ++est.iters_done;
    w.advance(std::move(r.new_point));
    if (opts.max_height_bits > 0 && hbits > opts.max_height_bits) break;
  }
  est.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  est.low_iteration_count = est.iters_done < 6;
  est.classification = detail::classify_heights(est.heights, est.sub_threshold, est.exp_threshold,
                                                &est.tail_mean_ratio, &est.tail_decay,
                                                &est.growth_ratios);
  if (est.low_iteration_count && est.classification != GrowthClass::inconclusive &&
      est.iters_done < 4)
    est.classification = GrowthClass::inconclusive;
  return est;
}

}  // namespace polarint
