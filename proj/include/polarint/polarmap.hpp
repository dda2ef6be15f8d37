#pragma once

// Discretization engines.
//
// For a homogeneous field f of degree k+1 with polarization F, one step of
// the k-step polar map solves the linear system
//
//     (x_k - x_0) / (k h) = F(x_0, ..., x_{k-1}, x_k),
//
// i.e. (I - k h M) x_k = x_0 with M = contract_to_matrix(F, x_0..x_{k-1}).
// Kahan's map is the k=1 case extended with the midpoint rule for the
// affine part. Singular systems are reported, never perturbed: the singular
// locus is the map's birational indeterminacy set.

#include <cmath>
#include <optional>
#include <vector>

#include "polarint/linalg.hpp"
#include "polarint/polarize.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

inline constexpr double kStepResidualTol = 1e-12;

template <typename S>
struct PolarWindow {
  int k = 0;               // points per window; k+1 = degree of the field
  S h = S(0);              // step size
  std::vector<Vec<S>> points;  // x_0, ..., x_{k-1}
  long step_index = 0;     // time index of the newest point x_{k-1}

  static PolarWindow from_points(std::vector<Vec<S>> pts, S step) {
    if (pts.empty()) throw field_error("window needs at least one point");
    PolarWindow w;
    w.k = int(pts.size());
    w.h = std::move(step);
    w.points = std::move(pts);
    w.step_index = w.k - 1;
    return w;
  }

  int dimension() const { return points.empty() ? 0 : int(points.front().size()); }

  void advance(Vec<S> new_point) {
    points.erase(points.begin());
    points.push_back(std::move(new_point));
    ++step_index;
  }
};

template <typename S>
struct StepResult {
  Vec<S> new_point;
  double solve_condition = 0.0;  // 0 in rational mode (solve is exact)
  bool singular = false;
};

struct BootstrapConfig {
  enum class Method { reference_one_step, exact_provided };
  Method method = Method::reference_one_step;
  int substeps = 100;
};

namespace detail {

template <typename S>
double residual_scale(const Vec<S>& x) {
  return std::max(1.0, inf_norm(x));
}

// Defining residual of the polar step, ||(x_k - x_0)/(kh) - F(x_0..x_k)||.
template <typename S>
double polar_residual(const SymMultilinearForm<S>& F, const std::vector<Vec<S>>& window_pts,
                      const Vec<S>& xk, const S& h, int k) {
  std::vector<const Vec<S>*> args;
  for (const auto& p : window_pts) args.push_back(&p);
  args.push_back(&xk);
  Vec<S> rhs = eval_form(F, args);
  S inv_kh = S(1) / (S(k) * h);
  Vec<S> lhs = vec_scale(inv_kh, vec_sub(xk, window_pts.front()));
  return inf_norm(vec_sub(lhs, rhs));
}

}  // namespace detail

template <typename S>
StepResult<S> polar_step(const SymMultilinearForm<S>& F, const PolarWindow<S>& w) {
  if (F.order() != w.k + 1) throw field_error("polar_step: window size must be degree - 1");
  if (F.dimension() != w.dimension()) throw field_error("polar_step: dimension mismatch");
  if (is_zero(w.h)) throw field_error("polar_step: zero step size");
  int n = F.dimension();
  Mat<S> M = contract_to_matrix(F, w.points);
  Mat<S> A = Mat<S>::identity(n) - M.scaled(S(w.k) * w.h);
  auto sol = solve_linear(A, w.points.front());
  StepResult<S> out;
  out.solve_condition = sol.condition;
  if (sol.singular) {
    out.singular = true;
    return out;
  }
  out.new_point = std::move(sol.x);
  if constexpr (!scalar_traits<S>::exact) {
    double res = detail::polar_residual(F, w.points, out.new_point, w.h, w.k);
    double scale = inf_norm(out.new_point);
    bool ok = scale > 0.0 ? res <= kStepResidualTol * scale : res == 0.0;
    if (!ok) out.singular = true;
  }
  return out;
}

// Inverse direction: given (x_1, ..., x_k) recover x_0, which solves
// (I + k h M') x_0 = x_k with M' = contract_to_matrix(F, x_1..x_k).
template <typename S>
StepResult<S> inverse_polar_step(const SymMultilinearForm<S>& F, const PolarWindow<S>& w) {
  if (F.order() != w.k + 1) throw field_error("inverse_polar_step: window size must be degree - 1");
  if (is_zero(w.h)) throw field_error("inverse_polar_step: zero step size");
  int n = F.dimension();
  Mat<S> M = contract_to_matrix(F, w.points);
  Mat<S> A = Mat<S>::identity(n) + M.scaled(S(w.k) * w.h);
  auto sol = solve_linear(A, w.points.back());
  StepResult<S> out;
  out.solve_condition = sol.condition;
  if (sol.singular) {
    out.singular = true;
    return out;
  }
  out.new_point = std::move(sol.x);
  return out;
}

// Kahan's map for fields of degree <= 2: with f = Q(x,x) + Bx + c,
// (x' - x)/h = Q(x, x') + B(x + x')/2 + c.
template <typename S>
StepResult<S> kahan_step(const PolyVectorField<S>& f, const Vec<S>& x, const S& h) {
  if (f.max_degree() > 2) throw field_error("kahan_step: field degree exceeds 2");
  if (int(x.size()) != f.dimension()) throw field_error("kahan_step: point length != dimension");
  if (is_zero(h)) throw field_error("kahan_step: zero step size");
  int n = f.dimension();
  auto parts = f.degree_split();
  Mat<S> Qx(n, n), B(n, n);
  Vec<S> c0 = zero_vec<S>(n);
  if (auto it = parts.find(2); it != parts.end())
    Qx = contract_to_matrix(polarize(it->second), {x});
  if (auto it = parts.find(1); it != parts.end()) {
    for (int i = 0; i < n; ++i)
      for (const auto& m : it->second.components()[i])
        for (int j = 0; j < n; ++j)
          if (m.exponents[j] == 1) B(i, j) += m.coeff;
  }
  if (auto it = parts.find(0); it != parts.end()) c0 = it->second.evaluate(x);
  S half_h = h / S(2);
  Mat<S> A = Mat<S>::identity(n) - Qx.scaled(h) - B.scaled(half_h);
  Vec<S> rhs = vec_add(x, vec_add(vec_scale(half_h, B.apply(x)), vec_scale(h, c0)));
  auto sol = solve_linear(A, rhs);
  StepResult<S> out;
  out.solve_condition = sol.condition;
  if (sol.singular) {
    out.singular = true;
    return out;
  }
  out.new_point = std::move(sol.x);
  return out;
}

namespace detail {

// Classical 4th-order one-step reference method, fixed substeps. Always runs
// in double; exact modes convert the endpoint back bit-exactly.
inline Vec<double> rk4_flow(const PolyVectorField<double>& f, Vec<double> x, double t_span,
                            int substeps) {
  double dt = t_span / substeps;
  int n = f.dimension();
  for (int s = 0; s < substeps; ++s) {
    Vec<double> k1 = f.evaluate(x);
    Vec<double> x2(n), x3(n), x4(n);
    for (int i = 0; i < n; ++i) x2[i] = x[i] + 0.5 * dt * k1[i];
    Vec<double> k2 = f.evaluate(x2);
    for (int i = 0; i < n; ++i) x3[i] = x[i] + 0.5 * dt * k2[i];
    Vec<double> k3 = f.evaluate(x3);
    for (int i = 0; i < n; ++i) x4[i] = x[i] + dt * k3[i];
    Vec<double> k4 = f.evaluate(x4);
    for (int i = 0; i < n; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(x[i])) throw field_error("bootstrap: reference stepper overflow");
    }
  }
  return x;
}

}  // namespace detail

// Produces the k starting points x_0..x_{k-1} from x_init by integrating the
// field with the reference method, config.substeps substeps per interval h.
template <typename S>
PolarWindow<S> bootstrap_window(const PolyVectorField<S>& f, const Vec<S>& x_init, int k,
                                const S& h, const BootstrapConfig& config = {}) {
  if (config.method == BootstrapConfig::Method::exact_provided)
    throw field_error("bootstrap: exact-provided mode expects PolarWindow::from_points");
  if (config.substeps < 1) throw field_error("bootstrap: substeps must be >= 1");
  std::vector<Vec<S>> pts;
  pts.push_back(x_init);
  if (k > 1) {
    PolyVectorField<double> fd = field_cast<double>(f);
    Vec<double> x(x_init.size());
    for (size_t i = 0; i < x_init.size(); ++i) x[i] = to_double(x_init[i]);
    for (int m = 1; m < k; ++m) {
      x = detail::rk4_flow(fd, x, to_double(h), config.substeps);
      Vec<S> xs(x.size());
      for (size_t i = 0; i < x.size(); ++i) xs[i] = S(x[i]);
      pts.push_back(std::move(xs));
    }
  }
  return PolarWindow<S>::from_points(std::move(pts), h);
}

template <typename S>
struct Trajectory {
  int k = 0;
  S h = S(0);
  std::vector<Vec<S>> points;          // x_0, x_1, ... (time index = position)
  std::optional<long> singular_at;     // time index of the point that failed
  std::optional<long> budget_stop_at;  // rational mode: height budget reached
  bool extension = false;              // suspension beyond the quadratic case
};

struct IntegrateOptions {
  size_t max_height_bits = 0;  // 0 = unlimited; rational mode only
};

template <typename S>
Trajectory<S> integrate(const SymMultilinearForm<S>& F, PolarWindow<S> w, long steps,
                        const IntegrateOptions& opts = {}) {
  Trajectory<S> traj;
  traj.k = w.k;
  traj.h = w.h;
  traj.points = w.points;
  for (long s = 0; s < steps; ++s) {
    auto r = polar_step(F, w);
    if (r.singular) {
      traj.singular_at = w.step_index + 1;
      break;
    }
    traj.points.push_back(r.new_point);
    if constexpr (scalar_traits<S>::exact) {
      if (opts.max_height_bits > 0) {
        size_t hb = 0;
        for (const auto& c : r.new_point) hb = std::max(hb, height_bits(c));
        if (hb > opts.max_height_bits) {
          w.advance(std::move(r.new_point));
          traj.budget_stop_at = w.step_index;
          break;
        }
      }
    }
    w.advance(std::move(r.new_point));
  }
  return traj;
}

// One step of the suspended polar map for a (possibly nonhomogeneous) field:
// homogenize to degree k+1 in dimension n+1, lift the window with w = 1,
// take one polar step, project back by the last coordinate. For quadratics
// with k = 1 this reproduces the Kahan map exactly.
template <typename S>
StepResult<S> suspended_step(const PolyVectorField<S>& f, const PolarWindow<S>& w) {
  int d = w.k + 1;
  if (f.max_degree() > d)
    throw field_error("suspended_step: window size must be at least field degree - 1");
  PolyVectorField<S> fh = f.homogenize(d);
  SymMultilinearForm<S> F = polarize(fh, d);
  std::vector<Vec<S>> lifted = w.points;
  for (auto& p : lifted) p.push_back(S(1));
  auto r = polar_step(F, PolarWindow<S>::from_points(std::move(lifted), w.h));
  StepResult<S> out;
  out.solve_condition = r.solve_condition;
  if (r.singular) {
    out.singular = true;
    return out;
  }
  const S& last = r.new_point.back();
  if (is_zero(last)) {
    out.singular = true;  // projection hits the w = 0 hyperplane
    return out;
  }
  out.new_point.assign(r.new_point.begin(), r.new_point.end() - 1);
  for (auto& c : out.new_point) c = c / last;
  return out;
}

// Whether the suspension leaves the ground covered by the quadratic
// equivalence: anything nonhomogeneous beyond (degree <= 2, k = 1) is an
// empirical extension and is marked as such in reports.
template <typename S>
bool suspension_is_extension(const PolyVectorField<S>& f, int k) {
  if (f.homogeneous_degree()) return false;
  return !(f.max_degree() <= 2 && k == 1);
}

template <typename S>
Trajectory<S> integrate_suspended(const PolyVectorField<S>& f, PolarWindow<S> w, long steps,
                                  const IntegrateOptions& opts = {}) {
  Trajectory<S> traj;
  traj.k = w.k;
  traj.h = w.h;
  traj.points = w.points;
  traj.extension = suspension_is_extension(f, w.k);
  for (long s = 0; s < steps; ++s) {
    auto r = suspended_step(f, w);
    if (r.singular) {
      traj.singular_at = w.step_index + 1;
      break;
    }
    traj.points.push_back(r.new_point);
    if constexpr (scalar_traits<S>::exact) {
      if (opts.max_height_bits > 0) {
        size_t hb = 0;
        for (const auto& c : r.new_point) hb = std::max(hb, height_bits(c));
        if (hb > opts.max_height_bits) {
          w.advance(std::move(r.new_point));
          traj.budget_stop_at = w.step_index;
          break;
        }
      }
    }
    w.advance(std::move(r.new_point));
  }
  return traj;
}

namespace detail {

// Multistep leapfrog control map, (x_2 - x_0)/(2h) = f(x_1). Test fixture
// and verification control only; it is expected to fail the conservation
// checks the polar map passes.
template <typename S>
Vec<S> leapfrog_step(const PolyVectorField<S>& f, const Vec<S>& x0, const Vec<S>& x1, const S& h) {
  S two_h = S(2) * h;
  return vec_add(x0, vec_scale(two_h, f.evaluate(x1)));
}

}  // namespace detail

}  // namespace polarint
