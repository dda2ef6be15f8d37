#pragma once

// The verification suite behind `polarint verify`: each check compares the
// discretization against an independent route (inclusion-exclusion oracle,
// reversed stepping, density ratios, scaling action) and reports a residual
// against a pinned tolerance. Rational mode demands exact zeros.

#include <sstream>
#include <string>
#include <vector>

#include "polarint/analysis.hpp"
#include "polarint/generate.hpp"
#include "polarint/hamiltonian.hpp"
#include "polarint/io.hpp"
#include "polarint/polarize.hpp"
#include "polarint/polarmap.hpp"

namespace polarint {

inline constexpr double kKIntegralTolDouble = 1e-11;
inline constexpr double kLeapfrogDriftFloor = 1e-3;
inline constexpr double kSelfAdjointTolDouble = 1e-12;
inline constexpr double kScalingTolDouble = 1e-10;
inline constexpr double kOracleTolDouble = 1e-12;
inline constexpr size_t kVerifyHeightBudgetBits = 200000;

struct CheckResult {
  std::string name;
  std::string status;  // "pass" | "fail" | "expected-fail" | "skipped"
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string details;
};

namespace detail {

inline CheckResult make_result(const std::string& name, bool pass, double residual, double tol,
                               const std::string& details) {
  return CheckResult{name, pass ? "pass" : "fail", residual, tol, details};
}

template <typename S>
double rel_diff(const Vec<S>& a, const Vec<S>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double scale = std::max(1.0, std::fabs(to_double(b[i])));
    m = std::max(m, std::fabs(to_double(a[i]) - to_double(b[i])) / scale);
  }
  return m;
}

}  // namespace detail

template <typename S>
struct VerifyInput {
  RunConfig<S> config;
  bool leapfrog_control = false;
  uint64_t seed = 1;
};

template <typename S>
CheckResult check_oracle_equivalence(const VerifyInput<S>& in) {
  double tol = scalar_traits<S>::exact ? 0.0 : kOracleTolDouble;
  PolyVectorField<S> f = in.config.effective_field();
  int k = in.config.window_size();
  auto deg = f.homogeneous_degree();
  if (!f.is_zero_field() && deg != std::optional<int>(k + 1))
    return CheckResult{"oracle-equivalence", "skipped", 0.0, tol,
                       "field is not homogeneous of degree k+1; oracle applies after suspension"};
  SymMultilinearForm<S> F = polarize(f, k + 1);
  Rng rng(in.seed);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto args = rand_window_points<S>(rng, f.dimension(), k + 1);
    Vec<S> via_form = eval_form(F, args);
    Vec<S> via_subsets = eval_form_subsets(f, args);
    if constexpr (scalar_traits<S>::exact) {
      if (!(via_form == via_subsets)) ok = false;
    } else {
      worst = std::max(worst, detail::rel_diff(via_form, via_subsets));
    }
  }
  if (in.config.hamiltonian) {
    // Dual route: the step assembled from the Hamiltonian tensor must agree
    // with the step assembled from polarize(K grad H).
    const auto& spec = *in.config.hamiltonian;
    Rng rng2(in.seed + 1);
    for (int trial = 0; trial < 10; ++trial) {
      auto w = PolarWindow<S>::from_points(rand_window_points<S>(rng2, spec.dimension(), k),
                                           in.config.h);
      auto via_h = polar_hamiltonian_step(spec, w);
      auto via_f = polar_step(F, w);
      if (via_h.singular != via_f.singular) ok = false;
      if (via_h.singular) continue;
      if constexpr (scalar_traits<S>::exact) {
        if (!(via_h.new_point == via_f.new_point)) ok = false;
      } else {
        worst = std::max(worst, detail::rel_diff(via_h.new_point, via_f.new_point));
      }
    }
  }
  if (!scalar_traits<S>::exact) ok = worst <= tol;
  return detail::make_result("oracle-equivalence", ok, worst, tol,
                             "eval_form vs inclusion-exclusion; tensor vs field route");
}

template <typename S>
CheckResult check_self_adjoint_config(const VerifyInput<S>& in) {
  double tol = scalar_traits<S>::exact ? 0.0 : kSelfAdjointTolDouble;
  PolyVectorField<S> f = in.config.effective_field();
  int k = in.config.window_size();
  if (!f.is_zero_field() && f.homogeneous_degree() != std::optional<int>(k + 1))
    return CheckResult{"self-adjoint", "skipped", 0.0, tol,
                       "field is not homogeneous of degree k+1"};
  SymMultilinearForm<S> F = polarize(f, k + 1);
  auto w = build_window(in.config);
  auto rep = check_self_adjoint(F, w);
  if (rep.singular)
    return CheckResult{"self-adjoint", "fail", 0.0, tol, "singular step at the config window"};
  return detail::make_result("self-adjoint", rep.ok, rep.residual, tol,
                             "forward then reversed with -h returns x_0");
}

template <typename S>
CheckResult check_scaling_config(const VerifyInput<S>& in) {
  double tol = scalar_traits<S>::exact ? 0.0 : kScalingTolDouble;
  int k = in.config.window_size();
  if (k < 2)
    return CheckResult{"scaling", "skipped", 0.0, tol, "k-symmetry group is trivial for k = 1"};
  PolyVectorField<S> f = in.config.effective_field();
  if (!f.is_zero_field() && f.homogeneous_degree() != std::optional<int>(k + 1))
    return CheckResult{"scaling", "skipped", 0.0, tol,
                       "field is not homogeneous of degree k+1"};
  SymMultilinearForm<S> F = polarize(f, k + 1);
  auto w = build_window(in.config);
  Rng rng(in.seed + 2);
  bool ok = true;
  for (int trial = 0; trial < 5; ++trial) {
    auto lambdas = rand_unit_product_lambdas<S>(rng, k);
    auto rep = check_scaling(F, w, lambdas,
                             in.config.hamiltonian ? &*in.config.hamiltonian : nullptr, tol);
    if (rep.singular) continue;
    if (!rep.ok()) ok = false;
  }
  return detail::make_result("scaling", ok, 0.0, tol,
                             "unit-product scalings: step equivariance, density and "
                             "pairing-product invariance");
}

template <typename S>
CheckResult check_k_integrals_config(const VerifyInput<S>& in) {
  double tol = scalar_traits<S>::exact ? 0.0 : kKIntegralTolDouble;
  if (!in.config.hamiltonian)
    return CheckResult{"k-integrals", "skipped", 0.0, tol, "no Hamiltonian in config"};
  const auto& spec = *in.config.hamiltonian;
  if (!spec.has_omega())
    return CheckResult{"k-integrals", "skipped", 0.0, tol,
                       "K is not invertible; pairings undefined"};
  int k = spec.k();
  auto w = build_window(in.config);
  long steps = std::max<long>(in.config.steps, 4L * k);
  IntegrateOptions opts;
  if constexpr (scalar_traits<S>::exact) opts.max_height_bits = kVerifyHeightBudgetBits;
  SymMultilinearForm<S> F = polarize(hamiltonian_field(spec), k + 1);

  if (in.leapfrog_control) {
    // Control harness: the leapfrog map is expected to violate the pairing
    // conservation the polar map satisfies.
    PolyVectorField<S> f = hamiltonian_field(spec);
    std::vector<Vec<S>> pts = w.points;
    while (int(pts.size()) < 2) pts.push_back(pts.back());
    std::vector<Vec<S>> lf_pts = {pts[0], pts[1]};
    for (long s = 0; s < steps; ++s) {
      auto nxt = detail::leapfrog_step(f, lf_pts[lf_pts.size() - 2], lf_pts.back(), in.config.h);
      lf_pts.push_back(nxt);
    }
    auto series = k_integral_series(spec, lf_pts);
    auto drift = drift_series(series, 2);
    bool drifted = drift.max_rel >= kLeapfrogDriftFloor;
    std::ostringstream os;
    os << "leapfrog control drift " << drift.max_rel << " (floor " << kLeapfrogDriftFloor << ")";
    return CheckResult{"k-integrals", drifted ? "expected-fail" : "fail", drift.max_rel,
                       kLeapfrogDriftFloor, os.str()};
  }

  auto traj = integrate(F, w, steps, opts);
  if (int(traj.points.size()) < 2 * k + 2) {
    std::string why = traj.singular_at ? "trajectory hit the singular locus"
                                       : "height budget left too few points to compare";
    return CheckResult{"k-integrals", "fail", 0.0, tol, why};
  }
  auto series = k_integral_series(spec, traj.points);
  auto drift = drift_series(series, k);
  bool ok = scalar_traits<S>::exact ? drift.exact_zero : drift.max_rel <= tol;
  std::ostringstream os;
  os << drift.samples << " comparisons over " << (traj.points.size() - size_t(k)) << " steps";
  if (traj.budget_stop_at) os << " (height budget reached)";
  return detail::make_result("k-integrals", ok, drift.max_rel, tol, os.str());
}

template <typename S>
CheckResult check_measure_config(const VerifyInput<S>& in) {
  double tol = scalar_traits<S>::exact ? 0.0 : kMeasureFdTol;
  if (!in.config.hamiltonian)
    return CheckResult{"measure-jacobian", "skipped", 0.0, tol, "no Hamiltonian in config"};
  const auto& spec = *in.config.hamiltonian;
  auto w = build_window(in.config);
  auto rep = check_measure_jacobian(spec, w);
  if (rep.singular)
    return CheckResult{"measure-jacobian", "fail", 0.0, tol, "density undefined at this window"};
  bool ok = rep.closed_matches_ratio;
  double resid = 0.0;
  std::string details = "closed-form Jacobian det vs density ratio";
  if constexpr (!scalar_traits<S>::exact) {
    ok = ok && rep.fd_matches;
    resid = rep.fd_rel_error;
    details += "; finite-difference cross-check";
  }
  return detail::make_result("measure-jacobian", ok, resid, tol, details);
}

template <typename S>
std::vector<CheckResult> run_verification(const VerifyInput<S>& in) {
  std::vector<CheckResult> out;
  out.push_back(check_k_integrals_config(in));
  out.push_back(check_measure_config(in));
  out.push_back(check_self_adjoint_config(in));
  out.push_back(check_scaling_config(in));
  out.push_back(check_oracle_equivalence(in));
  return out;
}

inline bool all_checks_ok(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (c.status == "fail") return false;
  return true;
}

}  // namespace polarint
