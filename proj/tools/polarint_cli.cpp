// polarint command line: polarize / integrate / verify / entropy.
//
// Exit codes: 0 success, 1 usage or config error, 2 singularity encountered,
// 3 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polarint/polarint.hpp"

namespace {

using namespace polarint;

enum ExitCode { kOk = 0, kUsage = 1, kSingular = 2, kVerifyFailed = 3 };

int log_level() {
  static int level = [] {
    const char* env = std::getenv("POLARINT_LOG");
    if (!env) return 0;
    std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

struct CliOptions {
  std::string config_path;
  std::string field_path;
  std::string out_path;
  std::string report_path;
  std::string mode_override;
  int iters = 14;
  uint64_t seed = 0;  // 0 = take from config (default 1)
  bool homogenize = false;
  bool leapfrog_control = false;
};

std::string effective_mode(const json& j, const CliOptions& opt) {
  if (!opt.mode_override.empty()) {
    if (opt.mode_override != "double" && opt.mode_override != "rational")
      throw config_error("mode must be \"double\" or \"rational\"");
    return opt.mode_override;
  }
  return mode_of_config(j);
}

template <typename S>
int cmd_polarize(const json& jfield, const CliOptions& opt) {
  PolyVectorField<S> f = parse_field<S>(jfield);
  if (!f.homogeneous_degree() && !f.is_zero_field()) {
    if (!opt.homogenize) {
      std::cerr << "error: field is not homogeneous; pass --homogenize to suspend it "
                   "to a homogeneous field one dimension up\n";
      return kUsage;
    }
    f = f.homogenize();
    log_info("suspended nonhomogeneous field to dimension " + std::to_string(f.dimension()));
  }
  if (f.is_zero_field()) {
    for (int i = 0; i < f.dimension(); ++i)
      std::cout << "component " << i << ": (empty)\n";
    return kOk;
  }
  SymMultilinearForm<S> F = polarize(f);
  for (int comp = 0; comp < F.output_arity(); ++comp) {
    std::cout << "component " << comp << ":\n";
    for (const auto& [e, c] : F.coefficients()[comp]) {
      std::cout << "  [";
      for (size_t i = 0; i < e.size(); ++i) std::cout << (i ? "," : "") << e[i];
      std::cout << "]  coeff " << scalar_to_string(c) << "  : ";
      auto idx = detail::index_sequence_of(e);
      bool first = true;
      do {
        if (!first) std::cout << " + ";
        first = false;
        for (size_t s = 0; s < idx.size(); ++s)
          std::cout << (s ? " " : "") << "x" << idx[s] << "_" << (s + 1);
      } while (std::next_permutation(idx.begin(), idx.end()));
      std::cout << "\n";
    }
    if (F.coefficients()[comp].empty()) std::cout << "  (empty)\n";
  }
  return kOk;
}

template <typename S>
int cmd_integrate(const json& jcfg, const CliOptions& opt) {
  RunConfig<S> cfg = parse_run_config<S>(jcfg);
  if (opt.seed) cfg.seed = opt.seed;
  auto w = build_window(cfg);
  PolyVectorField<S> f = cfg.effective_field();
  int k = cfg.window_size();
  Trajectory<S> traj;
  if (f.is_zero_field() || f.homogeneous_degree() == k + 1) {
    SymMultilinearForm<S> F = polarize(f, k + 1);
    traj = integrate(F, w, cfg.steps);
  } else {
    log_info("field is not homogeneous of degree k+1: integrating the suspended polar map");
    traj = integrate_suspended(f, w, cfg.steps);
  }
  std::ofstream out(opt.out_path);
  if (!out) {
    std::cerr << "error: cannot open output file '" << opt.out_path << "'\n";
    return kUsage;
  }
  write_trajectory_csv(out, traj);
  log_debug("wrote " + std::to_string(traj.points.size()) + " points");
  if (traj.extension)
    log_info("suspension beyond the quadratic case: results are an empirical extension");
  if (traj.singular_at) {
    std::cerr << "singularity: the linear system became singular at step index "
              << *traj.singular_at << "; partial trajectory written to " << opt.out_path << "\n";
    return kSingular;
  }
  return kOk;
}

template <typename S>
int cmd_verify(const json& jcfg, const CliOptions& opt) {
  VerifyInput<S> in;
  in.config = parse_run_config<S>(jcfg);
  in.seed = opt.seed ? opt.seed : in.config.seed;
  in.leapfrog_control = opt.leapfrog_control;
  auto checks = run_verification(in);
  json jr;
  jr["schema"] = 1;
  jr["mode"] = scalar_traits<S>::name;
  jr["seed"] = in.seed;
  if (in.config.field && !in.config.field->homogeneous_degree() &&
      !in.config.field->is_zero_field())
    jr["extension"] = suspension_is_extension(*in.config.field, in.config.window_size());
  jr["checks"] = json::array();
  for (const auto& c : checks) {
    jr["checks"].push_back({{"name", c.name},
                            {"status", c.status},
                            {"max_residual", c.max_residual},
                            {"tolerance", c.tolerance},
                            {"details", c.details}});
    log_info(c.name + ": " + c.status);
  }
  std::ofstream out(opt.report_path);
  if (!out) {
    std::cerr << "error: cannot open report file '" << opt.report_path << "'\n";
    return kUsage;
  }
  out << jr.dump(2) << "\n";
  return all_checks_ok(checks) ? kOk : kVerifyFailed;
}

template <typename S>
int cmd_entropy(const json& jcfg, const CliOptions& opt) {
  if constexpr (!scalar_traits<S>::exact) {
    std::cerr << "error: the entropy probe requires rational mode\n";
    return kUsage;
  } else {
    RunConfig<S> cfg = parse_run_config<S>(jcfg);
    PolyVectorField<S> f = cfg.effective_field();
    int k = cfg.window_size();
    auto w = build_window(cfg);
    SymMultilinearForm<S> F;
    if (f.is_zero_field() || f.homogeneous_degree() == k + 1) {
      F = polarize(f, k + 1);
    } else {
      // Iterate the suspension; the auxiliary coordinate stays exactly 1 and
      // contributes nothing to the heights.
      log_info("field is not homogeneous of degree k+1: probing the suspended polar map");
      F = polarize(f.homogenize(k + 1), k + 1);
      for (auto& p : w.points) p.push_back(S(1));
    }
    HeightGrowthOptions hopts;
    hopts.iters = opt.iters;
    auto est = height_growth(F, w, hopts);
    json jr;
    jr["schema"] = 1;
    jr["mode"] = "rational";
    jr["iters"] = est.iters_done;
    jr["heights"] = est.heights;
    jr["growth_ratios"] = est.growth_ratios;
    jr["tail_mean_ratio"] = est.tail_mean_ratio;
    jr["tail_decay"] = est.tail_decay;
    jr["classification"] = growth_class_name(est.classification);
    jr["thresholds"] = {{"subexponential", est.sub_threshold}, {"exponential", est.exp_threshold}};
    jr["low_iteration_count"] = est.low_iteration_count;
    jr["elapsed_seconds"] = est.elapsed_seconds;
    if (est.singular_at) jr["singular_at"] = *est.singular_at;
    std::ofstream out(opt.report_path);
    if (!out) {
      std::cerr << "error: cannot open report file '" << opt.report_path << "'\n";
      return kUsage;
    }
    out << jr.dump(2) << "\n";
    if (est.singular_at) {
      std::cerr << "singularity: iteration stopped at step index " << *est.singular_at << "\n";
      return kSingular;
    }
    return kOk;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polar-map discretization of polynomial vector fields"};
  app.require_subcommand(1);
  CliOptions opt;

  auto* sub_polarize = app.add_subcommand("polarize", "print the symmetric multilinear form");
  sub_polarize->add_option("field", opt.field_path, "field description file")->required();
  sub_polarize->add_flag("--homogenize", opt.homogenize, "suspend a nonhomogeneous field first");
  sub_polarize->add_option("--mode", opt.mode_override, "double or rational (default rational)");

  auto* sub_integrate = app.add_subcommand("integrate", "iterate the polar map");
  sub_integrate->add_option("--config", opt.config_path)->required();
  sub_integrate->add_option("--out", opt.out_path, "trajectory CSV")->required();
  sub_integrate->add_option("--mode", opt.mode_override);
  sub_integrate->add_option("--seed", opt.seed);

  auto* sub_verify = app.add_subcommand("verify", "run the verification checks");
  sub_verify->add_option("--config", opt.config_path)->required();
  sub_verify->add_option("--report", opt.report_path, "JSON report")->required();
  sub_verify->add_option("--mode", opt.mode_override);
  sub_verify->add_option("--seed", opt.seed);
  sub_verify->add_flag("--leapfrog-control", opt.leapfrog_control,
                       "run the leapfrog control map instead (expected to fail conservation)");

  auto* sub_entropy = app.add_subcommand("entropy", "height-growth integrability probe");
  sub_entropy->add_option("--config", opt.config_path)->required();
  sub_entropy->add_option("--report", opt.report_path, "JSON report")->required();
  sub_entropy->add_option("--iters", opt.iters, "iterations (default 14)");
  sub_entropy->add_option("--mode", opt.mode_override);
  sub_entropy->add_option("--seed", opt.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (sub_polarize->parsed()) {
      json j = polarint::load_json_file(opt.field_path);
      std::string mode = opt.mode_override.empty() ? "rational" : opt.mode_override;
      if (mode == "double") return cmd_polarize<double>(j, opt);
      if (mode == "rational") return cmd_polarize<polarint::Rational>(j, opt);
      std::cerr << "error: unknown mode '" << mode << "'\n";
      return kUsage;
    }
    json j = polarint::load_json_file(opt.config_path);
    std::string mode = effective_mode(j, opt);
    if (sub_integrate->parsed())
      return mode == "rational" ? cmd_integrate<polarint::Rational>(j, opt)
                                : cmd_integrate<double>(j, opt);
    if (sub_verify->parsed())
      return mode == "rational" ? cmd_verify<polarint::Rational>(j, opt)
                                : cmd_verify<double>(j, opt);
    if (sub_entropy->parsed())
      return mode == "rational" ? cmd_entropy<polarint::Rational>(j, opt)
                                : cmd_entropy<double>(j, opt);
  } catch (const polarint::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const polarint::field_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const polarint::scalar_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
