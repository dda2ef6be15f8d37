#pragma once

// File formats.
//
// Field description (JSON):
//   { "dimension": n, "components": [ [ {"coeff": <number|string>,
//     "exponents": [e0..e_{n-1}]}, ... ], ... ] }
// Hamiltonian:
//   { "dimension": n, "monomials": [ {...}, ... ], "K": [[...], ...] }
// Run configuration:
//   { "mode": "double"|"rational", "h": <number|string>, "steps": N,
//     "field": {...} | "hamiltonian": {...},
//     "window": { "points": [[...], ...] } |
//               { "x_init": [...], "bootstrap": {"method": "...",
//                 "substeps": N} },
//     "seed": N }
//
// Rational coefficients are serialized as "p/q" strings, doubles as decimal
// literals; trajectories are CSV with header step_index,t,x0..x{n-1}.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarint/hamiltonian.hpp"
#include "polarint/polarmap.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"

namespace polarint {

using nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename S>
S scalar_from_json(const json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if (j.is_number_integer()) return from_long<S>(j.get<long>());
  if (j.is_number_float()) {
    if constexpr (scalar_traits<S>::exact)
      throw config_error(
          "non-integer numeric literal in rational mode; use a \"p/q\" string");
    else
      return j.get<double>();
  }
  throw config_error("expected a number or numeric string");
}

template <typename S>
json scalar_to_json(const S& x) {
  if constexpr (scalar_traits<S>::exact)
    return scalar_to_string(x);
  else
    return x;
}

template <typename S>
std::vector<Monomial<S>> parse_monomials(const json& j, int dimension) {
  if (!j.is_array()) throw config_error("monomial list must be an array");
  std::vector<Monomial<S>> out;
  for (const auto& jm : j) {
    if (!jm.contains("coeff") || !jm.contains("exponents"))
      throw config_error("monomial needs \"coeff\" and \"exponents\"");
    Monomial<S> m;
    m.coeff = scalar_from_json<S>(jm["coeff"]);
    for (const auto& e : jm["exponents"]) {
      if (!e.is_number_integer()) throw config_error("exponents must be integers");
      m.exponents.push_back(e.get<int>());
    }
    if (int(m.exponents.size()) != dimension)
      throw config_error("exponent vector length != dimension");
    out.push_back(std::move(m));
  }
  return out;
}

template <typename S>
PolyVectorField<S> parse_field(const json& j) {
  if (!j.contains("dimension") || !j.contains("components"))
    throw config_error("field needs \"dimension\" and \"components\"");
  int n = j["dimension"].get<int>();
  if (n < 1) throw config_error("dimension must be >= 1");
  const auto& jc = j["components"];
  if (!jc.is_array() || int(jc.size()) != n)
    throw config_error("\"components\" must be an array of length dimension");
  std::vector<std::vector<Monomial<S>>> comps;
  for (const auto& c : jc) comps.push_back(parse_monomials<S>(c, n));
  try {
    return PolyVectorField<S>(n, std::move(comps));
  } catch (const field_error& e) {
    throw config_error(e.what());
  }
}

template <typename S>
Mat<S> parse_matrix(const json& j, int n) {
  if (!j.is_array() || int(j.size()) != n) throw config_error("matrix must be n rows");
  Mat<S> K(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || int(j[i].size()) != n)
      throw config_error("matrix rows must have n entries");
    for (int c = 0; c < n; ++c) K(i, c) = scalar_from_json<S>(j[i][c]);
  }
  return K;
}

template <typename S>
HamiltonianSpec<S> parse_hamiltonian(const json& j) {
  if (!j.contains("dimension") || !j.contains("monomials") || !j.contains("K"))
    throw config_error("hamiltonian needs \"dimension\", \"monomials\" and \"K\"");
  int n = j["dimension"].get<int>();
  if (n < 1) throw config_error("dimension must be >= 1");
  ScalarPoly<S> H(n, parse_monomials<S>(j["monomials"], n));
  Mat<S> K = parse_matrix<S>(j["K"], n);
  int k_hint = j.value("k", -1);
  try {
    return HamiltonianSpec<S>::make(std::move(H), std::move(K), k_hint);
  } catch (const field_error& e) {
    throw config_error(e.what());
  }
}

template <typename S>
struct RunConfig {
  std::optional<PolyVectorField<S>> field;
  std::optional<HamiltonianSpec<S>> hamiltonian;
  S h = S(0);
  long steps = 0;
  std::optional<std::vector<Vec<S>>> window_points;
  std::optional<Vec<S>> x_init;
  BootstrapConfig bootstrap;
  uint64_t seed = 1;

  int dimension() const {
    return field ? field->dimension() : hamiltonian->dimension();
  }

  // k = (field degree) - 1; the window size the run must use.
  int window_size() const {
    if (hamiltonian) return hamiltonian->k();
    int d = std::max(field->max_degree(), 1);
    return d - 1 >= 1 ? d - 1 : 1;
  }

  PolyVectorField<S> effective_field() const {
    return hamiltonian ? hamiltonian_field(*hamiltonian) : *field;
  }
};

inline std::string mode_of_config(const json& j) {
  std::string mode = j.value("mode", "double");
  if (mode != "double" && mode != "rational")
    throw config_error("mode must be \"double\" or \"rational\"");
  return mode;
}

template <typename S>
RunConfig<S> parse_run_config(const json& j) {
  RunConfig<S> cfg;
  if (j.contains("field") == j.contains("hamiltonian"))
    throw config_error("config needs exactly one of \"field\" or \"hamiltonian\"");
  if (j.contains("field")) cfg.field = parse_field<S>(j["field"]);
  if (j.contains("hamiltonian")) cfg.hamiltonian = parse_hamiltonian<S>(j["hamiltonian"]);
  if (!j.contains("h")) throw config_error("config needs \"h\"");
  cfg.h = scalar_from_json<S>(j["h"]);
  if (is_zero(cfg.h)) throw config_error("h must be nonzero");
  cfg.steps = j.value("steps", 0L);
  if (cfg.steps < 0) throw config_error("steps must be >= 0");
  cfg.seed = j.value("seed", 1UL);
  int n = cfg.dimension();
  int k = cfg.window_size();
  if (!j.contains("window")) throw config_error("config needs \"window\"");
  const auto& jw = j["window"];
  if (jw.contains("points")) {
    std::vector<Vec<S>> pts;
    for (const auto& jp : jw["points"]) {
      Vec<S> p;
      for (const auto& c : jp) p.push_back(scalar_from_json<S>(c));
      if (int(p.size()) != n) throw config_error("window point length != dimension");
      pts.push_back(std::move(p));
    }
    if (int(pts.size()) != k) {
      std::ostringstream os;
      os << "window has " << pts.size() << " points but the field has degree " << (k + 1)
         << ", which requires k = " << k;
      throw config_error(os.str());
    }
    cfg.window_points = std::move(pts);
  } else if (jw.contains("x_init")) {
    Vec<S> p;
    for (const auto& c : jw["x_init"]) p.push_back(scalar_from_json<S>(c));
    if (int(p.size()) != n) throw config_error("x_init length != dimension");
    cfg.x_init = std::move(p);
    if (jw.contains("bootstrap")) {
      const auto& jb = jw["bootstrap"];
      std::string method = jb.value("method", "reference-one-step");
      if (method == "reference-one-step")
        cfg.bootstrap.method = BootstrapConfig::Method::reference_one_step;
      else if (method == "exact-provided")
        throw config_error("exact-provided bootstrap requires window \"points\"");
      else
        throw config_error("unknown bootstrap method '" + method + "'");
      cfg.bootstrap.substeps = jb.value("substeps", 100);
      if (cfg.bootstrap.substeps < 1) throw config_error("substeps must be >= 1");
    }
  } else {
    throw config_error("window needs \"points\" or \"x_init\"");
  }
  return cfg;
}

template <typename S>
PolarWindow<S> build_window(const RunConfig<S>& cfg) {
  int k = cfg.window_size();
  if (cfg.window_points) return PolarWindow<S>::from_points(*cfg.window_points, cfg.h);
  return bootstrap_window(cfg.effective_field(), *cfg.x_init, k, cfg.h, cfg.bootstrap);
}

// --- trajectory CSV ---------------------------------------------------------

template <typename S>
void write_trajectory_csv(std::ostream& os, const Trajectory<S>& traj) {
  int n = traj.points.empty() ? 0 : int(traj.points.front().size());
  os << "step_index,t";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  os << "\n";
  for (size_t m = 0; m < traj.points.size(); ++m) {
    S t = S(long(m)) * traj.h;
    os << m << "," << scalar_to_string(t);
    for (const auto& c : traj.points[m]) os << "," << scalar_to_string(c);
    os << "\n";
  }
}

template <typename S>
std::vector<Vec<S>> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw config_error("empty trajectory file");
  std::vector<Vec<S>> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw config_error("bad trajectory row '" + line + "'");
    Vec<S> p;
    for (size_t i = 2; i < cells.size(); ++i) p.push_back(parse_scalar<S>(cells[i]));
    pts.push_back(std::move(p));
  }
  return pts;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("JSON parse error in '" + path + "': " + e.what());
  }
  return j;
}

}  // namespace polarint
