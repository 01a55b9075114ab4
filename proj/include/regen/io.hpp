#pragma once

// Serialization: chain definition files, JSON reports, CSV curves and
// trajectory dumps, and atomic file output.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "regen/chain_models.hpp"
#include "regen/common.hpp"
#include "regen/rng.hpp"
#include "regen/split_regen.hpp"
#include "regen/variance.hpp"
#include "regen/verify.hpp"

namespace regen {

using nlohmann::json;

/// Writes to a sibling temporary file, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require_guard(static_cast<bool>(out), "cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    require_guard(static_cast<bool>(out), "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Finite chain from {states, matrix, small_set, m, delta, nu[, name, ergodicity]}.
/// `states` is a label list or a count; `small_set` lists labels or indices.
inline FiniteChain chain_from_json(const json& j) {
  require(j.is_object(), "chain definition must be a JSON object");
  for (const char* key : {"states", "matrix", "small_set", "m", "delta", "nu"})
    require(j.contains(key), std::string("chain definition missing field '") + key + "'");
  std::vector<std::string> labels;
  if (j["states"].is_number_integer()) {
    for (int i = 0; i < j["states"].get<int>(); ++i) labels.push_back(std::to_string(i));
  } else {
    require(j["states"].is_array(), "states must be a count or a label list");
    for (const auto& s : j["states"]) labels.push_back(s.is_string() ? s.get<std::string>() : s.dump());
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto& rows = j["matrix"];
  require(rows.is_array() && static_cast<Eigen::Index>(rows.size()) == n, "matrix must have one row per state");
  Matrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == n, "matrix rows must have one entry per state");
    for (Eigen::Index k = 0; k < n; ++k) p(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  FiniteMinorization mz;
  mz.small_set.assign(labels.size(), false);
  for (const auto& s : j["small_set"]) {
    if (s.is_number_integer()) {
      const auto idx = s.get<long>();
      require(idx >= 0 && idx < n, "small_set index out of range");
      mz.small_set[static_cast<std::size_t>(idx)] = true;
    } else {
      const auto it = std::find(labels.begin(), labels.end(), s.get<std::string>());
      require(it != labels.end(), "small_set label not found: " + s.get<std::string>());
      mz.small_set[static_cast<std::size_t>(it - labels.begin())] = true;
    }
  }
  const long m = j["m"].get<long>();
  require(m >= 1, "m must be positive");
  mz.m = static_cast<std::size_t>(m);
  mz.delta = j["delta"].get<double>();
  require(j["nu"].is_array() && static_cast<Eigen::Index>(j["nu"].size()) == n, "nu must have one entry per state");
  mz.nu = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) mz.nu(i) = j["nu"][static_cast<std::size_t>(i)].get<double>();
  std::optional<Ergodicity> erg;
  if (j.contains("ergodicity")) erg = Ergodicity{j["ergodicity"].at("G").get<double>(), j["ergodicity"].at("rho").get<double>()};
  return FiniteChain(FiniteKernel(p, labels), mz, erg, j.value("name", std::string("chain-file")));
}

inline FiniteChain load_chain_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read chain file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Error::Kind::validation, std::string("malformed chain file: ") + e.what());
  }
  return chain_from_json(j);
}

inline json to_json(const MinorizationReport& r) {
  return {{"pass", r.pass},
          {"sampled", r.sampled},
          {"worst_margin", r.worst_margin},
          {"empirical_min_ratio", r.empirical_min_ratio},
          {"samples", r.samples},
          {"worst_x", r.worst_x},
          {"worst_y", r.worst_y},
          {"nu_small_set", r.nu_small_set},
          {"notes", r.notes}};
}

inline json to_json(const VarianceEstimate& v) {
  json j = {{"kind", v.kind}, {"value", v.value}, {"n", v.count}};
  j["se"] = v.se ? json(*v.se) : json(nullptr);
  return j;
}

inline json to_json(const TailCurve& c) {
  json j = {{"provenance", to_string(c.provenance)}, {"t", c.t}, {"estimate", c.estimate}};
  j["se"] = c.se.empty() ? json(nullptr) : json(c.se);
  if (c.provenance == Provenance::monte_carlo) j["replicas"] = c.replicas;
  return j;
}

inline json to_json(const DominationVerdict& v) {
  return {{"formula", v.formula}, {"pass", v.pass}, {"worst_margin", v.worst_margin}, {"worst_t", v.worst_t}};
}

inline json to_json(const StructureReport& r) {
  return {{"gap_acf", r.gap_acf},   {"chi_acf", r.chi_acf},         {"band", r.band},
          {"ks_p_value", r.ks_p_value}, {"level", r.level},          {"blocks", r.blocks},
          {"gap_acf_pass", r.gap_acf_pass}, {"chi_acf_pass", r.chi_acf_pass}, {"ks_pass", r.ks_pass},
          {"excursion_lag1", r.chi_acf.empty() ? 0.0 : r.chi_acf.front()}};
}

inline json to_json(const VerificationReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  return {{"chain", r.chain},
          {"f", r.functional},
          {"n", r.n},
          {"z", r.z},
          {"seed", r.seed},
          {"seed_derivation", kSeedDerivation},
          {"parameters", r.parameters},
          {"tail", to_json(r.tail)},
          {"bounds", r.bounds},
          {"verdicts", verdicts},
          {"pass", r.pass()}};
}

/// t, estimate, se, bound_<name>... one row per grid point.
inline std::string curves_csv(const TailCurve& tail, const std::map<std::string, std::vector<double>>& bounds) {
  std::ostringstream out;
  out << "t,estimate,se";
  for (const auto& [name, v] : bounds) out << ",bound_" << name;
  out << "\n";
  for (std::size_t i = 0; i < tail.t.size(); ++i) {
    out << format_double(tail.t[i]) << ',' << format_double(tail.estimate[i]) << ','
        << (tail.se.empty() ? std::string() : format_double(tail.se[i]));
    for (const auto& [name, v] : bounds) out << ',' << format_double(v[i]);
    out << "\n";
  }
  return out.str();
}

/// index, state, level, is_regeneration.
template <class State, class Coord>
std::string trajectory_csv(const SplitTrajectory<State>& traj, const Coord& coordinate) {
  std::ostringstream out;
  out << "index,state,level,is_regeneration\n";
  std::size_t next = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    bool regen = false;
    if (next < traj.regenerations.size() && traj.regenerations[next] == i) {
      regen = true;
      ++next;
    }
    out << i << ',' << coordinate(traj.states[i]) << ',' << static_cast<int>(traj.levels[i]) << ','
        << (regen ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace regen
