#pragma once

// Command-line front end: simulate | bounds | variance | verify | oracle.
// Settings resolve as flag > config file > REGEN_BERNSTEIN_SEED (seed only) > default.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "regen/bounds.hpp"
#include "regen/chain_models.hpp"
#include "regen/common.hpp"
#include "regen/formulas.hpp"
#include "regen/io.hpp"
#include "regen/rng.hpp"
#include "regen/split_regen.hpp"
#include "regen/variance.hpp"
#include "regen/verify.hpp"

namespace regen::cli {

struct RunConfig {
  std::string chain = "two-state";
  std::string chain_file;
  double a = 0.5;
  double b = 0.5;
  double delta = 1.0;
  int precision = 64;
  std::string f = "";  // empty: indicator_centered for finite chains, cos2pi for the mod-1 chain
  std::vector<double> f_values;
  std::size_t f_state = 1;
  std::size_t n = 12;
  std::vector<double> t_grid;
  std::size_t t_points = 50;
  std::size_t replicas = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format = "json";
  std::vector<std::string> formulas;
  double alpha = 1.0;
  double safety = 1.2;
  double z = 3.0;
  double p = 2.0 / 3.0;
  std::string init = "point";
  double x0 = 0.0;
  bool exact = false;
  std::size_t cycles = 10000;
  std::size_t batch_n = 1000000;
};

namespace detail {

/// Flag values as parsed; `given` records which flags appeared.
struct FlagValues {
  RunConfig v;
  std::string config;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& key) const {
    const auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }
};

inline void add_common(CLI::App& app, FlagValues& fv) {
  auto& v = fv.v;
  auto& o = fv.opts;
  o["config"] = app.add_option("--config", fv.config, "JSON run configuration");
  o["seed"] = app.add_option("--seed", v.seed, "master seed");
  o["replicas"] = app.add_option("--replicas", v.replicas, "Monte Carlo replicas");
  o["threads"] = app.add_option("--threads", v.threads, "worker cap (0: hardware concurrency)");
  o["out"] = app.add_option("--out", v.out, "output directory (default: stdout)");
  o["format"] = app.add_option("--format", v.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  o["chain"] = app.add_option("--chain", v.chain, "built-in chain: two-state | singular-mod1");
  o["chain_file"] = app.add_option("--chain-file", v.chain_file, "finite chain definition (JSON)");
  o["a"] = app.add_option("--a", v.a, "two-state P(0,1)");
  o["b"] = app.add_option("--b", v.b, "two-state P(1,0)");
  o["delta"] = app.add_option("--delta", v.delta, "two-state minorization delta");
  o["precision"] = app.add_option("--precision", v.precision, "mod-1 chain bit precision");
  o["f"] = app.add_option("--f", v.f, "indicator_centered | identity_centered | cos2pi | tabulated");
  o["f_values"] = app.add_option("--f-values", v.f_values, "tabulated f, one value per state")->delimiter(',');
  o["f_state"] = app.add_option("--f-state", v.f_state, "state whose indicator is centered");
  o["n"] = app.add_option("--n", v.n, "horizon");
  o["t_grid"] = app.add_option("--t-grid", v.t_grid, "comma-separated t values")->delimiter(',');
  o["t_points"] = app.add_option("--t-points", v.t_points, "points of the default grid [0, n·sup|f|]");
  o["formulas"] = app.add_option("--formulas", v.formulas, "bound formulas to compare")->delimiter(',');
  o["alpha"] = app.add_option("--alpha", v.alpha, "Orlicz exponent for fitted parameters");
  o["safety"] = app.add_option("--safety", v.safety, "inflation of fitted norms");
  o["z"] = app.add_option("--z", v.z, "domination slack in standard errors");
  o["p"] = app.add_option("--p", v.p, "split parameter p of the second theorem");
  o["init"] = app.add_option("--init", v.init, "point | nu | stationary")->check(CLI::IsMember({"point", "nu", "stationary"}));
  o["x0"] = app.add_option("--x0", v.x0, "initial state (index, or coordinate for the mod-1 chain)");
  o["exact"] = app.add_flag("--exact", v.exact, "exact enumeration instead of Monte Carlo");
  o["cycles"] = app.add_option("--cycles", v.cycles, "regeneration cycles for fitting and estimation");
  o["batch_n"] = app.add_option("--batch-n", v.batch_n, "path length for batch means");
}

template <class T>
void take(const nlohmann::json& cfg, const FlagValues& fv, const std::string& key, T& target, const T& flag) {
  if (fv.given(key)) {
    target = flag;
  } else if (cfg.contains(key)) {
    try {
      target = cfg.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Error::Kind::validation, "config field '" + key + "' has the wrong type");
    }
  }
}

inline RunConfig resolve(const FlagValues& fv) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!fv.config.empty()) {
    std::ifstream in(fv.config);
    require(static_cast<bool>(in), "cannot read config file " + fv.config);
    try {
      in >> cfg;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Error::Kind::validation, std::string("malformed config: ") + e.what());
    }
    require(cfg.is_object(), "config must be a JSON object");
    for (const auto& [k, val] : cfg.items())
      require(fv.opts.count(k) > 0 && k != "config", "unknown config field '" + k + "'");
  }
  RunConfig r;
  const auto& f = fv.v;
  if (!fv.given("seed") && !cfg.contains("seed")) {
    if (const char* env = std::getenv("REGEN_BERNSTEIN_SEED")) {
      std::size_t pos = 0;
      try {
        r.seed = std::stoull(env, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      require(pos > 0 && env[pos] == '\0', "REGEN_BERNSTEIN_SEED is not an unsigned integer");
    }
  }
  take(cfg, fv, "seed", r.seed, f.seed);
  take(cfg, fv, "replicas", r.replicas, f.replicas);
  take(cfg, fv, "threads", r.threads, f.threads);
  take(cfg, fv, "out", r.out, f.out);
  take(cfg, fv, "format", r.format, f.format);
  take(cfg, fv, "chain", r.chain, f.chain);
  take(cfg, fv, "chain_file", r.chain_file, f.chain_file);
  take(cfg, fv, "a", r.a, f.a);
  take(cfg, fv, "b", r.b, f.b);
  take(cfg, fv, "delta", r.delta, f.delta);
  take(cfg, fv, "precision", r.precision, f.precision);
  take(cfg, fv, "f", r.f, f.f);
  take(cfg, fv, "f_values", r.f_values, f.f_values);
  take(cfg, fv, "f_state", r.f_state, f.f_state);
  take(cfg, fv, "n", r.n, f.n);
  take(cfg, fv, "t_grid", r.t_grid, f.t_grid);
  take(cfg, fv, "t_points", r.t_points, f.t_points);
  take(cfg, fv, "formulas", r.formulas, f.formulas);
  take(cfg, fv, "alpha", r.alpha, f.alpha);
  take(cfg, fv, "safety", r.safety, f.safety);
  take(cfg, fv, "z", r.z, f.z);
  take(cfg, fv, "p", r.p, f.p);
  take(cfg, fv, "init", r.init, f.init);
  take(cfg, fv, "x0", r.x0, f.x0);
  take(cfg, fv, "exact", r.exact, f.exact);
  take(cfg, fv, "cycles", r.cycles, f.cycles);
  take(cfg, fv, "batch_n", r.batch_n, f.batch_n);
  require(r.format == "json" || r.format == "csv", "format must be json or csv");
  require(r.init == "point" || r.init == "nu" || r.init == "stationary", "init must be point, nu or stationary");
  return r;
}

using AnyChain = std::variant<FiniteChain, SingularMod1Chain>;

inline AnyChain build_chain(const RunConfig& c) {
  if (!c.chain_file.empty()) return load_chain_file(c.chain_file);
  if (c.chain == "two-state") return make_two_state(c.a, c.b, c.delta);
  if (c.chain == "singular-mod1") return make_singular_mod1(c.precision);
  throw Error(Error::Kind::validation, "unknown chain '" + c.chain + "'");
}

inline std::string chain_id(const RunConfig& c) {
  if (!c.chain_file.empty()) return "file:" + c.chain_file;
  if (c.chain == "two-state") return "two-state(a=" + format_double(c.a) + ",b=" + format_double(c.b) +
                                     ",delta=" + format_double(c.delta) + ")";
  return c.chain + "(precision=" + std::to_string(c.precision) + ")";
}

/// Centered functional on a finite chain, as a value per state.
inline Vector finite_functional(const FiniteChain& chain, const RunConfig& c, std::string& name) {
  name = c.f.empty() ? "indicator_centered" : c.f;
  const auto S = static_cast<Eigen::Index>(chain.size());
  Vector f(S);
  if (name == "indicator_centered") {
    require(c.f_state < chain.size(), "f-state out of range");
    f.setZero();
    f(static_cast<Eigen::Index>(c.f_state)) = 1.0;
  } else if (name == "identity_centered") {
    for (Eigen::Index i = 0; i < S; ++i) f(i) = static_cast<double>(i);
  } else if (name == "tabulated") {
    require(static_cast<Eigen::Index>(c.f_values.size()) == S, "tabulated f needs one value per state");
    for (Eigen::Index i = 0; i < S; ++i) f(i) = c.f_values[static_cast<std::size_t>(i)];
  } else {
    throw Error(Error::Kind::validation, "functional '" + name + "' is not defined on finite chains");
  }
  const double mean = chain.stationary().dot(f);
  f.array() -= mean;
  // snap to the lattice so that e.g. 1 − 1/2 is exact
  for (Eigen::Index i = 0; i < S; ++i)
    if (std::abs(f(i) - std::round(f(i) * 1e12) / 1e12) < 1e-15) f(i) = std::round(f(i) * 1e12) / 1e12;
  return f;
}

inline std::function<double(std::uint64_t)> mod1_functional(const RunConfig& c, std::string& name) {
  name = c.f.empty() ? "cos2pi" : c.f;
  if (name == "cos2pi")
    return [](std::uint64_t x) { return std::cos(2.0 * std::numbers::pi * SingularMod1Chain::coordinate(x)); };
  if (name == "identity_centered") return [](std::uint64_t x) { return SingularMod1Chain::coordinate(x) - 0.5; };
  if (name == "indicator_centered")
    return [](std::uint64_t x) { return SingularMod1Chain::coordinate(x) < 0.5 ? 0.5 : -0.5; };
  throw Error(Error::Kind::validation, "functional '" + name + "' is not defined on the mod-1 chain");
}

inline double mod1_sup(const std::string& name) { return name == "cos2pi" ? 1.0 : 0.5; }

inline InitKind init_kind(const RunConfig& c) {
  if (c.init == "nu") return InitKind::nu;
  if (c.init == "stationary") return InitKind::stationary;
  return InitKind::point;
}

inline std::size_t finite_x0(const FiniteChain& chain, const RunConfig& c) {
  require(c.x0 >= 0.0 && c.x0 == std::floor(c.x0) && c.x0 < static_cast<double>(chain.size()),
          "x0 must be a state index");
  return static_cast<std::size_t>(c.x0);
}

inline std::vector<double> grid_for(const RunConfig& c, double f_sup) {
  if (!c.t_grid.empty()) return c.t_grid;
  require(c.t_points >= 2, "t-points must be at least 2");
  return linear_grid(0.0, static_cast<double>(c.n) * f_sup, c.t_points);
}

struct Output {
  std::ostream& out;
  const RunConfig& cfg;

  /// Writes `content` to <out>/<file> atomically, or to stdout when no
  /// directory is configured and `primary` is set.
  void emit(const std::string& file, const std::string& content, bool primary) const {
    if (!cfg.out.empty()) {
      write_atomic(std::filesystem::path(cfg.out) / file, content);
    } else if (primary) {
      out << content;
    }
  }
};

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json meta(const RunConfig& c, const std::string& command) {
  return {{"command", command}, {"seed", c.seed}, {"seed_derivation", kSeedDerivation}};
}

// ---------------------------------------------------------------- simulate

template <class Chain, class F, class Coord>
void simulate_impl(const Chain& chain, const F& f, const Coord& coord, typename Chain::state_type x0,
                   const RunConfig& c, const std::string& fname, const Output& o) {
  require(c.n % chain.order() == 0, "simulate needs m | n (m = " + std::to_string(chain.order()) + ")");
  Stream s = Stream::substream(c.seed, 0);
  InitialLaw<typename Chain::state_type> law{init_kind(c), x0};
  const auto traj = simulate_split_covering(chain, law, c.n, s);
  SplitTrajectory<typename Chain::state_type> head = traj;
  head.states.resize(c.n);
  head.levels.resize(c.n);
  while (!head.regenerations.empty() && head.regenerations.back() >= c.n) head.regenerations.pop_back();

  const auto dec = block_decompose(traj, f, c.n);
  const auto ex = excursions(head, f);
  nlohmann::json chis = nlohmann::json::array(), gaps = nlohmann::json::array();
  for (const auto& e : ex) {
    chis.push_back(e.value);
    gaps.push_back(e.gap);
  }
  nlohmann::json j = meta(c, "simulate");
  j["chain"] = chain_id(c);
  j["f"] = fname;
  j["n"] = c.n;
  j["m"] = chain.order();
  j["init"] = traj.init;
  j["regenerations"] = head.regenerations;
  j["covering_length"] = traj.size();
  j["excursions"] = {{"values", chis}, {"gaps", gaps}};
  j["decomposition"] = {{"N", dec.N},
                        {"no_regeneration_observed", dec.no_regeneration_observed},
                        {"head", dec.head},
                        {"middle", dec.middle},
                        {"tail", dec.tail},
                        {"H", dec.H()},
                        {"M", dec.M()},
                        {"T", dec.T()},
                        {"reconstructed", dec.reconstructed()},
                        {"direct", dec.direct}};
  o.emit("summary.json", dump(j), c.format == "json");
  o.emit("trajectory.csv", trajectory_csv(head, coord), c.format == "csv");
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const Output o{out, c};
  const auto any = build_chain(c);
  if (const auto* fc = std::get_if<FiniteChain>(&any)) {
    std::string name;
    const Vector fv = finite_functional(*fc, c, name);
    const auto& labels = fc->kernel().labels();
    simulate_impl(
        *fc, [&](std::size_t x) { return fv(static_cast<Eigen::Index>(x)); },
        [&](std::size_t x) { return labels[x]; }, finite_x0(*fc, c), c, name, o);
  } else {
    const auto& mc = std::get<SingularMod1Chain>(any);
    std::string name;
    const auto f = mod1_functional(c, name);
    simulate_impl(
        mc, f, [](std::uint64_t x) { return format_double(SingularMod1Chain::coordinate(x)); },
        mc.from_coordinate(c.x0), c, name, o);
  }
  return 0;
}

// ---------------------------------------------------------------- bounds

inline int cmd_bounds(const RunConfig& c, const std::vector<std::string>& positional, std::ostream& out) {
  require(!positional.empty(), "bounds needs a formula name (or 'list')");
  const Output o{out, c};
  if (positional[0] == "list") {
    o.emit("formulas.json", dump(formula_names()), true);
    return 0;
  }
  Args args;
  for (std::size_t i = 1; i < positional.size(); ++i) {
    const auto eq = positional[i].find('=');
    require(eq != std::string::npos && eq > 0, "expected key=value, got '" + positional[i] + "'");
    const auto key = positional[i].substr(0, eq);
    require(args.count(key) == 0, "duplicate argument '" + key + "'");
    args[key] = positional[i].substr(eq + 1);
  }
  o.emit("bounds.json", dump(evaluate_formula(positional[0], args)), true);
  return 0;
}

// ---------------------------------------------------------------- variance

template <class Chain, class F>
nlohmann::json estimated_variances(const Chain& chain, const F& f, typename Chain::state_type x0,
                                   const RunConfig& c) {
  require(c.cycles >= 3, "cycles must be at least 3");
  Stream s = Stream::substream(c.seed, 0);
  const auto ex = collect_excursions(chain, InitialLaw<typename Chain::state_type>{init_kind(c), x0}, f, c.cycles, s);
  std::vector<double> chi, gaps;
  for (const auto& e : ex) {
    chi.push_back(e.value);
    gaps.push_back(static_cast<double>(e.gap));
  }
  const auto inf = sigma_inf_from_excursions(chi);
  const auto reg = sigma_mrv_regenerative(chi, gaps);
  Stream t = Stream::substream(c.seed, 1);
  const auto path = sample_path(chain, chain.sample_stationary(t), c.batch_n, t);
  std::vector<double> values(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) values[i] = f(path[i]);
  const auto batch = sigma_mrv_batch(values, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(c.batch_n)))));
  nlohmann::json j;
  j["estimates"] = nlohmann::json::array({to_json(reg), to_json(batch), to_json(inf)});
  j["mean_gap"] = {{"value", stats::mean(gaps)}, {"se", stats::standard_error(gaps)}};
  j["mean_excursion"] = {{"value", stats::mean(chi)}, {"se", stats::standard_error(chi)}};
  const double se = std::sqrt(*reg.se * *reg.se + *batch.se * *batch.se);
  j["regenerative_vs_batch"] = {{"difference", reg.value - batch.value}, {"combined_se", se},
                                {"within_4se", std::abs(reg.value - batch.value) <= 4.0 * se}};
  return j;
}

inline int cmd_variance(const RunConfig& c, std::ostream& out) {
  const Output o{out, c};
  const auto any = build_chain(c);
  nlohmann::json j = meta(c, "variance");
  j["chain"] = chain_id(c);
  if (const auto* fc = std::get_if<FiniteChain>(&any)) {
    std::string name;
    const Vector fv = finite_functional(*fc, c, name);
    j["f"] = name;
    const auto f = [&](std::size_t x) { return fv(static_cast<Eigen::Index>(x)); };
    j.update(estimated_variances(*fc, f, finite_x0(*fc, c), c));
    const double exact = sigma_mrv_exact(*fc, fv);
    const double gap = fc->order() / (fc->delta() * fc->pi_small_set());
    j["estimates"].insert(j["estimates"].begin(),
                          to_json(VarianceEstimate{"mrv_exact", exact, std::nullopt, 0}));
    const auto& inf = j["estimates"][3];
    const double se = inf["se"].get<double>();
    j["link"] = {{"sigma_inf", inf["value"]},
                 {"sigma_mrv_times_mean_gap", exact * gap},
                 {"se", se},
                 {"within_4se", std::abs(inf["value"].get<double>() - exact * gap) <= 4.0 * se}};
  } else {
    const auto& mc = std::get<SingularMod1Chain>(any);
    std::string name;
    const auto f = mod1_functional(c, name);
    j["f"] = name;
    j.update(estimated_variances(mc, f, mc.from_coordinate(c.x0), c));
  }
  o.emit("variance.json", dump(j), true);
  return 0;
}

// ---------------------------------------------------------------- verify / oracle

inline std::vector<std::string> default_formulas(const RunConfig& c) {
  if (!c.formulas.empty()) return c.formulas;
  return {"thm_sbi", "thm_bi", "thm_bi2"};
}

template <class Chain, class F>
void add_bounds(VerificationReport& rep, const Chain& chain, const F& f, typename Chain::state_type x0, double sigma2,
                double f_sup, const RunConfig& c) {
  const auto fit = fit_parameters(chain, f, x0, c.alpha, c.cycles, derive_seed(c.seed, 0xF17F17ULL), c.safety);
  rep.parameters = {{"a", fit.a},         {"b", fit.b},         {"c", fit.c},         {"d", fit.d},
                    {"D", fit.D},         {"alpha", c.alpha},   {"sigma2_mrv", sigma2}, {"f_sup", f_sup},
                    {"delta", chain.delta()}, {"pi_C", chain.pi_small_set()}, {"m", static_cast<double>(chain.order())},
                    {"safety", c.safety}, {"p", c.p},           {"fit_cycles", static_cast<double>(c.cycles)}};
  BernsteinParams bp;
  bp.a = fit.a;
  bp.b = fit.b;
  bp.c = fit.c;
  bp.d = fit.d;
  bp.alpha = c.alpha;
  bp.sigma2_mrv = sigma2;
  bp.delta = chain.delta();
  bp.pi_C = chain.pi_small_set();
  bp.m = chain.order();
  bp.D = fit.D;
  bp.f_sup = f_sup;
  const double n = static_cast<double>(c.n);
  for (const auto& name : default_formulas(c)) {
    std::vector<double> curve;
    for (double t : rep.tail.t) {
      if (name == "thm_sbi")
        curve.push_back(thm_sbi(n, t, sigma2, f_sup, fit.D, chain.delta(), chain.pi_small_set()).value);
      else if (name == "thm_bi")
        curve.push_back(thm_bi(bp, n, t).value);
      else if (name == "thm_bi2")
        curve.push_back(thm_bi2(bp, n, c.p, t).value);
      else
        throw Error(Error::Kind::validation, "verify supports thm_sbi, thm_bi and thm_bi2, not '" + name + "'");
    }
    rep.verdicts.push_back(check_domination(rep.tail, curve, c.z, name));
    rep.bounds[name] = std::move(curve);
  }
}

inline void emit_report(const VerificationReport& rep, const RunConfig& c, std::ostream& out) {
  const Output o{out, c};
  o.emit("report.json", dump(to_json(rep)), c.format == "json");
  o.emit("curves.csv", curves_csv(rep.tail, rep.bounds), c.format == "csv");
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto any = build_chain(c);
  VerificationReport rep;
  rep.chain = chain_id(c);
  rep.n = c.n;
  rep.z = c.z;
  rep.seed = c.seed;
  if (const auto* fc = std::get_if<FiniteChain>(&any)) {
    std::string name;
    const Vector fv = finite_functional(*fc, c, name);
    rep.functional = name;
    const auto f = [&](std::size_t x) { return fv(static_cast<Eigen::Index>(x)); };
    const double f_sup = fv.cwiseAbs().maxCoeff();
    const auto x0 = finite_x0(*fc, c);
    const auto grid = grid_for(c, f_sup);
    if (c.exact) {
      require(c.init == "point", "exact tails use a point start");
      rep.tail = exact_tail(*fc, fv, x0, c.n, grid);
    } else {
      rep.tail = mc_tail(*fc, f, InitialLaw<std::size_t>{init_kind(c), x0}, c.n, grid, c.replicas, c.seed, c.threads);
    }
    add_bounds(rep, *fc, f, x0, sigma_mrv_exact(*fc, fv), f_sup, c);
  } else {
    require(!c.exact, "exact tails exist only for finite chains");
    const auto& mc = std::get<SingularMod1Chain>(any);
    std::string name;
    const auto f = mod1_functional(c, name);
    rep.functional = name;
    const double f_sup = mod1_sup(name);
    const auto x0 = mc.from_coordinate(c.x0);
    rep.tail = mc_tail(mc, f, InitialLaw<std::uint64_t>{init_kind(c), x0}, c.n, grid_for(c, f_sup), c.replicas,
                       c.seed, c.threads);
    Stream s = Stream::substream(derive_seed(c.seed, 0x5A5A5AULL), 0);
    const auto ex = collect_excursions(mc, InitialLaw<std::uint64_t>::stationary(), f, std::max<std::size_t>(c.cycles, 3), s);
    std::vector<double> chi, gaps;
    for (const auto& e : ex) {
      chi.push_back(e.value);
      gaps.push_back(static_cast<double>(e.gap));
    }
    add_bounds(rep, mc, f, x0, sigma_mrv_regenerative(chi, gaps).value, f_sup, c);
  }
  emit_report(rep, c, out);
  return 0;
}

inline int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const auto any = build_chain(c);
  const auto* fc = std::get_if<FiniteChain>(&any);
  require(fc != nullptr, "exact tails exist only for finite chains");
  std::string name;
  const Vector fv = finite_functional(*fc, c, name);
  const auto tail = exact_tail(*fc, fv, finite_x0(*fc, c), c.n, grid_for(c, fv.cwiseAbs().maxCoeff()));
  nlohmann::json j = meta(c, "oracle");
  j["chain"] = chain_id(c);
  j["f"] = name;
  j["n"] = c.n;
  j["x0"] = finite_x0(*fc, c);
  j["tail"] = to_json(tail);
  const Output o{out, c};
  o.emit("oracle.json", dump(j), c.format == "json");
  o.emit("oracle.csv", curves_csv(tail, {}), c.format == "csv");
  return 0;
}

}  // namespace detail

/// Runs one command line; returns the process exit code (0 success,
/// 1 validation error, 2 guard violation).
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Regenerative Markov-chain toolkit: split-chain simulation, bounds and verification"};
  app.require_subcommand(1);
  std::map<std::string, detail::FlagValues> flags;
  std::vector<std::string> positional;
  for (const auto* name : {"simulate", "bounds", "variance", "verify", "oracle"}) {
    auto* sub = app.add_subcommand(name);
    detail::add_common(*sub, flags[name]);
    if (std::string(name) == "bounds") sub->add_option("formula_args", positional, "FORMULA key=value ...");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    for (auto* sub : app.get_subcommands()) {
      const auto name = sub->get_name();
      if (sub->get_subcommands().empty() && sub->parsed()) {
        const auto cfg = detail::resolve(flags.at(name));
        if (name == "simulate") return detail::cmd_simulate(cfg, out);
        if (name == "bounds") return detail::cmd_bounds(cfg, positional, out);
        if (name == "variance") return detail::cmd_variance(cfg, out);
        if (name == "verify") return detail::cmd_verify(cfg, out);
        if (name == "oracle") return detail::cmd_oracle(cfg, out);
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::guard ? 2 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace regen::cli
