#pragma once

// Name → evaluator registry behind the `bounds` subcommand. Arguments arrive
// as key=value strings; results are JSON records.

#include <json.hpp>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "regen/bounds.hpp"
#include "regen/common.hpp"
#include "regen/orlicz.hpp"

namespace regen {

using Args = std::map<std::string, std::string>;

namespace detail {

class ArgReader {
 public:
  explicit ArgReader(const Args& args) : args_(args) {}

  double num(const std::string& key) {
    used_.insert(key);
    const auto it = args_.find(key);
    require(it != args_.end(), "missing argument '" + key + "'");
    return parse(key, it->second);
  }

  double num(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = args_.find(key);
    return it == args_.end() ? fallback : parse(key, it->second);
  }

  std::optional<double> opt(const std::string& key) {
    used_.insert(key);
    const auto it = args_.find(key);
    if (it == args_.end()) return std::nullopt;
    return parse(key, it->second);
  }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = args_.find(key);
    return it == args_.end() ? fallback : it->second;
  }

  void finish() const {
    for (const auto& [k, v] : args_) require(used_.count(k) > 0, "unknown argument '" + k + "'");
  }

 private:
  static double parse(const std::string& key, const std::string& text) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == text.size() && pos > 0, "argument '" + key + "' is not a number: " + text);
    return v;
  }

  const Args& args_;
  std::set<std::string> used_;
};

inline nlohmann::json bound_record(const BoundValue& b) {
  nlohmann::json j;
  j["raw"] = b.raw;
  j["value"] = b.value;
  j["flags"] = b.flags;
  if (!b.terms.empty()) j["terms"] = b.terms;
  return j;
}

inline nlohmann::json scalar_record(double v) {
  nlohmann::json j;
  j["raw"] = v;
  j["value"] = v;
  j["flags"] = nlohmann::json::array();
  return j;
}

inline BernsteinParams read_params(ArgReader& r) {
  BernsteinParams p;
  p.a = r.num("a");
  p.b = r.num("b");
  p.c = r.num("c");
  p.d = r.num("d");
  p.alpha = r.num("alpha", 1.0);
  p.sigma2_mrv = r.num("sigma2");
  p.delta = r.num("delta");
  p.pi_C = r.num("pi_C");
  const double m = r.num("m", 1.0);
  require(m >= 1.0 && m == std::floor(m), "m must be a positive integer");
  p.m = static_cast<std::size_t>(m);
  p.D = r.opt("D");
  p.f_sup = r.opt("f_sup");
  return p;
}

using Evaluator = std::function<nlohmann::json(ArgReader&)>;

inline const std::map<std::string, Evaluator>& registry() {
  static const std::map<std::string, Evaluator> table = {
      {"m_cutoff",
       [](ArgReader& r) {
         const auto variant = r.str("variant", "main");
         require(variant == "main" || variant == "iid", "variant must be 'main' or 'iid'");
         return scalar_record(m_cutoff(r.num("c"), r.num("alpha"), r.num("n"),
                                       variant == "main" ? CutoffVariant::main : CutoffVariant::iid));
       }},
      {"classical_bernstein",
       [](ArgReader& r) {
         return bound_record(classical_bernstein(r.num("n"), r.num("sigma2"), r.num("M"), r.num("t"),
                                                 r.num("sup", 0.0) != 0.0));
       }},
      {"psi1_bernstein",
       [](ArgReader& r) { return bound_record(psi1_bernstein(r.num("n"), r.num("tau"), r.num("t"))); }},
      {"iid_unbounded",
       [](ArgReader& r) {
         return bound_record(iid_unbounded(r.num("n"), r.num("c"), r.num("alpha"), r.num("sigma2"), r.num("t")));
       }},
      {"random_sum_bound",
       [](ArgReader& r) {
         return bound_record(random_sum_bound(r.num("l"), r.num("v"), r.num("alpha"), r.num("sigma2"), r.num("a"),
                                              r.num("psi1_excess", 0.0), r.num("t")));
       }},
      {"one_dep_bounded",
       [](ArgReader& r) {
         return bound_record(one_dep_bounded(r.num("n"), static_cast<int>(r.num("m_dep", 1.0)), r.num("sigma_inf2"),
                                             r.num("M"), r.num("t")));
       }},
      {"one_dep_sup",
       [](ArgReader& r) {
         return bound_record(one_dep_sup(r.num("n"), static_cast<int>(r.num("m_dep", 1.0)), r.num("c"),
                                         r.num("alpha"), r.num("sigma_inf2"), r.num("t")));
       }},
      {"one_dep_stopped",
       [](ArgReader& r) {
         return bound_record(one_dep_stopped(r.num("n"), r.num("c"), r.num("alpha"), r.num("sigma_inf2"), r.num("a"),
                                             r.num("b_factor", 2.0), r.num("t")));
       }},
      {"kp_constant",
       [](ArgReader& r) {
         const auto kp = kp_constant(r.num("p"));
         auto j = scalar_record(kp.K);
         j["outputs"] = {{"L", kp.L}, {"K", kp.K}};
         return j;
       }},
      {"regen_count_tail",
       [](ArgReader& r) {
         return bound_record(regen_count_tail(r.num("n"), r.num("p"), r.num("d"), r.num("mean_gap")));
       }},
      {"regen_count_psi1",
       [](ArgReader& r) {
         const auto b = regen_count_psi1(r.num("p"), r.num("d"), r.num("mean_gap"), r.num("m", 1.0));
         auto j = scalar_record(b.bound);
         j["outputs"] = {{"bound", b.bound}, {"coarse", b.coarse}};
         return j;
       }},
      {"thm_bi",
       [](ArgReader& r) {
         const auto p = read_params(r);
         return bound_record(thm_bi(p, r.num("n"), r.num("t")));
       }},
      {"thm_bi2",
       [](ArgReader& r) {
         const auto p = read_params(r);
         return bound_record(thm_bi2(p, r.num("n"), r.num("p", 2.0 / 3.0), r.num("t")));
       }},
      {"thm_sbi",
       [](ArgReader& r) {
         return bound_record(thm_sbi(r.num("n"), r.num("t"), r.num("sigma2"), r.num("f_sup"), r.num("D"),
                                     r.num("delta"), r.num("pi_C")));
       }},
      {"bbi_constants",
       [](ArgReader& r) {
         const auto k = bbi_constants(r.num("delta"), r.num("pi_C"), r.num("D"));
         auto j = scalar_record(k.K);
         j["outputs"] = {{"K", k.K}, {"tau", k.tau}};
         return j;
       }},
      {"param_bounds_from_drift",
       [](ArgReader& r) {
         DriftData d;
         const auto sc = r.str("scenario", "iii");
         require(sc == "i" || sc == "ii" || sc == "iii", "scenario must be i, ii or iii");
         d.scenario = sc == "i" ? DriftScenario::multiplicative
                                : (sc == "ii" ? DriftScenario::additive : DriftScenario::bounded);
         if (d.scenario == DriftScenario::bounded) {
           d.D = r.num("D");
           d.f_sup = r.num("f_sup");
         } else {
           d.l = r.num("l");
           d.k = r.num("k", 0.0);
           d.K = r.num("K", 0.0);
           d.V = r.num("V", 0.0);
           d.delta = r.num("delta");
           d.alpha = r.num("alpha");
           if (d.scenario == DriftScenario::multiplicative) {
             d.pi_exp_V_half = r.num("pi_exp_V_half");
           } else {
             d.beta = r.num("beta");
             d.pi_V = r.num("pi_V");
             d.sup_tau = r.num("sup_tau");
             d.pi_tau = r.num("pi_tau");
           }
         }
         const auto b = param_bounds_from_drift(d);
         auto j = scalar_record(b.c);
         j["outputs"] = {{"a", b.a}, {"b", b.b}, {"c", b.c}};
         return j;
       }},
      {"lemma_bp_bridge", [](ArgReader& r) { return scalar_record(lemma_bp_bridge(r.num("norm"), r.num("alpha"))); }},
      {"quasi_triangle",
       [](ArgReader& r) { return scalar_record(quasi_triangle(r.num("a"), r.num("b"), r.num("alpha"))); }},
      {"conditional_mean_norm_factor",
       [](ArgReader& r) {
         const auto f = conditional_mean_norm_factor(r.num("alpha"));
         auto j = scalar_record(f.tight);
         j["outputs"] = {{"tight", f.tight}, {"loose", f.loose}};
         return j;
       }},
      {"moment_bound", [](ArgReader& r) { return scalar_record(moment_bound(r.num("beta"))); }},
      {"tail_from_norm",
       [](ArgReader& r) { return bound_record(tail_from_norm(r.num("norm"), r.num("alpha"), r.num("t"))); }},
      {"tail_conditional",
       [](ArgReader& r) { return bound_record(tail_conditional(r.num("norm"), r.num("alpha"), r.num("t"))); }},
  };
  return table;
}

}  // namespace detail

inline std::vector<std::string> formula_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : detail::registry()) out.push_back(k);
  return out;
}

/// {formula, inputs, raw, value, flags[, terms][, outputs]}.
inline nlohmann::json evaluate_formula(const std::string& name, const Args& args) {
  const auto& table = detail::registry();
  const auto it = table.find(name);
  require(it != table.end(), "unknown formula '" + name + "'");
  detail::ArgReader reader(args);
  nlohmann::json result = it->second(reader);
  reader.finish();
  nlohmann::json out;
  out["formula"] = name;
  out["inputs"] = args;
  for (auto& [k, v] : result.items()) out[k] = v;
  return out;
}

}  // namespace regen
