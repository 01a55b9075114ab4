#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace regen {

/// Library error. `validation` covers malformed input and violated
/// preconditions; `guard` covers resource guards (enumeration size,
/// simulation caps). The CLI maps them to exit codes 1 and 2.
class Error : public std::runtime_error {
 public:
  enum class Kind { validation, guard };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(Error::Kind::validation, message);
}

inline void require_guard(bool condition, const std::string& message) {
  if (!condition) throw Error(Error::Kind::guard, message);
}

/// ln(x ∨ e): the logarithm applied to sample-size terms.
inline double log_floor_e(double x) { return std::log(std::max(x, std::numbers::e)); }

/// A tail-bound value capped at 1 with the uncapped value and regime flags.
struct BoundValue {
  double value = 1.0;
  double raw = 1.0;
  std::vector<std::string> flags;
  std::vector<double> terms;  // additive pieces of `raw`, when the formula is a sum

  bool has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
  }
};

inline BoundValue make_bound(long double raw, std::vector<std::string> flags = {},
                             std::vector<double> terms = {}) {
  BoundValue out;
  out.raw = static_cast<double>(raw);
  out.value = std::min(1.0, out.raw);
  if (out.raw >= 1.0) flags.push_back("vacuous");
  out.flags = std::move(flags);
  out.terms = std::move(terms);
  return out;
}

/// exp(-num/den) with the conventions exp(-0/x) = 1 and exp(-y/0) = 0 for y > 0.
inline long double exp_neg_ratio(long double num, long double den) {
  if (num <= 0.0L) return 1.0L;
  if (den <= 0.0L) return 0.0L;
  return std::exp(-num / den);
}

}  // namespace regen
