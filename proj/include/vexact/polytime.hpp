#ifndef VEXACT_POLYTIME_HPP
#define VEXACT_POLYTIME_HPP

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vexact/volterra.hpp"

namespace vexact {

/// The construction with weights 2^-t(n).
inline VolterraFunction build_slowed(Pi01Class cls,
                                     std::shared_ptr<const VolterraIngredients> ing = default_ingredients()) {
  return VolterraFunction(std::move(cls), Schedule::ByStage, kDefaultStepBudget, std::move(ing));
}

struct TimingSample {
  std::int64_t p = 0;
  std::uint64_t ops = 0;  ///< limb operations, deterministic
  double wall_ms = 0;     ///< informational only
  std::uint64_t generator_steps = 0;
  bool budget_exhausted = false;
  std::optional<DyInterval> value;
};

struct ScalingReport {
  std::vector<TimingSample> samples;
  /// least squares fit of log(ops) = exponent * log(p) + intercept over the
  /// samples that completed
  double exponent = 0;
  double intercept = 0;
  double r_squared = 0;
  std::size_t fitted = 0;
};

/// Cost of f(x) at each precision, measured from cold: fresh class, fresh
/// ingredients and an empty constant cache for every sample.
inline ScalingReport scaling_probe(const Pi01Class& cls, Schedule schedule, const Dyadic& x,
                                   const std::vector<std::int64_t>& p_list,
                                   std::uint64_t budget = kDefaultStepBudget) {
  ScalingReport rep;
  for (std::int64_t p : p_list) {
    TimingSample t;
    t.p = p;
    reset_constant_caches();
    const auto start = std::chrono::steady_clock::now();
    ops::Scope scope;
    VolterraFunction F(cls.fresh(), schedule, budget, make_ingredients());
    try {
      t.value = F.f_eval(x, Precision{p});
    } catch (const BudgetExhausted&) {
      t.budget_exhausted = true;
    }
    t.ops = scope.elapsed();
    t.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    t.generator_steps = F.snapshot().stage();
    rep.samples.push_back(t);
  }

  std::vector<double> lx, ly;
  for (const auto& t : rep.samples) {
    if (t.budget_exhausted || t.p <= 0 || t.ops == 0) continue;
    lx.push_back(std::log(static_cast<double>(t.p)));
    ly.push_back(std::log(static_cast<double>(t.ops)));
  }
  rep.fitted = lx.size();
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
      syy += (ly[i] - my) * (ly[i] - my);
    }
    rep.exponent = sxx > 0 ? sxy / sxx : 0;
    rep.intercept = my - rep.exponent * mx;
    rep.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1;
  }
  return rep;
}

inline std::string timing_csv(const ScalingReport& rep) {
  std::ostringstream os;
  os << "p,ops,wall_ms\n";
  for (const auto& t : rep.samples) {
    os << t.p << ',';
    if (t.budget_exhausted)
      os << "budget-exhausted";
    else
      os << t.ops;
    os << ',' << t.wall_ms << '\n';
  }
  return os.str();
}

inline nlohmann::json scaling_summary(const ScalingReport& rep) {
  nlohmann::json exhausted = nlohmann::json::array();
  for (const auto& t : rep.samples)
    if (t.budget_exhausted) exhausted.push_back(t.p);
  return {{"exponent", rep.exponent},
          {"intercept", rep.intercept},
          {"r_squared", rep.r_squared},
          {"fitted_samples", rep.fitted},
          {"budget_exhausted_at", exhausted}};
}

}  // namespace vexact

#endif  // VEXACT_POLYTIME_HPP
