#include "mgrx/quantize.hpp"

#include <cmath>

namespace mgrx {

QuantizationPlan make_plan(QuantMode mode, double budget, const GridHierarchy& hierarchy) {
  if (!(budget > 0.0) || !std::isfinite(budget)) fail(errc::invalid_budget, "budget must be positive");
  const int L = hierarchy.num_levels();
  QuantizationPlan plan;
  plan.mode = mode;
  plan.budget = budget;
  plan.bin_widths.resize(static_cast<std::size_t>(L) + 1);
  if (mode == QuantMode::uniform) {
    const double q = 2.0 * budget / static_cast<double>(L + 1);
    for (double& ql : plan.bin_widths) ql = q;
  } else {
    const double total = static_cast<double>(hierarchy.total_count());
    for (int l = 0; l <= L; ++l)
      plan.bin_widths[static_cast<std::size_t>(l)] =
          2.0 * budget * static_cast<double>(hierarchy.delta_count(l)) / total;
  }
  return plan;
}

double estimated_cost(const QuantizationPlan& plan, const GridHierarchy& hierarchy, double range) {
  if (!(range > 0.0)) fail(errc::invalid_input, "range must be positive");
  if (plan.num_levels() != hierarchy.num_levels())
    fail(errc::shape_error, "plan does not match hierarchy");
  double bits = 0.0;
  for (int l = 0; l <= hierarchy.num_levels(); ++l) {
    const double term = static_cast<double>(hierarchy.delta_count(l)) *
                        std::log2(range / plan.bin_widths[static_cast<std::size_t>(l)]);
    if (term > 0.0) bits += term;
  }
  return bits;
}

} // namespace mgrx
