#include "paycheck/utility.hpp"

#include "paycheck/errors.hpp"

namespace paycheck {

void require_utility_fields(const GoalSpec& goal) {
  auto where = [&] { return "/goals/" + goal.id; };
  switch (goal.kind) {
    case GoalKind::kEmergencyFund:
      if (!goal.weight_q || !goal.crossover_h)
        throw ConfigError("two-phase utility needs weight_q and crossover_h", where());
      break;
    case GoalKind::kContribution401K:
      if (!goal.weight_q || !goal.min_contrib_frac || !goal.max_contrib_frac)
        throw ConfigError("401K utility needs weight_q, min_contrib_frac and max_contrib_frac",
                          where());
      break;
    case GoalKind::kContributionIRA:
      if (!goal.max_contrib_dollars)
        throw ConfigError("IRA utility needs max_contrib_dollars", where());
      break;
    default:
      break;
  }
}

double goal_utility(const PlanConfig& plan, std::size_t goal_index, const PlanState& state,
                    const Allocation& allocation) {
  const GoalSpec& goal = plan.goals.at(goal_index);
  require_utility_fields(goal);
  const double share = allocation.fractions.at(goal_index);
  if (!is_stock(goal.kind)) return goal_utility_value(goal, share, share, state.income);
  const PlanLayout layout(plan);
  const double x =
      state.fractions_outstanding.at(static_cast<std::size_t>(layout.stock_slot_of_goal[goal_index]));
  return goal_utility_value(goal, x, share, state.income);
}

UtilityBreakdown utility_breakdown(const PlanConfig& plan, const PlanState& state,
                                   const Allocation& allocation) {
  UtilityBreakdown b;
  b.month = state.month;
  for (std::size_t i = 0; i < plan.goals.size(); ++i) {
    b.goal_ids.push_back(plan.goals[i].id);
    b.values.push_back(goal_utility(plan, i, state, allocation));
    b.total += b.values.back();
  }
  return b;
}

UtilityTotal total_utility(const PlanConfig& plan, const std::vector<PlanState>& states,
                           const std::vector<Allocation>& allocations) {
  if (states.size() != allocations.size())
    throw ConfigError("trajectory has mismatched state and allocation counts");
  UtilityTotal out;
  for (std::size_t t = 0; t < states.size(); ++t) {
    out.months.push_back(utility_breakdown(plan, states[t], allocations[t]));
    out.value += out.months.back().total;
  }
  return out;
}

}  // namespace paycheck
