#pragma once

// Piecewise-linear goal utilities. Arguments are fractions *remaining*: a
// goal at 0 (or below) contributes nothing, an untouched goal contributes -p.

#include <string>
#include <vector>

#include "paycheck/goals.hpp"

namespace paycheck {

template <class T>
T w1(const T& x, double p) {
  return relu(x) * (-p);
}

// Slope p on (h, 1], slope q on (0, h].
template <class T>
T w2(const T& x, double p, double q, double h) {
  return relu(x) * (-q) - relu(x - h) * (p - q);
}

// Utility of goal `goal` this month. `fraction` is the goal's fraction
// outstanding (ignored for flow goals); `share` is its allocation entry.
template <class T>
T goal_utility_value(const GoalSpec& goal, const T& fraction, const T& share, double income);

double goal_utility(const PlanConfig& plan, std::size_t goal_index, const PlanState& state,
                    const Allocation& allocation);

struct UtilityBreakdown {
  int month = 0;
  std::vector<std::string> goal_ids;
  std::vector<double> values;  // aligned with goal_ids, each <= 0
  double total = 0.0;
};

UtilityBreakdown utility_breakdown(const PlanConfig& plan, const PlanState& state,
                                   const Allocation& allocation);

struct UtilityTotal {
  double value = 0.0;
  std::vector<UtilityBreakdown> months;
};

// Sum over months and goals. `states` and `allocations` are the t = 0..T
// sequence of one rollout.
UtilityTotal total_utility(const PlanConfig& plan, const std::vector<PlanState>& states,
                           const std::vector<Allocation>& allocations);

// Weight checks for goal_utility; throws ConfigError for missing fields.
void require_utility_fields(const GoalSpec& goal);

template <class T>
T goal_utility_value(const GoalSpec& goal, const T& fraction, const T& share, double income) {
  switch (goal.kind) {
    case GoalKind::kDebt:
    case GoalKind::kSavings:
    case GoalKind::kRetirement:
      return w1(fraction, goal.weight_p);
    case GoalKind::kEmergencyFund:
      return w2(fraction, goal.weight_p, *goal.weight_q, *goal.crossover_h);
    case GoalKind::kContribution401K: {
      const double hi = *goal.max_contrib_frac;
      const double lo = *goal.min_contrib_frac;
      return w2(1.0 - share / hi, goal.weight_p, *goal.weight_q, (hi - lo) / hi);
    }
    case GoalKind::kContributionIRA:
      return w1(1.0 - (share * income) / *goal.max_contrib_dollars, goal.weight_p);
  }
  return w1(fraction, goal.weight_p);
}

}  // namespace paycheck
