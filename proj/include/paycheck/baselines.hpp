#pragma once

// Reference allocation rules: the priority waterfall, an even split over
// unfinished goals, and fixed month-by-month schedules.

#include <vector>

#include "paycheck/goals.hpp"
#include "paycheck/rates.hpp"
#include "paycheck/trainer.hpp"

namespace paycheck {

// All income to the unfinished stock goal with the largest weight_p (ties go
// to the earlier goal); everything to the residual slot once all stock goals
// are complete. Flow goals get nothing.
Allocation waterfall_policy(const PlanState& state, const PlanConfig& plan);

// Equal shares over the unfinished stock goals; residual once all complete.
Allocation even_split_policy(const PlanState& state, const PlanConfig& plan);

// Allocation `schedule[t]` in month t; the last entry repeats afterwards.
PolicyFunction schedule_policy(std::vector<Allocation> schedule);

// Two debts: $1000 at no interest with p = 1000, and $1,000,000 / 1.001 at
// 0.001 per month with p = 1, paid from $1000 a month. Dollar-valued
// expectations are the reference state sequences of the waterfall and the
// split-then-all-in strategy.
struct AppendixAScenario {
  PlanConfig plan;
  RateTrajectory rates;
  std::vector<Allocation> even_split_schedule;

  // Expected dollars outstanding, indexed by month from 0.
  std::vector<double> waterfall_goal1;
  std::vector<double> waterfall_goal2;
  std::vector<double> even_split_goal1;
  std::vector<double> even_split_goal2;
};

AppendixAScenario appendix_a_scenario(int horizon = 50);

// Dollars outstanding of stock goal `goal_index` (a plan goal index) per month.
std::vector<double> dollars_outstanding(const PlanConfig& plan, const Rollout& rollout,
                                        std::size_t goal_index);

}  // namespace paycheck
