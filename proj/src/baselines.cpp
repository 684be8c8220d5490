#include "paycheck/baselines.hpp"

#include "paycheck/errors.hpp"

namespace paycheck {

Allocation waterfall_policy(const PlanState& state, const PlanConfig& plan) {
  const PlanLayout layout(plan);
  if (state.fractions_outstanding.size() != layout.stock_goals.size())
    throw ConfigError("state does not match plan");
  int best = -1;
  for (std::size_t s = 0; s < layout.stock_goals.size(); ++s) {
    if (!(state.fractions_outstanding[s] > 0.0)) continue;
    const int gi = layout.stock_goals[s];
    if (best < 0 || plan.goals[gi].weight_p > plan.goals[best].weight_p) best = gi;
  }
  return Allocation::all_to(plan.slot_count(),
                            best < 0 ? plan.residual_slot() : static_cast<std::size_t>(best));
}

Allocation even_split_policy(const PlanState& state, const PlanConfig& plan) {
  const PlanLayout layout(plan);
  if (state.fractions_outstanding.size() != layout.stock_goals.size())
    throw ConfigError("state does not match plan");
  std::vector<int> open;
  for (std::size_t s = 0; s < layout.stock_goals.size(); ++s)
    if (state.fractions_outstanding[s] > 0.0) open.push_back(layout.stock_goals[s]);
  if (open.empty()) return Allocation::all_to(plan.slot_count(), plan.residual_slot());
  Allocation a{std::vector<double>(plan.slot_count(), 0.0)};
  for (int gi : open) a.fractions[gi] = 1.0 / static_cast<double>(open.size());
  return a;
}

PolicyFunction schedule_policy(std::vector<Allocation> schedule) {
  if (schedule.empty()) throw ConfigError("schedule must not be empty");
  return [schedule = std::move(schedule)](const PlanState& state, const PlanConfig&) {
    const std::size_t t = static_cast<std::size_t>(state.month);
    return schedule[std::min(t, schedule.size() - 1)];
  };
}

AppendixAScenario appendix_a_scenario(int horizon) {
  if (horizon < 2) throw ConfigError("the scenario needs at least two months", "/horizon_months");
  constexpr double kRate = 0.001;
  constexpr double kIncome = 1000.0;
  constexpr double kTarget = 1'000'000.0;

  AppendixAScenario sc;
  PlanConfig& p = sc.plan;
  p.initial_income = kIncome;
  p.horizon_months = horizon;
  p.inflation_source = RateSource::constant(0.0);
  p.rate_convention = RateConvention::kPerStep;
  p.debt_can_exceed_principal = true;

  GoalSpec g1;
  g1.id = "goal_1";
  g1.kind = GoalKind::kDebt;
  g1.total_amount = 1000.0;
  g1.rate_source = RateSource::constant(0.0);
  g1.weight_p = 1000.0;
  GoalSpec g2;
  g2.id = "goal_2";
  g2.kind = GoalKind::kDebt;
  g2.total_amount = kTarget / (1.0 + kRate);
  g2.rate_source = RateSource::constant(kRate);
  g2.weight_p = 1.0;
  p.goals = {g1, g2};

  sc.rates = constant_trajectory(p, horizon);

  const Allocation split{{0.5, 0.5, 0.0}};
  const Allocation all_in{{0.0, 1.0, 0.0}};
  sc.even_split_schedule = {split, split, all_in};

  sc.waterfall_goal1.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  sc.waterfall_goal1[0] = 1000.0;
  sc.waterfall_goal2.assign(static_cast<std::size_t>(horizon) + 1, kTarget);
  sc.waterfall_goal2[0] = kTarget / (1.0 + kRate);

  sc.even_split_goal1 = {1000.0, 500.0, 0.0};
  sc.even_split_goal2 = {kTarget / (1.0 + kRate), 999'500.0, 999'999.5};
  return sc;
}

std::vector<double> dollars_outstanding(const PlanConfig& plan, const Rollout& rollout,
                                        std::size_t goal_index) {
  const PlanLayout layout(plan);
  const int slot = layout.stock_slot_of_goal.at(goal_index);
  if (slot < 0) throw ConfigError("goal '" + plan.goals[goal_index].id + "' is not a stock goal");
  std::vector<double> out;
  for (const auto& step : rollout.steps)
    out.push_back(step.state.fractions_outstanding[static_cast<std::size_t>(slot)] *
                  *plan.goals[goal_index].total_amount);
  return out;
}

}  // namespace paycheck
