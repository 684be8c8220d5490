#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "paycheck/baselines.hpp"
#include "paycheck/errors.hpp"
#include "paycheck/plan_io.hpp"
#include "paycheck/report.hpp"

namespace paycheck {
namespace {

PlanConfig two_debt_plan() {
  PlanConfig plan;
  plan.initial_income = 100.0;
  plan.horizon_months = 3;
  plan.inflation_source = RateSource::constant(0.0);
  GoalSpec a;
  a.id = "a";
  a.kind = GoalKind::kDebt;
  a.total_amount = 150.0;
  a.rate_source = RateSource::constant(0.0);
  a.weight_p = 2.0;
  GoalSpec b = a;
  b.id = "b";
  b.total_amount = 200.0;
  b.weight_p = 1.0;
  plan.goals = {a, b};
  return plan;
}

TEST(Schedule, ColumnsAndHandComputedRows) {
  const PlanConfig plan = two_debt_plan();
  const Rollout r = simulate(plan, constant_trajectory(plan, 3), waterfall_policy);
  const Schedule s = make_schedule(plan, r);
  EXPECT_EQ(s.columns, (std::vector<std::string>{"month", "income", "contrib_a", "contrib_b",
                                                 "contrib_residual", "employer_match", "frac_a",
                                                 "frac_b", "utility_a", "utility_b", "utility_total"}));
  ASSERT_EQ(s.rows.size(), 4u);
  // Month 0: all to "a" (larger p); month 1: "a" still open at 1/3.
  EXPECT_EQ(s.rows[0], (std::vector<double>{0, 100, 100, 0, 0, 0, 1, 1, -2, -1, -3}));
  EXPECT_EQ(s.rows[1][2], 100.0);
  EXPECT_NEAR(s.rows[1][6], 1.0 / 3.0, 1e-15);
  // Month 2: "a" complete, everything to "b".
  EXPECT_EQ(s.rows[2][3], 100.0);
  EXPECT_EQ(s.rows[2][6], 0.0);
  EXPECT_EQ(s.rows[3][7], 0.5);
}

TEST(Schedule, CsvIsHeaderPlusOneLinePerMonth) {
  const PlanConfig plan = two_debt_plan();
  const Rollout r = simulate(plan, constant_trajectory(plan, 3), waterfall_policy);
  const std::string csv = schedule_csv(make_schedule(plan, r));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "month,income,contrib_a,contrib_b,contrib_residual,employer_match,frac_a,frac_b,"
                  "utility_a,utility_b,utility_total");
  std::getline(in, line);
  EXPECT_EQ(line, "0,100,100,0,0,0,1,1,-2,-1,-3");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Schedule, JsonCarriesUtilityRowsAndTotal) {
  const PlanConfig plan = two_debt_plan();
  const Rollout r = simulate(plan, constant_trajectory(plan, 3), waterfall_policy);
  const nlohmann::json j = schedule_json(plan, r);
  EXPECT_EQ(j.at("rows").size(), 4u);
  EXPECT_EQ(j.at("utility").size(), 8u);
  EXPECT_EQ(j.at("utility")[1].at("goal"), "b");
  EXPECT_EQ(j.at("total_utility").get<double>(), r.value);
}

TEST(Completion, MonthsAndFlags) {
  const PlanConfig plan = two_debt_plan();
  const Rollout r = simulate(plan, constant_trajectory(plan, 3), waterfall_policy);
  EXPECT_EQ(completion_month(plan, r, "a"), 2);
  EXPECT_EQ(completion_month(plan, r, "b"), std::nullopt);
  EXPECT_FALSE(all_stock_goals_complete(plan, r));
  EXPECT_THROW(completion_month(plan, r, "nope"), ConfigError);
  EXPECT_EQ(contributions(plan, r, "b"), (std::vector<double>{0, 0, 100, 100}));
}

TEST(Fluctuation, SampleStdOfMonthlyChangesAveragedOverGoals) {
  const PlanConfig plan = two_debt_plan();
  const Rollout r = simulate(plan, constant_trajectory(plan, 3), waterfall_policy);
  // a: 100,100,0,0 -> changes 0,-100,0; b: 0,0,100,100 -> 0,100,0.
  const double sd = std::sqrt((2 * std::pow(100.0 / 3, 2) + std::pow(200.0 / 3, 2)) / 2.0);
  EXPECT_NEAR(contribution_fluctuation(plan, r), sd, 1e-12);
}

TEST(Retirement, CumulativeContributionIncludesMatch) {
  const PlanConfig plan = table2_plan();
  Allocation a{std::vector<double>(plan.slot_count(), 0.0)};
  a.fractions[4] = 0.5;  // retirement
  a.fractions[5] = 0.1;  // 401K
  a.fractions[7] = 0.4;
  const Rollout r = simulate(plan, constant_trajectory(plan, plan.horizon_months), schedule_policy({a}));
  double expected = 0.0;
  for (int t = 0; t < 3; ++t) expected += 0.6 * r.steps[t].state.income + r.steps[t].employer_match;
  EXPECT_NEAR(cumulative_retirement_contribution(plan, r, 3), expected, 1e-9);
  EXPECT_GT(r.steps[0].employer_match, 0.0);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(100.0), "100");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(TrainReportJson, Fields) {
  TrainReport r;
  r.objective = {-5.0, -4.0};
  r.architecture.hidden = {4};
  const nlohmann::json j = train_report_json(r);
  EXPECT_EQ(j.at("iterations"), 2);
  EXPECT_EQ(j.at("initial_objective"), -5.0);
  EXPECT_EQ(j.at("final_objective"), -4.0);
  EXPECT_EQ(j.at("architecture").at("hidden"), nlohmann::json::array({4}));
}

}  // namespace
}  // namespace paycheck
