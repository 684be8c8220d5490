#pragma once

// Per-month schedules and summary statistics of a rollout, in the CSV/JSON
// shapes consumed by the CLI and the HTTP service.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paycheck/trainer.hpp"

namespace paycheck {

// Columns, in order: month, income, contrib_<goal>..., contrib_residual,
// employer_match, frac_<stock goal>..., utility_<goal>..., utility_total.
struct Schedule {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Schedule make_schedule(const PlanConfig& plan, const Rollout& rollout);
std::string schedule_csv(const Schedule& schedule);
// {"columns": [...], "rows": [[...]], "utility": [{"month","goal","utility"}...], "total_utility"}
nlohmann::json schedule_json(const PlanConfig& plan, const Rollout& rollout);
// (month, goal id, utility) rows.
nlohmann::json utility_rows_json(const Rollout& rollout);

// First month at which the stock goal's fraction outstanding is exactly 0.
std::optional<int> completion_month(const PlanConfig& plan, const Rollout& rollout,
                                    const std::string& goal_id);
bool all_stock_goals_complete(const PlanConfig& plan, const Rollout& rollout);

// Dollars allocated to a goal each month (income x share).
std::vector<double> contributions(const PlanConfig& plan, const Rollout& rollout,
                                  const std::string& goal_id);

// Dollars flowing into retirement (401K + IRA + retirement shares plus the
// employer match) over months [0, months).
double cumulative_retirement_contribution(const PlanConfig& plan, const Rollout& rollout,
                                          int months);

// Mean over goals of the standard deviation of month-over-month changes in
// dollar contributions.
double contribution_fluctuation(const PlanConfig& plan, const Rollout& rollout);

nlohmann::json train_report_json(const TrainReport& report);

std::string format_number(double value);

}  // namespace paycheck
