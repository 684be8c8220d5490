#include "paycheck/report.hpp"

#include <charconv>
#include <cmath>

#include "paycheck/errors.hpp"

namespace paycheck {

namespace {

std::size_t goal_index(const PlanConfig& plan, const std::string& id) {
  for (std::size_t i = 0; i < plan.goals.size(); ++i)
    if (plan.goals[i].id == id) return i;
  throw ConfigError("unknown goal '" + id + "'");
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Schedule make_schedule(const PlanConfig& plan, const Rollout& rollout) {
  const PlanLayout layout(plan);
  Schedule s;
  s.columns = {"month", "income"};
  for (const auto& g : plan.goals) s.columns.push_back("contrib_" + g.id);
  s.columns.push_back("contrib_residual");
  s.columns.push_back("employer_match");
  for (int gi : layout.stock_goals) s.columns.push_back("frac_" + plan.goals[gi].id);
  for (const auto& g : plan.goals) s.columns.push_back("utility_" + g.id);
  s.columns.push_back("utility_total");

  for (const auto& step : rollout.steps) {
    std::vector<double> row{static_cast<double>(step.state.month), step.state.income};
    for (double share : step.allocation.fractions) row.push_back(share * step.state.income);
    row.push_back(step.employer_match);
    for (double x : step.state.fractions_outstanding) row.push_back(x);
    for (double u : step.utility.values) row.push_back(u);
    row.push_back(step.utility.total);
    s.rows.push_back(std::move(row));
  }
  return s;
}

std::string schedule_csv(const Schedule& schedule) {
  std::string out;
  for (std::size_t c = 0; c < schedule.columns.size(); ++c) {
    if (c) out += ',';
    out += schedule.columns[c];
  }
  out += '\n';
  for (const auto& row : schedule.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json utility_rows_json(const Rollout& rollout) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& step : rollout.steps)
    for (std::size_t i = 0; i < step.utility.values.size(); ++i)
      rows.push_back({{"month", step.utility.month},
                      {"goal", step.utility.goal_ids[i]},
                      {"utility", step.utility.values[i]}});
  return rows;
}

nlohmann::json schedule_json(const PlanConfig& plan, const Rollout& rollout) {
  const Schedule s = make_schedule(plan, rollout);
  return {{"columns", s.columns},
          {"rows", s.rows},
          {"utility", utility_rows_json(rollout)},
          {"total_utility", rollout.value}};
}

std::optional<int> completion_month(const PlanConfig& plan, const Rollout& rollout,
                                    const std::string& goal_id) {
  const PlanLayout layout(plan);
  const int slot = layout.stock_slot_of_goal[goal_index(plan, goal_id)];
  if (slot < 0) throw ConfigError("goal '" + goal_id + "' is not a stock goal");
  for (const auto& step : rollout.steps)
    if (step.state.fractions_outstanding[static_cast<std::size_t>(slot)] == 0.0)
      return step.state.month;
  return std::nullopt;
}

bool all_stock_goals_complete(const PlanConfig& plan, const Rollout& rollout) {
  for (const auto& g : plan.goals)
    if (is_stock(g.kind) && !completion_month(plan, rollout, g.id)) return false;
  return true;
}

std::vector<double> contributions(const PlanConfig& plan, const Rollout& rollout,
                                  const std::string& goal_id) {
  const std::size_t i = goal_index(plan, goal_id);
  std::vector<double> out;
  for (const auto& step : rollout.steps)
    out.push_back(step.allocation.fractions[i] * step.state.income);
  return out;
}

double cumulative_retirement_contribution(const PlanConfig& plan, const Rollout& rollout,
                                          int months) {
  const PlanLayout layout(plan);
  double total = 0.0;
  for (const auto& step : rollout.steps) {
    if (step.state.month >= months) break;
    for (int slot : {layout.contribution_401k, layout.contribution_ira, layout.retirement})
      if (slot >= 0) total += step.allocation.fractions[slot] * step.state.income;
    total += step.employer_match;
  }
  return total;
}

double contribution_fluctuation(const PlanConfig& plan, const Rollout& rollout) {
  if (plan.goals.empty() || rollout.steps.size() < 3) return 0.0;
  double sum = 0.0;
  for (const auto& g : plan.goals) {
    const auto c = contributions(plan, rollout, g.id);
    std::vector<double> d;
    for (std::size_t t = 1; t < c.size(); ++t) d.push_back(c[t] - c[t - 1]);
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    sum += std::sqrt(var / static_cast<double>(d.size() - 1));
  }
  return sum / static_cast<double>(plan.goals.size());
}

nlohmann::json train_report_json(const TrainReport& report) {
  return {{"iterations", report.objective.size()},
          {"objective", report.objective},
          {"initial_objective", report.objective.empty() ? 0.0 : report.objective.front()},
          {"final_objective", report.objective.empty() ? 0.0 : report.objective.back()},
          {"wall_seconds", report.wall_seconds},
          {"architecture",
           {{"hidden", report.architecture.hidden},
            {"activation", "tanh"},
            {"completion_flags", report.architecture.completion_flags},
            {"observe_rates", report.architecture.observe_rates}}},
          {"checkpoint", "policy.ckpt"}};
}

}  // namespace paycheck
