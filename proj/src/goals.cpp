#include "paycheck/goals.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "paycheck/errors.hpp"

namespace paycheck {

const char* to_string(GoalKind kind) {
  switch (kind) {
    case GoalKind::kDebt: return "Debt";
    case GoalKind::kSavings: return "Savings";
    case GoalKind::kEmergencyFund: return "EmergencyFund";
    case GoalKind::kRetirement: return "Retirement";
    case GoalKind::kContribution401K: return "Contribution401K";
    case GoalKind::kContributionIRA: return "ContributionIRA";
  }
  return "?";
}

GoalKind goal_kind_from_string(const std::string& name) {
  for (GoalKind kind : {GoalKind::kDebt, GoalKind::kSavings, GoalKind::kEmergencyFund,
                        GoalKind::kRetirement, GoalKind::kContribution401K,
                        GoalKind::kContributionIRA}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown goal kind '" + name + "'");
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate_goal(const GoalSpec& goal, const std::string& path) {
  if (goal.id.empty())
    throw ConfigError("goal id must not be empty", path + "/id");
  if (goal.id == kInflationKey)
    throw ConfigError("goal id 'inflation' is reserved", path + "/id");
  if (!finite_nonneg(goal.weight_p))
    throw ConfigError("weight_p must be a nonnegative number", path + "/weight_p");
  if (goal.weight_q && !finite_nonneg(*goal.weight_q))
    throw ConfigError("weight_q must be a nonnegative number", path + "/weight_q");
  if (goal.crossover_h && !(*goal.crossover_h >= 0.0 && *goal.crossover_h <= 1.0))
    throw ConfigError("crossover_h must lie in [0,1]", path + "/crossover_h");
  if (goal.rate_source.is_constant()) {
    if (!(std::isfinite(goal.rate_source.annual_rate) && goal.rate_source.annual_rate > -1.0))
      throw ConfigError("rate must be a number greater than -1", path + "/rate_source");
  } else {
    if (goal.rate_source.series_id.empty())
      throw ConfigError("series id must not be empty", path + "/rate_source");
  }

  switch (goal.kind) {
    case GoalKind::kDebt:
    case GoalKind::kSavings:
    case GoalKind::kEmergencyFund:
    case GoalKind::kRetirement:
      if (!goal.total_amount)
        throw ConfigError("total_amount is required for stock goals", path + "/total_amount");
      if (!(std::isfinite(*goal.total_amount) && *goal.total_amount > 0.0))
        throw ConfigError("total_amount must be positive", path + "/total_amount");
      break;
    case GoalKind::kContribution401K:
      if (!(goal.min_contrib_frac && goal.max_contrib_frac))
        throw ConfigError("401K goals need min_contrib_frac and max_contrib_frac",
                          path + "/max_contrib_frac");
      if (!(0.0 < *goal.min_contrib_frac && *goal.min_contrib_frac < *goal.max_contrib_frac &&
            *goal.max_contrib_frac < 1.0))
        throw ConfigError("need 0 < min_contrib_frac < max_contrib_frac < 1",
                          path + "/min_contrib_frac");
      if (!goal.weight_q)
        throw ConfigError("401K goals need weight_q", path + "/weight_q");
      break;
    case GoalKind::kContributionIRA:
      if (!(goal.max_contrib_dollars.has_value() && *goal.max_contrib_dollars > 0.0))
        throw ConfigError("max_contrib_dollars must be positive", path + "/max_contrib_dollars");
      break;
  }
  if (goal.kind == GoalKind::kEmergencyFund) {
    if (!(goal.rate_source.is_constant() && goal.rate_source.annual_rate == 0.0))
      throw ConfigError("emergency funds carry no interest", path + "/rate_source");
    if (!(goal.weight_q && goal.crossover_h))
      throw ConfigError("emergency funds need weight_q and crossover_h", path + "/weight_q");
  }
  if (goal.match_rate && !finite_nonneg(*goal.match_rate))
    throw ConfigError("match_rate must be nonnegative", path + "/match_rate");
  if (goal.match_cap_frac && !finite_nonneg(*goal.match_cap_frac))
    throw ConfigError("match_cap_frac must be nonnegative", path + "/match_cap_frac");
}

void check_engine_plan(const PlanConfig& plan) {
  if (!(std::isfinite(plan.initial_income) && plan.initial_income > 0.0))
    throw ConfigError("initial_income must be positive", "/initial_income");
  if (plan.horizon_months < 0)
    throw ConfigError("horizon_months must be nonnegative", "/horizon_months");
  if (plan.inflation_source.is_constant() && !(plan.inflation_source.annual_rate > -1.0))
    throw ConfigError("inflation must exceed -1", "/inflation_source");
  std::set<std::string> ids;
  int counts[6] = {};
  for (std::size_t i = 0; i < plan.goals.size(); ++i) {
    const std::string path = "/goals/" + std::to_string(i);
    validate_goal(plan.goals[i], path);
    if (!ids.insert(plan.goals[i].id).second)
      throw ConfigError("duplicate goal id '" + plan.goals[i].id + "'", path + "/id");
    ++counts[static_cast<int>(plan.goals[i].kind)];
  }
  if (counts[static_cast<int>(GoalKind::kRetirement)] > 1)
    throw ConfigError("more than one Retirement goal", "/goals");
  if (counts[static_cast<int>(GoalKind::kContribution401K)] > 1)
    throw ConfigError("more than one Contribution401K goal", "/goals");
  if (counts[static_cast<int>(GoalKind::kContributionIRA)] > 1)
    throw ConfigError("more than one ContributionIRA goal", "/goals");
  if (counts[static_cast<int>(GoalKind::kEmergencyFund)] > 1)
    throw ConfigError("more than one EmergencyFund goal", "/goals");
}

void validate_plan(const PlanConfig& plan) {
  check_engine_plan(plan);
  if (plan.horizon_months < 1)
    throw ConfigError("horizon_months must be at least 1", "/horizon_months");
  int retirement = 0;
  for (const auto& g : plan.goals) retirement += g.kind == GoalKind::kRetirement;
  if (retirement != 1)
    throw ConfigError("exactly one Retirement goal is required", "/goals");
}

std::string rate_key(const GoalSpec& goal) {
  return goal.rate_source.is_constant() ? goal.id : goal.rate_source.series_id;
}

std::string inflation_key(const PlanConfig& plan) {
  return plan.inflation_source.is_constant() ? std::string(kInflationKey)
                                             : plan.inflation_source.series_id;
}

PlanLayout::PlanLayout(const PlanConfig& plan) {
  std::set<std::string> keys;
  keys.insert(inflation_key(plan));
  stock_slot_of_goal.assign(plan.goals.size(), -1);
  for (std::size_t i = 0; i < plan.goals.size(); ++i) {
    const GoalSpec& g = plan.goals[i];
    const int gi = static_cast<int>(i);
    if (is_stock(g.kind)) {
      stock_slot_of_goal[i] = static_cast<int>(stock_goals.size());
      stock_goals.push_back(gi);
      keys.insert(rate_key(g));
    }
    if (g.kind == GoalKind::kRetirement) retirement = gi;
    if (g.kind == GoalKind::kContribution401K) contribution_401k = gi;
    if (g.kind == GoalKind::kContributionIRA) contribution_ira = gi;
  }
  rate_keys.assign(keys.begin(), keys.end());
  auto column = [&](const std::string& key) {
    return static_cast<int>(std::lower_bound(rate_keys.begin(), rate_keys.end(), key) -
                            rate_keys.begin());
  };
  goal_rate_column.assign(plan.goals.size(), -1);
  for (std::size_t i = 0; i < plan.goals.size(); ++i)
    if (is_stock(plan.goals[i].kind)) goal_rate_column[i] = column(rate_key(plan.goals[i]));
  inflation_column = column(inflation_key(plan));
}

Allocation Allocation::uniform(std::size_t slots) {
  return Allocation{std::vector<double>(slots, 1.0 / static_cast<double>(slots))};
}

Allocation Allocation::all_to(std::size_t slots, std::size_t slot) {
  Allocation a{std::vector<double>(slots, 0.0)};
  a.fractions.at(slot) = 1.0;
  return a;
}

void validate_allocation(const Allocation& allocation, std::size_t slots) {
  if (allocation.fractions.size() != slots)
    throw ConfigError("allocation has " + std::to_string(allocation.fractions.size()) +
                      " slots, expected " + std::to_string(slots));
  double total = 0.0;
  for (double f : allocation.fractions) {
    if (!(f >= 0.0)) throw ConfigError("allocation entries must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance)
    throw ConfigError("allocation must sum to 1 (got " + std::to_string(total) + ")");
}

double monthly_rate(double annual_rate) {
  if (!(annual_rate > -1.0)) throw std::domain_error("annual rate must exceed -1");
  return std::pow(1.0 + annual_rate, 1.0 / 12.0) - 1.0;
}

double to_monthly(double annual_rate, RateConvention convention, bool is_debt) {
  switch (convention) {
    case RateConvention::kPerStep: return annual_rate;
    case RateConvention::kNominalDebt:
      if (is_debt) return annual_rate / 12.0;
      return monthly_rate(annual_rate);
    case RateConvention::kGeometric: break;
  }
  return monthly_rate(annual_rate);
}

StepResult step_debt(double x, double monthly, double payment, double total, double upper) {
  const double raw = dynamics::debt_raw(x, monthly, payment, total);
  return {clamp_range(raw, 0.0, upper), raw};
}

StepResult step_savings(double x, double monthly, double contribution, double total) {
  const double raw = dynamics::savings_raw(x, monthly, contribution, total);
  return {clamp_range(raw, 0.0, 1.0), raw};
}

StepResult step_retirement(double x, double monthly, double income, double pi_401k, double pi_ira,
                           double pi_rs, double match_dollars, double total) {
  const double contribution = match_dollars + (pi_401k + pi_ira + pi_rs) * income;
  const double raw = dynamics::retirement_raw(x, monthly, contribution, total);
  return {clamp_range(raw, 0.0, 1.0), raw};
}

double employer_match(double pi_401k, double income, double match_rate, double match_cap_frac) {
  return dynamics::employer_match(pi_401k, income, match_rate, match_cap_frac);
}

PlanState initial_state(const PlanConfig& plan, const std::map<std::string, double>& rates_at_0) {
  check_engine_plan(plan);
  PlanLayout layout(plan);
  PlanState s;
  s.month = 0;
  s.fractions_outstanding.assign(layout.stock_goals.size(), 1.0);
  s.income = plan.initial_income;
  s.current_rates = rates_at_0;
  return s;
}

PlanState advance(const PlanState& state, const Allocation& allocation, const PlanConfig& plan,
                  const std::map<std::string, double>& rates_at_t,
                  const std::map<std::string, double>& rates_next) {
  if (state.month < 0 || state.month >= plan.horizon_months)
    throw SequencingError("cannot advance month " + std::to_string(state.month) +
                          " with horizon " + std::to_string(plan.horizon_months));
  validate_allocation(allocation, plan.slot_count());
  const PlanLayout layout(plan);
  if (state.fractions_outstanding.size() != layout.stock_goals.size())
    throw ConfigError("state does not match plan: wrong number of stock goals");

  auto rate = [&](const std::string& key) {
    auto it = rates_at_t.find(key);
    if (it == rates_at_t.end()) throw DataError("missing rate '" + key + "'");
    return it->second;
  };
  const auto& pi = allocation.fractions;
  auto slot = [&](int goal) { return goal < 0 ? 0.0 : pi[goal]; };

  double match = 0.0;
  if (layout.contribution_401k >= 0) {
    const GoalSpec& k = plan.goals[layout.contribution_401k];
    match = employer_match(pi[layout.contribution_401k], state.income, k.match_rate.value_or(0.0),
                           k.match_cap_frac.value_or(0.0));
  }

  PlanState next;
  next.month = state.month + 1;
  next.fractions_outstanding.resize(state.fractions_outstanding.size());
  for (std::size_t s = 0; s < layout.stock_goals.size(); ++s) {
    const int gi = layout.stock_goals[s];
    const GoalSpec& g = plan.goals[gi];
    const double x = state.fractions_outstanding[s];
    const double r = rate(rate_key(g));
    const double total = *g.total_amount;
    switch (g.kind) {
      case GoalKind::kDebt: {
        const double upper =
            plan.debt_can_exceed_principal ? std::numeric_limits<double>::infinity() : 1.0;
        next.fractions_outstanding[s] = step_debt(x, r, pi[gi] * state.income, total, upper).value;
        break;
      }
      case GoalKind::kSavings:
      case GoalKind::kEmergencyFund:
        next.fractions_outstanding[s] = step_savings(x, r, pi[gi] * state.income, total).value;
        break;
      case GoalKind::kRetirement:
        next.fractions_outstanding[s] =
            step_retirement(x, r, state.income, slot(layout.contribution_401k),
                            slot(layout.contribution_ira), pi[gi], match, total)
                .value;
        break;
      default: break;
    }
  }
  next.income = state.income * (1.0 + rate(inflation_key(plan)));
  next.current_rates = rates_next.empty() ? rates_at_t : rates_next;
  return next;
}

}  // namespace paycheck
