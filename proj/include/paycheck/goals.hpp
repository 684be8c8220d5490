#pragma once

// Goal specifications, plan state and the monthly transition for every goal
// kind. States are fractions outstanding: 1 means untouched, 0 means complete.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace paycheck {

enum class GoalKind {
  kDebt,
  kSavings,
  kEmergencyFund,
  kRetirement,
  kContribution401K,
  kContributionIRA,
};

// Stock goals carry a fraction-outstanding state; flow goals (401K, IRA) are
// assessed on the current month's contribution only.
constexpr bool is_stock(GoalKind kind) {
  return kind != GoalKind::kContribution401K && kind != GoalKind::kContributionIRA;
}

const char* to_string(GoalKind kind);
GoalKind goal_kind_from_string(const std::string& name);

struct RateSource {
  enum class Type { kConstant, kSeries };

  Type type = Type::kConstant;
  double annual_rate = 0.0;  // kConstant
  std::string series_id;     // kSeries

  static RateSource constant(double annual) { return {Type::kConstant, annual, {}}; }
  static RateSource series(std::string id) { return {Type::kSeries, 0.0, std::move(id)}; }

  bool is_constant() const { return type == Type::kConstant; }
  bool operator==(const RateSource&) const = default;
};

struct GoalSpec {
  std::string id;
  GoalKind kind = GoalKind::kDebt;
  std::optional<double> total_amount;  // dollars; stock goals only
  RateSource rate_source;
  double weight_p = 1.0;
  std::optional<double> weight_q;
  std::optional<double> crossover_h;
  std::optional<double> min_contrib_frac;     // 401K
  std::optional<double> max_contrib_frac;     // 401K
  std::optional<double> max_contrib_dollars;  // IRA, per month
  std::optional<double> match_rate;           // 401K employer match multiplier
  std::optional<double> match_cap_frac;       // salary fraction up to which the match applies

  bool operator==(const GoalSpec&) const = default;
};

// How quoted annual rates become per-month rates.
enum class RateConvention {
  kGeometric,    // (1 + r)^(1/12) - 1 for every rate
  kNominalDebt,  // APR / 12 for debts, geometric otherwise
  kPerStep,      // the quoted rate already is the per-step rate
};

struct PlanConfig {
  double initial_income = 0.0;  // dollars per month
  int horizon_months = 0;
  RateSource inflation_source;
  std::vector<GoalSpec> goals;  // order fixes allocation slots; residual is last
  RateConvention rate_convention = RateConvention::kGeometric;
  // Lets debt fractions grow past 1 when interest outpaces payments. Off by
  // default (fractions are clamped to [0, 1]).
  bool debt_can_exceed_principal = false;

  std::size_t slot_count() const { return goals.size() + 1; }
  std::size_t residual_slot() const { return goals.size(); }
  bool operator==(const PlanConfig&) const = default;
};

// Per-goal invariants. Throws ConfigError naming `path`.
void validate_goal(const GoalSpec& goal, const std::string& path = "/goal");

// Everything the engine needs to run: valid goals, unique ids, positive
// income, nonnegative horizon, no duplicated Retirement/401K/IRA/EF goals.
void check_engine_plan(const PlanConfig& plan);

// Full plan-file contract: check_engine_plan plus horizon >= 1 and exactly one
// Retirement goal.
void validate_plan(const PlanConfig& plan);

// Rate keys index RateTrajectory columns: the series id for series sources,
// otherwise the goal id (or "inflation").
inline constexpr const char* kInflationKey = "inflation";
std::string rate_key(const GoalSpec& goal);
std::string inflation_key(const PlanConfig& plan);

// Precomputed slot bookkeeping for one plan.
struct PlanLayout {
  explicit PlanLayout(const PlanConfig& plan);

  std::vector<int> stock_goals;        // goal index of each stock slot
  std::vector<int> stock_slot_of_goal; // -1 for flow goals
  int retirement = -1;
  int contribution_401k = -1;
  int contribution_ira = -1;
  std::vector<std::string> rate_keys;  // sorted, unique
  std::vector<int> goal_rate_column;   // index into rate_keys, -1 for flow goals
  int inflation_column = -1;
};

struct PlanState {
  int month = 0;
  std::vector<double> fractions_outstanding;  // one per stock goal, layout order
  double income = 0.0;
  std::map<std::string, double> current_rates;  // monthly
};

struct Allocation {
  std::vector<double> fractions;  // goals..., residual

  static Allocation uniform(std::size_t slots);
  // All income to one slot.
  static Allocation all_to(std::size_t slots, std::size_t slot);
};

inline constexpr double kSimplexTolerance = 1e-9;

// Throws ConfigError unless entries are nonnegative and sum to 1 within
// kSimplexTolerance.
void validate_allocation(const Allocation& allocation, std::size_t slots);

// Geometric conversion (1 + r)^(1/12) - 1. Throws std::domain_error for r <= -1.
double monthly_rate(double annual_rate);
double to_monthly(double annual_rate, RateConvention convention, bool is_debt);

struct StepResult {
  double value;  // clamped
  double raw;
};

StepResult step_debt(double x, double monthly, double payment, double total, double upper = 1.0);
StepResult step_savings(double x, double monthly, double contribution, double total);
StepResult step_retirement(double x, double monthly, double income, double pi_401k, double pi_ira,
                           double pi_rs, double match_dollars, double total);
double employer_match(double pi_401k, double income, double match_rate, double match_cap_frac);

PlanState initial_state(const PlanConfig& plan, const std::map<std::string, double>& rates_at_0);

// One month of dynamics. `rates_at_t` holds the monthly rate for every rate
// key in the plan layout. Throws SequencingError when state.month is already
// at the horizon.
PlanState advance(const PlanState& state, const Allocation& allocation, const PlanConfig& plan,
                  const std::map<std::string, double>& rates_at_t,
                  const std::map<std::string, double>& rates_next = {});

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double clamp_range(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }
inline double value_of(double x) { return x; }

// Transition formulas written once for plain doubles and taped variables.
namespace dynamics {

template <class T>
T debt_raw(const T& x, double monthly, const T& payment, double total) {
  return (1.0 + monthly) * x - payment / total;
}

template <class T>
T savings_raw(const T& x, double monthly, const T& contribution, double total) {
  return 1.0 - (1.0 + monthly) * (1.0 - x) - contribution / total;
}

// `contribution` is match + income * (pi_401k + pi_ira + pi_rs).
template <class T>
T retirement_raw(const T& x, double monthly, const T& contribution, double total) {
  return 1.0 - (1.0 + monthly) * (1.0 - x) - contribution / total;
}

template <class T>
T employer_match(const T& pi_401k, double income, double match_rate, double match_cap_frac) {
  T capped = clamp_range(pi_401k, -std::numeric_limits<double>::infinity(), match_cap_frac);
  return capped * match_rate * income;
}

}  // namespace dynamics

}  // namespace paycheck
