#pragma once

// Glue shared by the CLI, the service and the acceptance suite: which rate
// trajectories a plan trains and is evaluated on, and baseline comparisons.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paycheck/plan_io.hpp"
#include "paycheck/rates.hpp"
#include "paycheck/trainer.hpp"

namespace paycheck {

inline constexpr YearMonth kEvaluationStart{2012, 1};

bool uses_series(const PlanConfig& plan);

// Every series window of the plan's horizon, completed with the plan's
// constant rates.
std::vector<RateTrajectory> historical_dataset(const PlanConfig& plan,
                                               const std::map<std::string, RateSeries>& series);

// Constant plans: the constant trajectory. Series plans: the window starting
// at kEvaluationStart, or the latest window if the data ends too early.
RateTrajectory evaluation_trajectory(const PlanConfig& plan,
                                     const std::map<std::string, RateSeries>* series);

struct Comparison {
  double learned = 0.0;
  double waterfall = 0.0;
  double even_split = 0.0;
};

Comparison compare_policies(const PlanConfig& plan, const RateTrajectory& rates,
                            const PolicyParams& params, const PolicyArchitecture& arch);
nlohmann::json comparison_json(const Comparison& c);

// Trains per the config's mode and rolls the result out on the evaluation
// trajectory. Stochastic mode trains on every historical window of a series
// plan, or on the constant trajectory of a constant plan.
struct TrainingRun {
  TrainReport report;
  RateTrajectory evaluation;
  Rollout rollout;
};
TrainingRun run_training(const PlanConfig& plan, const TrainConfig& config,
                         const std::map<std::string, RateSeries>* series,
                         const IterationObserver& observer = {});

// Strict JSON form of a training request: {"iterations", "learning_rate",
// "seed", "mode": "constant"|"stochastic", "batch_size", "fixed_batch",
// "hidden", "observe_rates", "completion_flags"}; every field optional.
// Stochastic mode observes rates unless told otherwise.
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

// Resolves --profile: a bundled name or a path to a profile JSON file.
Profile resolve_profile(const std::string& name_or_path);

// Directory holding the bundled plans, profiles and rate fixtures.
std::string bundled_data_dir();

}  // namespace paycheck
