#pragma once

// Unrolling a plan under a policy, differentiating the total utility through
// the unrolled dynamics, and the ADAM training loop on top of it.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "paycheck/adam.hpp"
#include "paycheck/autodiff.hpp"
#include "paycheck/goals.hpp"
#include "paycheck/policy.hpp"
#include "paycheck/rates.hpp"
#include "paycheck/utility.hpp"

namespace paycheck {

struct TrajectoryStep {
  PlanState state;
  Allocation allocation;
  UtilityBreakdown utility;
  double employer_match = 0.0;  // dollars added to retirement this month
};

struct Rollout {
  std::vector<TrajectoryStep> steps;  // months 0..T
  double value = 0.0;                 // total utility
};

// Maps the current state to an allocation; used for baselines and fixed
// schedules.
using PolicyFunction = std::function<Allocation(const PlanState&, const PlanConfig&)>;

// Plain (untaped) unroll under an arbitrary policy. Every allocation is
// checked against the simplex invariant. Throws DataError if `rates` misses a
// key or is shorter than horizon + 1.
Rollout simulate(const PlanConfig& plan, const RateTrajectory& rates, const PolicyFunction& policy);

// Plain unroll under the network policy.
Rollout rollout(const PolicyParams& params, const PolicyArchitecture& arch, const PlanConfig& plan,
                const RateTrajectory& rates);

// Total utility only; same value as rollout(...).value without the per-month
// records.
double rollout_value(const PolicyParams& params, const PolicyArchitecture& arch,
                     const PlanConfig& plan, const RateTrajectory& rates);

struct ValueAndGrad {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d params, same layout as PolicyParams::data()
  double min_kink_distance = 0.0;
};

// Total utility of one taped rollout and its exact reverse-mode gradient.
ValueAndGrad rollout_value_and_grad(const PolicyParams& params, const PolicyArchitecture& arch,
                                    const PlanConfig& plan, const RateTrajectory& rates,
                                    ad::Tape& tape);

// Mean value and mean gradient over trajectories, reduced in input order.
ValueAndGrad batch_value_and_grad(const PolicyParams& params, const PolicyArchitecture& arch,
                                  const PlanConfig& plan,
                                  std::span<const RateTrajectory* const> trajectories,
                                  ad::Tape& tape);

enum class TrainMode { kConstantRates, kStochasticRates };

struct TrainConfig {
  int iterations = 5000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  PolicyArchitecture architecture;
  TrainMode mode = TrainMode::kConstantRates;
  int batch_size = 1;        // trajectories per iteration (stochastic mode)
  bool fixed_batch = false;  // use the whole dataset every iteration
  int progress_every = 0;    // print "iter=<k> V=<value>" to stderr every k iterations
};

// Throws ConfigError on N < 1, n < 1, or non-positive learning rate.
void validate_train_config(const TrainConfig& config);

struct TrainReport {
  std::vector<double> objective;  // V before each of the N updates
  PolicyParams params;            // after N updates
  PolicyArchitecture architecture;
  double wall_seconds = 0.0;
};

// Called once per iteration with the objective before the update.
using IterationObserver = std::function<void(int iteration, double value)>;

TrainReport train_constant(const PlanConfig& plan, const TrainConfig& config,
                           const IterationObserver& observer = {});

// Each iteration averages value and gradient over `batch_size` trajectories
// drawn (with replacement, seeded) from `dataset`, or over the whole dataset
// when `fixed_batch` is set.
TrainReport train_stochastic(const PlanConfig& plan, const std::vector<RateTrajectory>& dataset,
                             const TrainConfig& config, const IterationObserver& observer = {});

}  // namespace paycheck
