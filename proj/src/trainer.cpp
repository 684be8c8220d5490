#include "paycheck/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "paycheck/errors.hpp"

namespace paycheck {

namespace {

// Rate columns of one trajectory in PlanLayout order.
std::vector<const std::vector<double>*> resolve_columns(const PlanLayout& layout,
                                                        const RateTrajectory& rates,
                                                        int horizon) {
  std::vector<const std::vector<double>*> cols;
  for (const std::string& key : layout.rate_keys) {
    auto it = rates.monthly.find(key);
    if (it == rates.monthly.end()) throw DataError("rate trajectory has no series '" + key + "'");
    if (it->second.size() < static_cast<std::size_t>(horizon) + 1)
      throw DataError("rate series '" + key + "' covers " + std::to_string(it->second.size()) +
                      " months, horizon needs " + std::to_string(horizon + 1));
    cols.push_back(&it->second);
  }
  return cols;
}

// The shared unroll. T is double or ad::Var; `lift` turns a constant into a
// T, `policy(month, fractions, income, rates)` returns one T per slot, and
// `record(month, fractions, allocation, utilities, match, income)` observes
// each month before the transition.
template <class T, class Lift, class Policy, class Record>
T unroll(const PlanConfig& plan, const PlanLayout& layout, const RateTrajectory& rates,
         Lift&& lift, Policy&& policy, Record&& record) {
  const int horizon = plan.horizon_months;
  const auto cols = resolve_columns(layout, rates, horizon);
  for (const GoalSpec& g : plan.goals) require_utility_fields(g);

  const std::size_t n_goals = plan.goals.size();
  const std::size_t n_stock = layout.stock_goals.size();
  std::vector<T> x(n_stock, lift(1.0));
  std::vector<T> next(n_stock);
  std::vector<T> utilities(n_goals);
  std::vector<double> rates_now(cols.size());
  double income = plan.initial_income;
  const double debt_upper =
      plan.debt_can_exceed_principal ? std::numeric_limits<double>::infinity() : 1.0;

  T total{};
  for (int t = 0; t <= horizon; ++t) {
    for (std::size_t c = 0; c < cols.size(); ++c) rates_now[c] = (*cols[c])[t];
    const std::vector<T> pi = policy(t, x, income, rates_now);
    if (pi.size() != plan.slot_count()) throw ConfigError("policy returned the wrong slot count");

    T month_total{};
    for (std::size_t i = 0; i < n_goals; ++i) {
      const GoalSpec& g = plan.goals[i];
      const int s = layout.stock_slot_of_goal[i];
      utilities[i] = goal_utility_value(g, s >= 0 ? x[s] : pi[i], pi[i], income);
      month_total = i == 0 ? utilities[i] : month_total + utilities[i];
    }
    if (n_goals == 0) month_total = lift(0.0);
    total = t == 0 ? month_total : total + month_total;

    T match{};
    bool has_match = false;
    if (layout.contribution_401k >= 0) {
      const GoalSpec& k = plan.goals[layout.contribution_401k];
      match = dynamics::employer_match(pi[layout.contribution_401k], income,
                                       k.match_rate.value_or(0.0), k.match_cap_frac.value_or(0.0));
      has_match = true;
    }
    record(t, x, pi, utilities, has_match ? value_of(match) : 0.0, income);
    if (t == horizon) break;

    for (std::size_t s = 0; s < n_stock; ++s) {
      const int gi = layout.stock_goals[s];
      const GoalSpec& g = plan.goals[gi];
      const double r = rates_now[layout.goal_rate_column[gi]];
      const double amount = *g.total_amount;
      switch (g.kind) {
        case GoalKind::kDebt:
          next[s] = clamp_range(dynamics::debt_raw(x[s], r, pi[gi] * income, amount), 0.0,
                                debt_upper);
          break;
        case GoalKind::kSavings:
        case GoalKind::kEmergencyFund:
          next[s] = clamp_range(dynamics::savings_raw(x[s], r, pi[gi] * income, amount), 0.0, 1.0);
          break;
        case GoalKind::kRetirement: {
          T shares{};
          bool any = false;
          for (int slot : {layout.contribution_401k, layout.contribution_ira, gi}) {
            if (slot < 0) continue;
            shares = any ? shares + pi[slot] : pi[slot];
            any = true;
          }
          T contribution = shares * income;
          if (has_match) contribution = match + contribution;
          next[s] = clamp_range(dynamics::retirement_raw(x[s], r, contribution, amount), 0.0, 1.0);
          break;
        }
        default:
          break;
      }
    }
    x.swap(next);
    income = income * (1.0 + rates_now[layout.inflation_column]);
  }
  return total;
}

struct NoRecord {
  template <class... Args>
  void operator()(Args&&...) const {}
};

std::map<std::string, double> rates_map(const PlanLayout& layout, const std::vector<double>& r) {
  std::map<std::string, double> m;
  for (std::size_t c = 0; c < r.size(); ++c) m[layout.rate_keys[c]] = r[c];
  return m;
}

Rollout simulate_with(const PlanConfig& plan, const PlanLayout& layout, const RateTrajectory& rates,
                      const std::function<std::vector<double>(int, const std::vector<double>&, double,
                                                              const std::vector<double>&)>& policy) {
  Rollout out;
  auto lift = [](double v) { return v; };
  auto record = [&](int t, const std::vector<double>& x, const std::vector<double>& pi,
                    const std::vector<double>& u, double match, double income) {
    TrajectoryStep step;
    step.state.month = t;
    step.state.fractions_outstanding = x;
    step.state.income = income;
    step.allocation.fractions = pi;
    step.utility.month = t;
    for (std::size_t i = 0; i < plan.goals.size(); ++i) {
      step.utility.goal_ids.push_back(plan.goals[i].id);
      step.utility.values.push_back(u[i]);
      step.utility.total += u[i];
    }
    step.employer_match = match;
    out.steps.push_back(std::move(step));
  };
  out.value = unroll<double>(plan, layout, rates, lift, policy, record);
  // current_rates are filled afterwards so the hot loop stays map-free.
  for (auto& step : out.steps) {
    std::vector<double> r;
    for (const std::string& key : layout.rate_keys)
      r.push_back(rates.monthly.at(key)[static_cast<std::size_t>(step.state.month)]);
    step.state.current_rates = rates_map(layout, r);
  }
  return out;
}

}  // namespace

Rollout simulate(const PlanConfig& plan, const RateTrajectory& rates, const PolicyFunction& policy) {
  check_engine_plan(plan);
  const PlanLayout layout(plan);
  auto adapter = [&](int t, const std::vector<double>& x, double income,
                     const std::vector<double>& r) {
    PlanState s;
    s.month = t;
    s.fractions_outstanding = x;
    s.income = income;
    s.current_rates = rates_map(layout, r);
    Allocation a = policy(s, plan);
    validate_allocation(a, plan.slot_count());
    return a.fractions;
  };
  return simulate_with(plan, layout, rates, adapter);
}

Rollout rollout(const PolicyParams& params, const PolicyArchitecture& arch, const PlanConfig& plan,
                const RateTrajectory& rates) {
  check_engine_plan(plan);
  const PlanLayout layout(plan);
  std::vector<double> features;
  auto policy = [&](int t, const std::vector<double>& x, double,
                    const std::vector<double>& r) {
    write_features(x, t, plan.horizon_months, r, arch, features);
    return params.forward(features);
  };
  return simulate_with(plan, layout, rates, policy);
}

double rollout_value(const PolicyParams& params, const PolicyArchitecture& arch,
                     const PlanConfig& plan, const RateTrajectory& rates) {
  check_engine_plan(plan);
  const PlanLayout layout(plan);
  std::vector<double> features;
  auto lift = [](double v) { return v; };
  auto policy = [&](int t, const std::vector<double>& x, double, const std::vector<double>& r) {
    write_features(x, t, plan.horizon_months, r, arch, features);
    return params.forward(features);
  };
  return unroll<double>(plan, layout, rates, lift, policy, NoRecord{});
}

ValueAndGrad rollout_value_and_grad(const PolicyParams& params, const PolicyArchitecture& arch,
                                    const PlanConfig& plan, const RateTrajectory& rates,
                                    ad::Tape& tape) {
  check_engine_plan(plan);
  const PlanLayout layout(plan);
  tape.clear();
  const ad::Var theta = tape.leaf(params.data());
  std::vector<ad::Var> feature_vars;
  std::vector<ad::Var> pi;
  auto lift = [&](double v) { return tape.constant(v); };
  auto policy = [&](int t, const std::vector<ad::Var>& x, double,
                    const std::vector<double>& r) {
    feature_vars.assign(x.begin(), x.end());
    if (arch.completion_flags)
      for (const ad::Var& xi : x) feature_vars.push_back(tape.constant(xi.value() == 0.0 ? 1.0 : 0.0));
    feature_vars.push_back(
        tape.constant(plan.horizon_months > 0 ? static_cast<double>(t) / plan.horizon_months : 0.0));
    if (arch.observe_rates)
      for (double rate : r) feature_vars.push_back(tape.constant(rate * 100.0));
    const ad::Var probs = params.forward(tape, theta, tape.stack(feature_vars));
    pi.resize(static_cast<std::size_t>(probs.size()));
    for (int i = 0; i < probs.size(); ++i) pi[i] = tape.index(probs, i);
    return pi;
  };
  const ad::Var total = unroll<ad::Var>(plan, layout, rates, lift, policy, NoRecord{});
  tape.backward(total);
  ValueAndGrad out;
  out.value = total.value();
  const auto g = tape.adjoint(theta);
  out.gradient.assign(g.begin(), g.end());
  out.min_kink_distance = tape.min_kink_distance();
  return out;
}

ValueAndGrad batch_value_and_grad(const PolicyParams& params, const PolicyArchitecture& arch,
                                  const PlanConfig& plan,
                                  std::span<const RateTrajectory* const> trajectories,
                                  ad::Tape& tape) {
  if (trajectories.empty()) throw DataError("empty trajectory batch");
  ValueAndGrad out;
  out.gradient.assign(params.size(), 0.0);
  out.min_kink_distance = std::numeric_limits<double>::infinity();
  double value_sum = 0.0;
  for (const RateTrajectory* tr : trajectories) {
    ValueAndGrad one = rollout_value_and_grad(params, arch, plan, *tr, tape);
    value_sum += one.value;
    for (std::size_t i = 0; i < out.gradient.size(); ++i) out.gradient[i] += one.gradient[i];
    out.min_kink_distance = std::min(out.min_kink_distance, one.min_kink_distance);
  }
  const double n = static_cast<double>(trajectories.size());
  out.value = value_sum / n;
  for (double& g : out.gradient) g /= n;
  return out;
}

void validate_train_config(const TrainConfig& c) {
  if (c.iterations < 1) throw ConfigError("iterations must be at least 1", "/iterations");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate))
    throw ConfigError("learning rate must be positive", "/learning_rate");
  if (c.batch_size < 1) throw ConfigError("batch size must be at least 1", "/batch");
  if (c.architecture.hidden.empty())
    throw ConfigError("at least one hidden layer is required", "/architecture/hidden");
}

namespace {

TrainReport train_on(const PlanConfig& plan, const std::vector<RateTrajectory>& dataset,
                     const TrainConfig& config, bool sample, const IterationObserver& observer) {
  validate_train_config(config);
  check_engine_plan(plan);
  if (dataset.empty()) throw DataError("empty trajectory dataset");
  const auto started = std::chrono::steady_clock::now();

  TrainReport report;
  report.architecture = config.architecture;
  report.params = make_policy(plan, config.architecture, config.seed);
  AdamState adam(report.params.size(),
                 {config.learning_rate, config.beta1, config.beta2, config.epsilon});
  // Batch sampling has its own stream so the initialization is identical
  // across modes.
  std::mt19937_64 batch_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);

  ad::Tape tape;
  std::vector<const RateTrajectory*> batch;
  report.objective.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    batch.clear();
    if (sample) {
      for (int k = 0; k < config.batch_size; ++k) batch.push_back(&dataset[pick(batch_rng)]);
    } else {
      for (const auto& tr : dataset) batch.push_back(&tr);
    }
    const ValueAndGrad vg = batch_value_and_grad(report.params, config.architecture, plan, batch, tape);
    if (!std::isfinite(vg.value)) throw TrainingError("objective is not finite", it);
    report.objective.push_back(vg.value);
    if (observer) observer(it, vg.value);
    if (config.progress_every > 0 && it % config.progress_every == 0)
      std::cerr << "iter=" << it << " V=" << vg.value << '\n';
    adam_ascent_step(report.params.data(), vg.gradient, adam);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace

TrainReport train_constant(const PlanConfig& plan, const TrainConfig& config,
                           const IterationObserver& observer) {
  check_engine_plan(plan);
  const std::vector<RateTrajectory> dataset{constant_trajectory(plan, plan.horizon_months)};
  TrainConfig single = config;
  single.batch_size = 1;
  return train_on(plan, dataset, single, true, observer);
}

TrainReport train_stochastic(const PlanConfig& plan, const std::vector<RateTrajectory>& dataset,
                             const TrainConfig& config, const IterationObserver& observer) {
  if (dataset.empty()) throw DataError("empty trajectory dataset");
  return train_on(plan, dataset, config, !config.fixed_batch, observer);
}

}  // namespace paycheck
