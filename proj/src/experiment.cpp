#include "paycheck/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <type_traits>

#include "paycheck/baselines.hpp"
#include "paycheck/errors.hpp"

namespace paycheck {

bool uses_series(const PlanConfig& plan) {
  if (!plan.inflation_source.is_constant()) return true;
  for (const auto& g : plan.goals)
    if (is_stock(g.kind) && !g.rate_source.is_constant()) return true;
  return false;
}

namespace {

// Only the series the plan refers to, so coverage is not cut short by
// unrelated files in the rates directory.
std::map<std::string, RateSeries> referenced(const PlanConfig& plan,
                                             const std::map<std::string, RateSeries>& series) {
  std::map<std::string, RateSeries> out;
  auto take = [&](const RateSource& src) {
    if (src.is_constant()) return;
    auto it = series.find(src.series_id);
    if (it == series.end()) throw DataError("no rate series named '" + src.series_id + "'");
    out.emplace(it->first, it->second);
  };
  take(plan.inflation_source);
  for (const auto& g : plan.goals)
    if (is_stock(g.kind)) take(g.rate_source);
  return out;
}

}  // namespace

std::vector<RateTrajectory> historical_dataset(const PlanConfig& plan,
                                               const std::map<std::string, RateSeries>& series) {
  if (!uses_series(plan)) return {constant_trajectory(plan, plan.horizon_months)};
  std::vector<RateTrajectory> out;
  for (auto& w : all_windows(referenced(plan, series), plan.horizon_months))
    out.push_back(with_plan_constants(plan, std::move(w)));
  return out;
}

RateTrajectory evaluation_trajectory(const PlanConfig& plan,
                                     const std::map<std::string, RateSeries>* series) {
  if (!uses_series(plan)) return constant_trajectory(plan, plan.horizon_months);
  if (!series) throw DataError("plan uses rate series but no rate data was supplied");
  const auto used = referenced(plan, *series);
  const auto [lo, hi] = common_coverage(used);
  YearMonth start = kEvaluationStart;
  if (start.plus(plan.horizon_months) > hi) start = hi.plus(-plan.horizon_months);
  if (start < lo) throw DataError("rate data is shorter than the plan horizon");
  return with_plan_constants(plan, window_at(used, start, plan.horizon_months));
}

Comparison compare_policies(const PlanConfig& plan, const RateTrajectory& rates,
                            const PolicyParams& params, const PolicyArchitecture& arch) {
  Comparison c;
  c.learned = rollout(params, arch, plan, rates).value;
  c.waterfall = simulate(plan, rates, waterfall_policy).value;
  c.even_split = simulate(plan, rates, even_split_policy).value;
  return c;
}

nlohmann::json comparison_json(const Comparison& c) {
  return {{"learned", c.learned}, {"waterfall", c.waterfall}, {"even_split", c.even_split}};
}

std::string bundled_data_dir() {
  if (const char* env = std::getenv("PAYCHECK_DATA_DIR")) return env;
  return PAYCHECK_DATA_DIR;
}

TrainingRun run_training(const PlanConfig& plan, const TrainConfig& config,
                         const std::map<std::string, RateSeries>* series,
                         const IterationObserver& observer) {
  TrainingRun run;
  if (config.mode == TrainMode::kConstantRates) {
    if (uses_series(plan))
      throw ConfigError("constant mode needs constant rate sources; use stochastic mode",
                        "/mode");
    run.report = train_constant(plan, config, observer);
  } else {
    if (uses_series(plan) && !series)
      throw ConfigError("stochastic mode with rate series needs rate data", "/rates_dir");
    const std::vector<RateTrajectory> dataset =
        uses_series(plan) ? historical_dataset(plan, *series)
                          : std::vector<RateTrajectory>{constant_trajectory(plan, plan.horizon_months)};
    run.report = train_stochastic(plan, dataset, config, observer);
  }
  run.evaluation = evaluation_trajectory(plan, series);
  run.rollout = rollout(run.report.params, run.report.architecture, plan, run.evaluation);
  return run;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("expected an object", "/");
  static const std::set<std::string> allowed{"iterations", "learning_rate", "seed",
                                             "mode",       "batch_size",    "fixed_batch",
                                             "hidden",     "observe_rates", "completion_flags"};
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown field", "/" + key);
  TrainConfig c;
  auto integer = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw ConfigError("expected an integer", std::string("/") + key);
    out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
  };
  auto boolean = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) throw ConfigError("expected a boolean", std::string("/") + key);
    out = j.at(key).get<bool>();
  };
  integer("iterations", c.iterations);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("expected a non-negative integer", "/seed");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  integer("batch_size", c.batch_size);
  if (j.contains("learning_rate")) {
    if (!j.at("learning_rate").is_number()) throw ConfigError("expected a number", "/learning_rate");
    c.learning_rate = j.at("learning_rate").get<double>();
  }
  if (j.contains("mode")) {
    const auto& m = j.at("mode");
    if (m == "constant") {
      c.mode = TrainMode::kConstantRates;
    } else if (m == "stochastic") {
      c.mode = TrainMode::kStochasticRates;
      c.architecture.observe_rates = true;
    } else {
      throw ConfigError("mode must be 'constant' or 'stochastic'", "/mode");
    }
  }
  boolean("fixed_batch", c.fixed_batch);
  boolean("observe_rates", c.architecture.observe_rates);
  boolean("completion_flags", c.architecture.completion_flags);
  if (j.contains("hidden")) {
    const auto& h = j.at("hidden");
    if (!h.is_array()) throw ConfigError("expected an array of layer widths", "/hidden");
    c.architecture.hidden.clear();
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (!h[i].is_number_integer() || h[i].get<int>() < 1)
        throw ConfigError("layer width must be a positive integer", "/hidden/" + std::to_string(i));
      c.architecture.hidden.push_back(h[i].get<int>());
    }
  }
  validate_train_config(c);
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"iterations", c.iterations},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"mode", c.mode == TrainMode::kConstantRates ? "constant" : "stochastic"},
          {"batch_size", c.batch_size},
          {"fixed_batch", c.fixed_batch},
          {"hidden", c.architecture.hidden},
          {"observe_rates", c.architecture.observe_rates},
          {"completion_flags", c.architecture.completion_flags}};
}

Profile resolve_profile(const std::string& name_or_path) {
  if (auto p = builtin_profile(name_or_path)) return *p;
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("unknown profile '" + name_or_path + "'", "/profile");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("profile is not valid JSON: ") + e.what(), "/profile");
  }
  return profile_from_json(j);
}

}  // namespace paycheck
