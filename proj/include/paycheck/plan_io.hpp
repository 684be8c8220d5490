#pragma once

// JSON encoding of plans and preference profiles, plus the bundled presets.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "paycheck/goals.hpp"

namespace paycheck {

// Strict decoding: unknown fields and wrong types raise ConfigError with the
// JSON path of the offending field. Does not run validate_plan.
PlanConfig plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const PlanConfig& plan);
PlanConfig load_plan(const std::filesystem::path& path);

struct WeightOverride {
  std::optional<double> weight_p;
  std::optional<double> weight_q;
};

// Preference weights for one kind of user. Applying a profile first resets
// every p (and every q that exists) to 1, then applies the overrides.
struct Profile {
  std::string name;
  std::map<std::string, WeightOverride> weights;  // goal id -> override
};

Profile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const Profile& profile);
PlanConfig apply_profile(PlanConfig plan, const Profile& profile);

// The reference user inputs: $7,500/month, 2% inflation, ten-year horizon,
// credit card, student loan, mortgage down payment, two-tier emergency fund,
// retirement, 401K and IRA.
PlanConfig table2_plan();

// table2_plan() with the mortgage savings rate on "tbill", the retirement rate
// on "sp500" and inflation on "cpi".
PlanConfig historical_rates_plan(PlanConfig plan);

Profile home_buyer_profile();
Profile saver_profile();
Profile debtor_profile();
// "home_buyer", "saver" or "debtor"; std::nullopt otherwise.
std::optional<Profile> builtin_profile(const std::string& name);

}  // namespace paycheck
