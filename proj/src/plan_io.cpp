#include "paycheck/plan_io.hpp"

#include <fstream>
#include <set>

#include "paycheck/errors.hpp"

namespace paycheck {

namespace {

using nlohmann::json;

void only_fields(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  if (!j.is_object()) throw ConfigError("expected an object", path.empty() ? "/" : path);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown field", path + "/" + key);
}

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing required field", path + "/" + key);
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("expected a number", path);
  return j.get<double>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("expected a string", path);
  return j.get<std::string>();
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return number(*it, path + "/" + key);
}

RateSource rate_from_json(const json& j, const std::string& path) {
  only_fields(j, {"type", "annual_rate", "series_id"}, path);
  const std::string type = text(field(j, "type", path), path + "/type");
  if (type == "constant")
    return RateSource::constant(number(field(j, "annual_rate", path), path + "/annual_rate"));
  if (type == "series")
    return RateSource::series(text(field(j, "series_id", path), path + "/series_id"));
  throw ConfigError("rate type must be 'constant' or 'series'", path + "/type");
}

json rate_to_json(const RateSource& r) {
  if (r.is_constant()) return {{"type", "constant"}, {"annual_rate", r.annual_rate}};
  return {{"type", "series"}, {"series_id", r.series_id}};
}

const char* convention_name(RateConvention c) {
  switch (c) {
    case RateConvention::kGeometric: return "geometric";
    case RateConvention::kNominalDebt: return "nominal_debt";
    case RateConvention::kPerStep: return "per_step";
  }
  return "geometric";
}

GoalSpec goal_from_json(const json& j, const std::string& path) {
  only_fields(j,
              {"id", "kind", "total_amount", "rate_source", "weight_p", "weight_q", "crossover_h",
               "min_contrib_frac", "max_contrib_frac", "max_contrib_dollars", "match_rate",
               "match_cap_frac"},
              path);
  GoalSpec g;
  g.id = text(field(j, "id", path), path + "/id");
  try {
    g.kind = goal_kind_from_string(text(field(j, "kind", path), path + "/kind"));
  } catch (const ConfigError& e) {
    if (!e.path().empty()) throw;
    throw ConfigError(e.what(), path + "/kind");
  }
  g.total_amount = optional_number(j, "total_amount", path);
  if (j.contains("rate_source")) g.rate_source = rate_from_json(j.at("rate_source"), path + "/rate_source");
  g.weight_p = number(field(j, "weight_p", path), path + "/weight_p");
  g.weight_q = optional_number(j, "weight_q", path);
  g.crossover_h = optional_number(j, "crossover_h", path);
  g.min_contrib_frac = optional_number(j, "min_contrib_frac", path);
  g.max_contrib_frac = optional_number(j, "max_contrib_frac", path);
  g.max_contrib_dollars = optional_number(j, "max_contrib_dollars", path);
  g.match_rate = optional_number(j, "match_rate", path);
  g.match_cap_frac = optional_number(j, "match_cap_frac", path);
  return g;
}

json goal_to_json(const GoalSpec& g) {
  json j{{"id", g.id}, {"kind", to_string(g.kind)}, {"rate_source", rate_to_json(g.rate_source)},
         {"weight_p", g.weight_p}};
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("total_amount", g.total_amount);
  put("weight_q", g.weight_q);
  put("crossover_h", g.crossover_h);
  put("min_contrib_frac", g.min_contrib_frac);
  put("max_contrib_frac", g.max_contrib_frac);
  put("max_contrib_dollars", g.max_contrib_dollars);
  put("match_rate", g.match_rate);
  put("match_cap_frac", g.match_cap_frac);
  return j;
}

}  // namespace

PlanConfig plan_from_json(const json& j) {
  only_fields(j,
              {"initial_income", "horizon_months", "inflation_source", "goals", "rate_convention",
               "debt_can_exceed_principal"},
              "");
  PlanConfig p;
  p.initial_income = number(field(j, "initial_income", ""), "/initial_income");
  const json& horizon = field(j, "horizon_months", "");
  if (!horizon.is_number_integer()) throw ConfigError("expected an integer", "/horizon_months");
  p.horizon_months = horizon.get<int>();
  p.inflation_source = rate_from_json(field(j, "inflation_source", ""), "/inflation_source");
  if (auto it = j.find("rate_convention"); it != j.end()) {
    const std::string name = text(*it, "/rate_convention");
    if (name == "geometric") {
      p.rate_convention = RateConvention::kGeometric;
    } else if (name == "nominal_debt") {
      p.rate_convention = RateConvention::kNominalDebt;
    } else if (name == "per_step") {
      p.rate_convention = RateConvention::kPerStep;
    } else {
      throw ConfigError("unknown rate convention", "/rate_convention");
    }
  }
  if (auto it = j.find("debt_can_exceed_principal"); it != j.end()) {
    if (!it->is_boolean()) throw ConfigError("expected a boolean", "/debt_can_exceed_principal");
    p.debt_can_exceed_principal = it->get<bool>();
  }
  const json& goals = field(j, "goals", "");
  if (!goals.is_array()) throw ConfigError("expected an array", "/goals");
  for (std::size_t i = 0; i < goals.size(); ++i)
    p.goals.push_back(goal_from_json(goals[i], "/goals/" + std::to_string(i)));
  return p;
}

json plan_to_json(const PlanConfig& p) {
  json goals = json::array();
  for (const auto& g : p.goals) goals.push_back(goal_to_json(g));
  return {{"initial_income", p.initial_income},
          {"horizon_months", p.horizon_months},
          {"inflation_source", rate_to_json(p.inflation_source)},
          {"rate_convention", convention_name(p.rate_convention)},
          {"debt_can_exceed_principal", p.debt_can_exceed_principal},
          {"goals", goals}};
}

PlanConfig load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan file is not valid JSON: ") + e.what());
  }
  return plan_from_json(j);
}

Profile profile_from_json(const json& j) {
  only_fields(j, {"name", "weights"}, "");
  Profile p;
  p.name = text(field(j, "name", ""), "/name");
  const json& w = field(j, "weights", "");
  if (!w.is_object()) throw ConfigError("expected an object", "/weights");
  for (const auto& [id, entry] : w.items()) {
    const std::string path = "/weights/" + id;
    only_fields(entry, {"weight_p", "weight_q"}, path);
    p.weights[id] = {optional_number(entry, "weight_p", path), optional_number(entry, "weight_q", path)};
  }
  return p;
}

json profile_to_json(const Profile& p) {
  json w = json::object();
  for (const auto& [id, o] : p.weights) {
    json e = json::object();
    if (o.weight_p) e["weight_p"] = *o.weight_p;
    if (o.weight_q) e["weight_q"] = *o.weight_q;
    w[id] = e;
  }
  return {{"name", p.name}, {"weights", w}};
}

PlanConfig apply_profile(PlanConfig plan, const Profile& profile) {
  for (auto& g : plan.goals) {
    g.weight_p = 1.0;
    if (g.weight_q) g.weight_q = 1.0;
  }
  for (const auto& [id, o] : profile.weights) {
    auto it = std::find_if(plan.goals.begin(), plan.goals.end(),
                           [&](const GoalSpec& g) { return g.id == id; });
    if (it == plan.goals.end())
      throw ConfigError("profile '" + profile.name + "' names unknown goal '" + id + "'",
                        "/weights/" + id);
    if (o.weight_p) it->weight_p = *o.weight_p;
    if (o.weight_q) it->weight_q = *o.weight_q;
  }
  return plan;
}

PlanConfig table2_plan() {
  PlanConfig p;
  p.initial_income = 7500.0;
  p.horizon_months = 120;
  p.inflation_source = RateSource::constant(0.02);

  auto goal = [](const char* id, GoalKind kind, std::optional<double> total, double annual_rate) {
    GoalSpec g;
    g.id = id;
    g.kind = kind;
    g.total_amount = total;
    g.rate_source = RateSource::constant(annual_rate);
    g.weight_p = 1.0;
    return g;
  };
  GoalSpec cc = goal("credit_card", GoalKind::kDebt, 825.0, 0.20);
  GoalSpec sl = goal("student_loan", GoalKind::kDebt, 80'000.0, 0.04);
  GoalSpec mortgage = goal("mortgage", GoalKind::kSavings, 157'000.0, 0.02);
  GoalSpec ef = goal("emergency_fund", GoalKind::kEmergencyFund, 10'800.0, 0.0);
  ef.weight_q = 1.0;
  ef.crossover_h = 9'000.0 / 10'800.0;
  GoalSpec retirement = goal("retirement", GoalKind::kRetirement, 1'000'000.0, 0.10);
  GoalSpec k401 = goal("401k", GoalKind::kContribution401K, std::nullopt, 0.0);
  k401.weight_q = 1.0;
  k401.min_contrib_frac = 0.06;
  k401.max_contrib_frac = 0.13;
  k401.match_rate = 1.0;
  k401.match_cap_frac = 0.06;
  GoalSpec ira = goal("ira", GoalKind::kContributionIRA, std::nullopt, 0.0);
  ira.max_contrib_dollars = 500.0;
  p.goals = {cc, sl, mortgage, ef, retirement, k401, ira};
  return p;
}

PlanConfig historical_rates_plan(PlanConfig plan) {
  for (auto& g : plan.goals) {
    if (g.kind == GoalKind::kSavings) g.rate_source = RateSource::series("tbill");
    if (g.kind == GoalKind::kRetirement) g.rate_source = RateSource::series("sp500");
  }
  plan.inflation_source = RateSource::series("cpi");
  return plan;
}

Profile home_buyer_profile() { return {"home_buyer", {{"mortgage", {20.0, std::nullopt}}}}; }

Profile saver_profile() {
  return {"saver",
          {{"retirement", {20.0, std::nullopt}},
           {"401k", {20.0, 20.0}},
           {"ira", {20.0, std::nullopt}},
           {"emergency_fund", {5.0, 3.0}}}};
}

Profile debtor_profile() {
  return {"debtor",
          {{"credit_card", {20.0, std::nullopt}},
           {"student_loan", {20.0, std::nullopt}},
           {"emergency_fund", {5.0, 3.0}}}};
}

std::optional<Profile> builtin_profile(const std::string& name) {
  if (name == "home_buyer") return home_buyer_profile();
  if (name == "saver") return saver_profile();
  if (name == "debtor") return debtor_profile();
  return std::nullopt;
}

}  // namespace paycheck
