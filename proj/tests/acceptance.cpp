// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// run size is pinned here. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "paycheck/adam.hpp"
#include "paycheck/baselines.hpp"
#include "paycheck/experiment.hpp"
#include "paycheck/plan_io.hpp"
#include "paycheck/report.hpp"
#include "paycheck/trainer.hpp"

namespace fs = std::filesystem;
using namespace paycheck;

namespace {

// ---- pinned settings -------------------------------------------------------
constexpr double kDollarTolerance = 1e-6;
constexpr int kAppendixHorizon = 50;
constexpr int kCrossoverSearchHorizon = 20000;

constexpr int kGradientDraws = 100;
constexpr int kGradientHorizon = 12;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kGradientRelTolerance = 1e-5;
// Denominator floor for the elementwise relative error. Central differences
// at h = 1e-5 on an objective of magnitude ~1e1..1e2 carry ~1e-9 absolute
// roundoff, which as a bare ratio would swamp entries below ~1e-4.
constexpr double kGradientDenominatorFloor = 1e-3;
constexpr double kKinkExclusion = 1e-6;

constexpr int kTrainIterations = 5000;
constexpr int kSeeds = 5;
constexpr int kSeedsRequired = 4;
constexpr int kRetirementMonths = 60;

constexpr int kHistoricalBatch = 4;
constexpr std::uint64_t kHistoricalSeed = 0;

constexpr int kDegeneracyIterations = 50;
constexpr double kBatchGradientTolerance = 1e-12;

constexpr int kOracleDraws = 1000;
constexpr double kOracleRelTolerance = 1e-12;
// ----------------------------------------------------------------------------

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int month_or_never(const std::optional<int>& m) { return m ? *m : INT_MAX; }
std::string month_text(int m) { return m == INT_MAX ? "never" : std::to_string(m); }

// ---- Appendix A ------------------------------------------------------------

void appendix_a() {
  const auto start = std::chrono::steady_clock::now();
  const AppendixAScenario sc = appendix_a_scenario(kAppendixHorizon);
  const Rollout water = simulate(sc.plan, sc.rates, waterfall_policy);
  const Rollout even = simulate(sc.plan, sc.rates, schedule_policy(sc.even_split_schedule));
  const auto w2 = dollars_outstanding(sc.plan, water, 1);
  const auto e1 = dollars_outstanding(sc.plan, even, 0);
  const auto e2 = dollars_outstanding(sc.plan, even, 1);

  double worst = 0.0;
  for (int t = 1; t <= kAppendixHorizon; ++t) worst = std::max(worst, std::abs(w2[t] - 1'000'000.0));
  const double expected_e1[3] = {1000.0, 500.0, 0.0};
  const double expected_e2[3] = {1'000'000.0 / 1.001, 999'500.0, 999'999.5};
  for (int t = 0; t < 3; ++t) {
    worst = std::max(worst, std::abs(e1[t] - expected_e1[t]));
    worst = std::max(worst, std::abs(e2[t] - expected_e2[t]));
  }

  // The first horizon at which the even split's cumulative utility overtakes
  // the waterfall's.
  const AppendixAScenario longer = appendix_a_scenario(kCrossoverSearchHorizon);
  const Rollout lw = simulate(longer.plan, longer.rates, waterfall_policy);
  const Rollout le = simulate(longer.plan, longer.rates, schedule_policy(longer.even_split_schedule));
  long double cw = 0.0L, ce = 0.0L;
  int crossover = -1;
  for (int t = 0; t <= kCrossoverSearchHorizon; ++t) {
    cw += lw.steps[t].utility.total;
    ce += le.steps[t].utility.total;
    if (crossover < 0 && t >= 3 && ce > cw) crossover = t;
  }
  const double secs = seconds_since(start);

  report(worst <= kDollarTolerance && secs < 1.0, "appendix_a_dollar_tables",
         "max |error| = " + fmt(worst) + " dollars (tol " + fmt(kDollarTolerance) + "), " + fmt(secs) + " s");
  report(even.value > water.value, "appendix_a_even_split_beats_waterfall",
         "T=" + std::to_string(kAppendixHorizon) + " even_split " + fmt(even.value) + " vs waterfall " +
             fmt(water.value) + "; even split first overtakes at T=" +
             (crossover < 0 ? std::string(">") + std::to_string(kCrossoverSearchHorizon) : std::to_string(crossover)));
}

// ---- Gradient fidelity -----------------------------------------------------

void gradient_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  PlanConfig plan = table2_plan();
  plan.horizon_months = kGradientHorizon;
  const PolicyArchitecture arch;  // 2x64 tanh
  const RateTrajectory rates = constant_trajectory(plan, kGradientHorizon);
  ad::Tape tape;
  int used = 0, excluded = 0;
  long checked = 0;
  double worst = 0.0;
  std::string worst_at = "-";
  for (int d = 0; d < kGradientDraws; ++d) {
    const PolicyParams params = make_policy(plan, arch, 10'000 + static_cast<std::uint64_t>(d));
    const ValueAndGrad vg = rollout_value_and_grad(params, arch, plan, rates, tape);
    if (vg.min_kink_distance < kKinkExclusion) {
      ++excluded;
      continue;
    }
    ++used;
    PolicyParams probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = probe.data()[i];
      probe.data()[i] = keep + kFiniteDifferenceStep;
      const double up = rollout_value(probe, arch, plan, rates);
      probe.data()[i] = keep - kFiniteDifferenceStep;
      const double down = rollout_value(probe, arch, plan, rates);
      probe.data()[i] = keep;
      const double fd = (up - down) / (2.0 * kFiniteDifferenceStep);
      const double denom = std::max({std::abs(vg.gradient[i]), std::abs(fd), kGradientDenominatorFloor});
      const double rel = std::abs(vg.gradient[i] - fd) / denom;
      ++checked;
      if (rel > worst) {
        worst = rel;
        worst_at = "draw " + std::to_string(d) + " param " + std::to_string(i);
      }
    }
  }
  const double secs = seconds_since(start);
  report(used > 0 && worst < kGradientRelTolerance, "gradient_fidelity",
         std::to_string(used) + " draws (" + std::to_string(excluded) + " excluded near kinks), " +
             std::to_string(checked) + " entries, worst rel error " + fmt(worst) + " at " + worst_at +
             " (tol " + fmt(kGradientRelTolerance) + ", floor " + fmt(kGradientDenominatorFloor) + ")");
  report(secs < 60.0, "gradient_fidelity_runtime", fmt(secs) + " s (budget 60 s)");
}

// ---- Constant-rate profile runs ---------------------------------------------

struct RunSummary {
  std::string profile;
  std::uint64_t seed = 0;
  int credit_card = INT_MAX, student_loan = INT_MAX, mortgage = INT_MAX;
  double retirement60 = 0.0;
  bool complete = false;
  std::string unfinished;
  double initial_v = 0.0, final_v = 0.0, max_v = -1e300;
  double fluctuation = 0.0;
  double seconds = 0.0;
};

RunSummary summarize(const std::string& profile, std::uint64_t seed, const PlanConfig& plan,
                     const Rollout& r) {
  RunSummary s;
  s.profile = profile;
  s.seed = seed;
  s.credit_card = month_or_never(completion_month(plan, r, "credit_card"));
  s.student_loan = month_or_never(completion_month(plan, r, "student_loan"));
  s.mortgage = month_or_never(completion_month(plan, r, "mortgage"));
  s.retirement60 = cumulative_retirement_contribution(plan, r, kRetirementMonths);
  s.complete = all_stock_goals_complete(plan, r);
  for (const auto& g : plan.goals)
    if (is_stock(g.kind) && !completion_month(plan, r, g.id)) s.unfinished += (s.unfinished.empty() ? "" : ",") + g.id;
  s.fluctuation = contribution_fluctuation(plan, r);
  return s;
}

const std::vector<std::string> kProfiles{"home_buyer", "saver", "debtor"};

// runs[p][seed]
std::vector<std::vector<RunSummary>> constant_runs() {
  std::vector<std::vector<RunSummary>> runs(kProfiles.size());
  for (std::size_t p = 0; p < kProfiles.size(); ++p) {
    const PlanConfig plan = apply_profile(table2_plan(), *builtin_profile(kProfiles[p]));
    const RateTrajectory rates = constant_trajectory(plan, plan.horizon_months);
    for (int seed = 0; seed < kSeeds; ++seed) {
      TrainConfig c;
      c.iterations = kTrainIterations;
      c.seed = static_cast<std::uint64_t>(seed);
      const TrainReport rep = train_constant(plan, c);
      const Rollout r = rollout(rep.params, rep.architecture, plan, rates);
      RunSummary s = summarize(kProfiles[p], c.seed, plan, r);
      s.initial_v = rep.objective.front();
      s.final_v = r.value;
      s.max_v = std::max(*std::max_element(rep.objective.begin(), rep.objective.end()), r.value);
      s.seconds = rep.wall_seconds;
      std::printf("  run %-10s seed %d: V0 %s -> V %s; card %s, loan %s, mortgage %s; ret60 %s; %s; %.1f s\n",
                  s.profile.c_str(), seed, fmt(s.initial_v).c_str(), fmt(s.final_v).c_str(),
                  month_text(s.credit_card).c_str(), month_text(s.student_loan).c_str(),
                  month_text(s.mortgage).c_str(), fmt(s.retirement60).c_str(),
                  s.complete ? "all goals complete" : ("unfinished: " + s.unfinished).c_str(), s.seconds);
      std::fflush(stdout);
      runs[p].push_back(s);
    }
  }
  return runs;
}

void profile_ordering(const std::vector<std::vector<RunSummary>>& runs) {
  const auto& hb = runs[0];
  const auto& sv = runs[1];
  const auto& db = runs[2];
  int a = 0, b = 0, c = 0;
  for (int s = 0; s < kSeeds; ++s) {
    a += hb[s].mortgage < sv[s].mortgage && hb[s].mortgage < db[s].mortgage;
    b += db[s].credit_card <= std::min(hb[s].credit_card, sv[s].credit_card) &&
         db[s].student_loan <= std::min(hb[s].student_loan, sv[s].student_loan);
    c += sv[s].retirement60 > hb[s].retirement60 && sv[s].retirement60 > db[s].retirement60;
  }
  const std::string need = " of " + std::to_string(kSeeds) + " seeds (need " + std::to_string(kSeedsRequired) + ")";
  report(a >= kSeedsRequired, "profile_ordering_home_buyer_mortgage_first", std::to_string(a) + need);
  report(b >= kSeedsRequired, "profile_ordering_debtor_debts_earliest", std::to_string(b) + need);
  report(c >= kSeedsRequired, "profile_ordering_saver_retirement_highest", std::to_string(c) + need);
}

void goal_completion(const std::vector<std::vector<RunSummary>>& runs) {
  int complete = 0, total = 0;
  std::string missing;
  for (const auto& per_profile : runs)
    for (const auto& s : per_profile) {
      ++total;
      if (s.complete) {
        ++complete;
      } else {
        missing += " " + s.profile + "/seed" + std::to_string(s.seed) + "(" + s.unfinished + ")";
      }
    }
  report(complete == total, "goal_completion_constant_rates",
         std::to_string(complete) + "/" + std::to_string(total) + " runs complete every stock goal" +
             (missing.empty() ? "" : ";" + missing));
}

void training_improvement(const std::vector<std::vector<RunSummary>>& runs,
                          const std::vector<RunSummary>& historical) {
  int improved = 0, total = 0;
  double highest = -1e300;
  auto visit = [&](const RunSummary& s) {
    ++total;
    improved += s.final_v > s.initial_v;
    highest = std::max(highest, s.max_v);
  };
  for (const auto& per_profile : runs)
    for (const auto& s : per_profile) visit(s);
  for (const auto& s : historical) visit(s);
  report(improved == total && highest <= 0.0, "training_improvement",
         std::to_string(improved) + "/" + std::to_string(total) + " runs end above their iteration-0 V; max V seen " +
             fmt(highest));
}

// ---- Stochastic degeneracy ----------------------------------------------------

void stochastic_degeneracy() {
  const PlanConfig plan = table2_plan();
  TrainConfig c;
  c.iterations = kDegeneracyIterations;
  c.seed = 7;
  std::vector<double> seen_constant, seen_stochastic;
  const TrainReport a = train_constant(plan, c, [&](int, double v) { seen_constant.push_back(v); });
  TrainConfig sc = c;
  sc.mode = TrainMode::kStochasticRates;
  sc.batch_size = 1;
  const TrainReport b = train_stochastic(plan, {constant_trajectory(plan, plan.horizon_months)}, sc,
                                         [&](int, double v) { seen_stochastic.push_back(v); });
  const bool bitwise = seen_constant == seen_stochastic && a.objective == b.objective && a.params == b.params;
  report(bitwise, "stochastic_n1_matches_constant_bitwise",
         std::to_string(kDegeneracyIterations) + " iterations, objective and final parameters " +
             (bitwise ? "identical" : "differ"));

  // n = 2: replay the trainer's loop by hand, checking each batch gradient
  // against the mean of the per-trajectory gradients.
  PlanConfig hplan = table2_plan();
  RateTrajectory t1 = constant_trajectory(hplan, hplan.horizon_months);
  RateTrajectory t2 = t1;
  for (double& r : t2.monthly.at("mortgage")) r *= 2.5;
  for (double& r : t2.monthly.at("retirement")) r *= 0.5;
  TrainConfig fc = c;
  fc.mode = TrainMode::kStochasticRates;
  fc.fixed_batch = true;
  fc.architecture.observe_rates = true;
  const std::vector<RateTrajectory> data{t1, t2};
  const TrainReport trained = train_stochastic(hplan, data, fc);

  PolicyParams params = make_policy(hplan, fc.architecture, fc.seed);
  AdamState adam(params.size(), {fc.learning_rate, fc.beta1, fc.beta2, fc.epsilon});
  ad::Tape tape;
  const RateTrajectory* both[] = {&data[0], &data[1]};
  double worst = 0.0;
  bool replay_matches = true;
  for (int k = 0; k < kDegeneracyIterations; ++k) {
    const ValueAndGrad g1 = rollout_value_and_grad(params, fc.architecture, hplan, data[0], tape);
    const ValueAndGrad g2 = rollout_value_and_grad(params, fc.architecture, hplan, data[1], tape);
    const ValueAndGrad mean = batch_value_and_grad(params, fc.architecture, hplan, both, tape);
    for (std::size_t i = 0; i < params.size(); ++i)
      worst = std::max(worst, std::abs(mean.gradient[i] - 0.5 * (g1.gradient[i] + g2.gradient[i])));
    replay_matches = replay_matches && mean.value == trained.objective[k];
    adam_ascent_step(params.data(), mean.gradient, adam);
  }
  replay_matches = replay_matches && params == trained.params;
  report(worst <= kBatchGradientTolerance && replay_matches, "stochastic_n2_gradient_is_mean",
         "max |batch - mean| = " + fmt(worst) + " over " + std::to_string(kDegeneracyIterations) +
             " iterations (tol " + fmt(kBatchGradientTolerance) + "); trainer replay " +
             (replay_matches ? "identical" : "differs"));
}

// ---- Historical run ---------------------------------------------------------

std::vector<RunSummary> historical_runs(const std::vector<std::vector<RunSummary>>& constant) {
  const auto series = load_rates_dir(fs::path(bundled_data_dir()) / "rates");
  std::vector<RunSummary> out;
  bool all_complete = true, all_more_fluctuation = true;
  std::string detail;
  for (std::size_t p = 0; p < kProfiles.size(); ++p) {
    const PlanConfig plan =
        apply_profile(historical_rates_plan(table2_plan()), *builtin_profile(kProfiles[p]));
    const std::vector<RateTrajectory> dataset = historical_dataset(plan, series);
    TrainConfig c;
    c.iterations = kTrainIterations;
    c.seed = kHistoricalSeed;
    c.mode = TrainMode::kStochasticRates;
    c.batch_size = kHistoricalBatch;
    c.architecture.observe_rates = true;
    const PolicyParams initial = make_policy(plan, c.architecture, c.seed);
    const TrainReport rep = train_stochastic(plan, dataset, c);
    const RateTrajectory eval = evaluation_trajectory(plan, &series);
    const Rollout r = rollout(rep.params, rep.architecture, plan, eval);
    RunSummary s = summarize(kProfiles[p], c.seed, plan, r);
    // Improvement is judged on the mean over every historical window.
    double v0 = 0.0, v1 = 0.0;
    for (const auto& w : dataset) {
      v0 += rollout_value(initial, c.architecture, plan, w);
      v1 += rollout_value(rep.params, rep.architecture, plan, w);
    }
    s.initial_v = v0 / static_cast<double>(dataset.size());
    s.final_v = v1 / static_cast<double>(dataset.size());
    s.max_v = std::max({*std::max_element(rep.objective.begin(), rep.objective.end()), s.final_v, r.value});
    s.seconds = rep.wall_seconds;
    const RunSummary& matching = constant[p][kHistoricalSeed];
    std::printf("  historical %-10s: %zu windows, mean V %s -> %s, 2012 window V %s; card %s, loan %s, mortgage %s; "
                "fluctuation %s vs constant %s; %s; %.1f s\n",
                s.profile.c_str(), dataset.size(), fmt(s.initial_v).c_str(), fmt(s.final_v).c_str(),
                fmt(r.value).c_str(), month_text(s.credit_card).c_str(), month_text(s.student_loan).c_str(),
                month_text(s.mortgage).c_str(), fmt(s.fluctuation).c_str(), fmt(matching.fluctuation).c_str(),
                s.complete ? "all goals complete" : ("unfinished: " + s.unfinished).c_str(), s.seconds);
    std::fflush(stdout);
    all_complete = all_complete && s.complete;
    all_more_fluctuation = all_more_fluctuation && s.fluctuation > matching.fluctuation;
    detail += " " + s.profile + " " + fmt(s.fluctuation) + " vs " + fmt(matching.fluctuation) + ";";
    out.push_back(s);
  }
  std::string unfinished;
  for (const auto& s : out)
    if (!s.complete) unfinished += " " + s.profile + "(" + s.unfinished + ")";
  report(all_complete, "historical_goal_completion",
         unfinished.empty() ? "every profile completes every stock goal in the 2012-01 window"
                            : "unfinished:" + unfinished);
  report(all_more_fluctuation, "historical_fluctuation_exceeds_constant", "historical vs constant:" + detail);
  return out;
}

// ---- Dynamics oracles ---------------------------------------------------------

void dynamics_oracles() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Outputs are fractions of order one, so the error is taken relative to
  // max(1, |oracle|).
  auto rel = [](double got, long double want) {
    return static_cast<double>(std::fabs(static_cast<long double>(got) - want) / std::max(1.0L, std::fabs(want)));
  };
  auto clamp01 = [](long double v) { return std::clamp(v, 0.0L, 1.0L); };
  double worst_debt = 0.0, worst_savings = 0.0, worst_retirement = 0.0;
  for (int i = 0; i < kOracleDraws; ++i) {
    const double x = u(rng), r = 0.03 * u(rng), total = 100.0 + 1e6 * u(rng);
    const double pay = total * 0.3 * u(rng);
    const double income = 1000.0 + 20000.0 * u(rng);
    const double p401 = 0.2 * u(rng), pira = 0.1 * u(rng), prs = 0.3 * u(rng);
    const double match = 500.0 * u(rng);
    const long double X = x, R = r, G = total, P = pay;
    worst_debt = std::max(worst_debt, rel(step_debt(x, r, pay, total).value, clamp01((1.0L + R) * X - P / G)));
    worst_savings = std::max(worst_savings,
                             rel(step_savings(x, r, pay, total).value, clamp01(1.0L - (1.0L + R) * (1.0L - X) - P / G)));
    const long double contrib = match + static_cast<long double>(income) * (static_cast<long double>(p401) + pira + prs);
    worst_retirement = std::max(
        worst_retirement, rel(step_retirement(x, r, income, p401, pira, prs, match, total).value,
                              clamp01(1.0L - (1.0L + R) * (1.0L - X) - contrib / G)));
  }
  const double worst = std::max({worst_debt, worst_savings, worst_retirement});
  report(worst <= kOracleRelTolerance, "dynamics_oracles",
         std::to_string(kOracleDraws) + " draws each; worst rel error debt " + fmt(worst_debt) + ", savings " +
             fmt(worst_savings) + ", retirement " + fmt(worst_retirement) + " (tol " + fmt(kOracleRelTolerance) + ")");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  appendix_a();
  dynamics_oracles();
  stochastic_degeneracy();
  gradient_fidelity();
  const auto runs = constant_runs();
  profile_ordering(runs);
  goal_completion(runs);
  const auto historical = historical_runs(runs);
  training_improvement(runs, historical);
  std::printf("%d criteria failed; total %.0f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
