// paycheck: train, evaluate and compare allocation policies, or run the
// HTTP service.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "paycheck/baselines.hpp"
#include "paycheck/errors.hpp"
#include "paycheck/experiment.hpp"
#include "paycheck/report.hpp"
#include "paycheck/service.hpp"

namespace fs = std::filesystem;
using namespace paycheck;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

struct Options {
  std::string plan;
  std::string profile;
  std::string mode = "constant";
  std::string rates_dir;
  int iterations = TrainConfig{}.iterations;
  std::uint64_t seed = 0;
  double lr = TrainConfig{}.learning_rate;
  int batch = 8;
  std::string out;
  std::string checkpoint;
  std::string serve_addr = "127.0.0.1:8080";
};

// --plan takes a file path or the name of a bundled plan ("table2",
// "table2_historical", "appendix_a").
PlanConfig resolve_plan(const Options& o) {
  if (o.plan.empty()) throw ConfigError("--plan is required", "--plan");
  PlanConfig plan;
  if (o.plan == "appendix_a") {
    plan = appendix_a_scenario().plan;
  } else if (fs::exists(o.plan)) {
    plan = load_plan(o.plan);
  } else {
    const fs::path bundled = fs::path(bundled_data_dir()) / "plans" / (o.plan + ".json");
    if (!fs::exists(bundled)) throw ConfigError("no plan file or bundled plan '" + o.plan + "'", "--plan");
    plan = load_plan(bundled);
  }
  if (!o.profile.empty()) plan = apply_profile(std::move(plan), resolve_profile(o.profile));
  check_engine_plan(plan);
  return plan;
}

std::optional<std::map<std::string, RateSeries>> resolve_rates(const Options& o,
                                                               const PlanConfig& plan) {
  if (o.rates_dir.empty()) {
    if (uses_series(plan))
      throw ConfigError("the plan uses rate series; pass the dataset with --rates-dir",
                        "--rates-dir");
    return std::nullopt;
  }
  if (!fs::is_directory(o.rates_dir))
    throw ConfigError("rate directory '" + o.rates_dir + "' does not exist", "--rates-dir");
  return load_rates_dir(o.rates_dir);
}

TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.iterations = o.iterations;
  c.seed = o.seed;
  c.learning_rate = o.lr;
  c.batch_size = o.batch;
  if (o.mode == "stochastic") {
    c.mode = TrainMode::kStochasticRates;
    c.architecture.observe_rates = true;
  }
  validate_train_config(c);
  return c;
}

Checkpoint resolve_checkpoint(const Options& o, const PlanConfig& plan) {
  if (o.checkpoint.empty()) throw ConfigError("--checkpoint is required", "--checkpoint");
  Checkpoint c;
  try {
    c = load_checkpoint(o.checkpoint);
  } catch (const DataError& e) {
    throw ConfigError(e.what(), "--checkpoint");
  }
  const int expected = feature_count(PlanLayout(plan), c.architecture);
  if (c.params.input_dim() != expected ||
      c.params.output_dim() != static_cast<int>(plan.slot_count()))
    throw ConfigError("checkpoint architecture does not match the plan (" +
                          std::to_string(c.params.input_dim()) + " inputs / " +
                          std::to_string(c.params.output_dim()) + " outputs, plan needs " +
                          std::to_string(expected) + " / " + std::to_string(plan.slot_count()) +
                          ")",
                      "--checkpoint");
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_train(const Options& o) {
  if (o.out.empty()) throw ConfigError("--out is required", "--out");
  const PlanConfig plan = resolve_plan(o);
  const TrainConfig config = train_config(o);
  const auto series = resolve_rates(o, plan);
  if (config.mode == TrainMode::kStochasticRates && uses_series(plan) && !series)
    throw ConfigError("stochastic mode needs --rates-dir", "--rates-dir");
  const TrainingRun run = run_training(plan, config, series ? &*series : nullptr);

  const fs::path out = o.out;
  fs::create_directories(out);
  save_checkpoint(run.report.params, run.report.architecture, out / "policy.ckpt");
  nlohmann::json report = train_report_json(run.report);
  report["train"] = train_config_to_json(config);
  report["plan"] = plan_to_json(plan);
  report["evaluation"] = {{"total_utility", run.rollout.value},
                          {"start", run.evaluation.start ? run.evaluation.start->str() : ""}};
  write_file(out / "report.json", report.dump(2) + "\n");
  std::cout << "final V = " << format_number(run.rollout.value) << "\n";
  return kOk;
}

int cmd_evaluate(const Options& o) {
  const PlanConfig plan = resolve_plan(o);
  const Checkpoint c = resolve_checkpoint(o, plan);
  const auto series = resolve_rates(o, plan);
  const RateTrajectory rates = evaluation_trajectory(plan, series ? &*series : nullptr);
  const std::string csv = schedule_csv(make_schedule(plan, rollout(c.params, c.architecture, plan, rates)));
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    write_file(o.out, csv);
  }
  return kOk;
}

int cmd_compare(const Options& o) {
  const PlanConfig plan = resolve_plan(o);
  const Checkpoint c = resolve_checkpoint(o, plan);
  const auto series = resolve_rates(o, plan);
  const RateTrajectory rates = evaluation_trajectory(plan, series ? &*series : nullptr);
  const Comparison cmp = compare_policies(plan, rates, c.params, c.architecture);
  const std::string text = comparison_json(cmp).dump(2) + "\n";
  if (!o.out.empty()) write_file(o.out, text);
  std::cout << "learned    " << format_number(cmp.learned) << "\n"
            << "waterfall  " << format_number(cmp.waterfall) << "\n"
            << "even_split " << format_number(cmp.even_split) << "\n";
  return kOk;
}

int cmd_serve(const Options& o) {
  ServiceConfig sc;
  sc.data_dir = o.out.empty() ? fs::path("paycheck-data") : fs::path(o.out);
  sc.rates_dir = o.rates_dir.empty() ? fs::path(bundled_data_dir()) / "rates" : fs::path(o.rates_dir);
  Service service(sc);
  std::cerr << "listening on " << o.serve_addr << "\n";
  if (!serve(service, o.serve_addr)) {
    std::cerr << "error: cannot listen on " << o.serve_addr << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paycheck optimizer: learn how to split each month's income across goals"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--plan", o.plan, "Plan JSON file or bundled plan name");
    cmd->add_option("--profile", o.profile, "Preference profile: home_buyer, saver, debtor or a JSON file");
    cmd->add_option("--rates-dir", o.rates_dir, "Directory of rate series descriptors and CSVs");
  };
  CLI::App* train = app.add_subcommand("train", "Train a policy; writes report.json and policy.ckpt");
  common(train);
  train->add_option("--mode", o.mode, "constant or stochastic")
      ->check(CLI::IsMember({"constant", "stochastic"}));
  train->add_option("--iterations", o.iterations, "Optimizer iterations");
  train->add_option("--seed", o.seed, "Initialization and sampling seed");
  train->add_option("--lr", o.lr, "ADAM learning rate");
  train->add_option("--batch", o.batch, "Trajectories per iteration in stochastic mode");
  train->add_option("--out", o.out, "Output directory");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Write the per-month schedule CSV of a checkpoint");
  common(evaluate);
  evaluate->add_option("--checkpoint", o.checkpoint, "Policy checkpoint");
  evaluate->add_option("--out", o.out, "CSV path (stdout if omitted)");

  CLI::App* compare = app.add_subcommand("compare", "Total utility of a checkpoint vs waterfall and even split");
  common(compare);
  compare->add_option("--checkpoint", o.checkpoint, "Policy checkpoint");
  compare->add_option("--out", o.out, "Optional JSON output path");

  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--serve-addr", o.serve_addr, "host:port to listen on");
  serve_cmd->add_option("--rates-dir", o.rates_dir, "Rate data directory (bundled fixtures by default)");
  serve_cmd->add_option("--out", o.out, "Directory for stored plans, jobs and results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (argc <= 1) std::cout << app.help();
    return kUsageError;
  }

  try {
    if (*train) return cmd_train(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*compare) return cmd_compare(o);
    if (*serve_cmd) return cmd_serve(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}
