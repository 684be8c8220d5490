#include "paycheck/service.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "paycheck/baselines.hpp"
#include "paycheck/errors.hpp"
#include "paycheck/report.hpp"

namespace paycheck {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(JobStatus status) {
  switch (status) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "failed";
}

namespace {

Response error(int status, const std::string& code, const std::string& message,
               const std::string& path = {}) {
  json body{{"code", code}, {"message", message}};
  if (!path.empty()) body["path"] = path;
  return {status, body};
}

std::optional<JobStatus> status_from_string(const std::string& s) {
  for (JobStatus st : {JobStatus::kQueued, JobStatus::kRunning, JobStatus::kDone, JobStatus::kFailed})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

void write_text(const fs::path& path, const std::string& text) {
  // Write then rename so readers never observe a partial file.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t numeric_suffix(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoull(id.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.max_concurrent_jobs < 1) throw ConfigError("at least one worker is required");
  fs::create_directories(config_.data_dir / "plans");
  fs::create_directories(config_.data_dir / "jobs");
  if (!config_.rates_dir.empty()) {
    try {
      series_ = load_rates_dir(config_.rates_dir);
    } catch (const std::exception& e) {
      series_error_ = e.what();
    }
  }
  load_existing();
  for (int i = 0; i < config_.max_concurrent_jobs; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  changed_.notify_all();
  for (auto& w : workers_) w.join();
}

void Service::load_existing() {
  for (const auto& entry : fs::directory_iterator(config_.data_dir / "plans")) {
    if (entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    plans_[id] = plan_from_json(json::parse(read_text(entry.path())));
    next_plan_ = std::max(next_plan_, numeric_suffix(id) + 1);
  }
  for (const auto& entry : fs::directory_iterator(config_.data_dir / "jobs")) {
    if (entry.path().extension() != ".json") continue;
    const json j = json::parse(read_text(entry.path()));
    Job job;
    job.id = j.at("id").get<std::string>();
    job.plan_id = j.at("plan_id").get<std::string>();
    job.train = train_config_from_json(j.at("train"));
    job.request_key = job.plan_id + train_config_to_json(job.train).dump();
    job.status = status_from_string(j.at("status").get<std::string>()).value_or(JobStatus::kFailed);
    job.iteration = j.value("iteration", 0);
    job.reason = j.value("reason", "");
    if (job.status == JobStatus::kQueued || job.status == JobStatus::kRunning) {
      // The process that owned it is gone.
      job.status = JobStatus::kFailed;
      job.reason = "interrupted by a service restart";
      persist_job(job);
    }
    next_job_ = std::max(next_job_, numeric_suffix(job.id) + 1);
    jobs_[job.id] = std::move(job);
  }
}

fs::path Service::job_dir(const std::string& job_id) const {
  return config_.data_dir / "jobs" / job_id;
}

void Service::persist_job(const Job& job) const {
  json j{{"id", job.id},
         {"plan_id", job.plan_id},
         {"train", train_config_to_json(job.train)},
         {"status", to_string(job.status)},
         {"iteration", job.iteration}};
  if (!job.reason.empty()) j["reason"] = job.reason;
  write_text(config_.data_dir / "jobs" / (job.id + ".json"), j.dump(2) + "\n");
}

json Service::job_json(const Job& job) const {
  json j{{"id", job.id},
         {"plan_id", job.plan_id},
         {"status", to_string(job.status)},
         {"iteration", job.iteration},
         {"iterations", job.train.iterations},
         {"train", train_config_to_json(job.train)}};
  if (job.status == JobStatus::kFailed) j["reason"] = job.reason;
  if (job.status == JobStatus::kDone)
    j["result"] = {{"schedule", "/jobs/" + job.id + "/schedule"},
                   {"compare", "/jobs/" + job.id + "/compare"}};
  return j;
}

Response Service::create_plan(const std::string& body) {
  PlanConfig plan;
  try {
    plan = plan_from_json(json::parse(body));
    validate_plan(plan);
  } catch (const json::exception& e) {
    return error(400, "invalid_json", e.what());
  } catch (const ConfigError& e) {
    return error(400, "invalid_plan", e.message(), e.path());
  }
  std::lock_guard lock(mutex_);
  const std::string id = "plan-" + std::to_string(next_plan_++);
  write_text(config_.data_dir / "plans" / (id + ".json"), plan_to_json(plan).dump(2) + "\n");
  plans_[id] = plan;
  return {201, {{"id", id}}};
}

Response Service::get_plan(const std::string& plan_id) const {
  std::lock_guard lock(mutex_);
  auto it = plans_.find(plan_id);
  if (it == plans_.end()) return error(404, "not_found", "no plan '" + plan_id + "'");
  return {200, {{"id", plan_id}, {"plan", plan_to_json(it->second)}}};
}

Response Service::start_job(const std::string& plan_id, const std::string& body) {
  TrainConfig train;
  try {
    train = train_config_from_json(body.empty() ? json::object() : json::parse(body));
  } catch (const json::exception& e) {
    return error(400, "invalid_json", e.what());
  } catch (const ConfigError& e) {
    return error(400, "invalid_train_config", e.message(), e.path());
  }
  std::lock_guard lock(mutex_);
  auto plan = plans_.find(plan_id);
  if (plan == plans_.end()) return error(404, "not_found", "no plan '" + plan_id + "'");
  if (uses_series(plan->second)) {
    if (train.mode != TrainMode::kStochasticRates)
      return error(400, "invalid_train_config",
                   "plans with rate series train in stochastic mode", "/mode");
    if (!series_)
      return error(400, "no_rate_data",
                   series_error_.empty() ? "the service has no rate data" : series_error_);
  }
  const std::string key = plan_id + train_config_to_json(train).dump();
  for (const auto& [id, job] : jobs_)
    if (job.request_key == key &&
        (job.status == JobStatus::kQueued || job.status == JobStatus::kRunning))
      return error(409, "conflict", "an identical job is already in progress: " + id);

  Job job;
  job.id = "job-" + std::to_string(next_job_++);
  job.plan_id = plan_id;
  job.train = train;
  job.request_key = key;
  persist_job(job);
  Response r{202, job_json(job)};
  queue_.push_back(job.id);
  jobs_[job.id] = std::move(job);
  changed_.notify_all();
  return r;
}

Response Service::get_job(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return error(404, "not_found", "no job '" + job_id + "'");
  return {200, job_json(it->second)};
}

Response Service::finished_artifact(const std::string& job_id, const char* file) const {
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return error(404, "not_found", "no job '" + job_id + "'");
    if (it->second.status == JobStatus::kFailed)
      return error(409, "job_failed", "job failed: " + it->second.reason);
    if (it->second.status != JobStatus::kDone)
      return error(409, "not_finished", std::string("job is ") + to_string(it->second.status));
  }
  return {200, json::parse(read_text(job_dir(job_id) / file))};
}

Response Service::get_schedule(const std::string& job_id) const {
  return finished_artifact(job_id, "schedule.json");
}

Response Service::get_compare(const std::string& job_id) const {
  return finished_artifact(job_id, "compare.json");
}

Response Service::list_series() const {
  json list = json::array();
  if (series_) {
    for (const auto& [id, s] : *series_)
      list.push_back({{"id", id},
                      {"first", s.first().str()},
                      {"last", s.last().str()},
                      {"months", s.observations.size()},
                      {"source", s.source}});
  }
  return {200, {{"series", list}}};
}

bool Service::wait(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] {
    auto it = jobs_.find(job_id);
    return it == jobs_.end() || it->second.status == JobStatus::kDone ||
           it->second.status == JobStatus::kFailed;
  });
}

void Service::worker_loop() {
  for (;;) {
    std::string job_id;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job_id = queue_.front();
      queue_.pop_front();
    }
    run_job(job_id);
  }
}

void Service::run_job(const std::string& job_id) {
  PlanConfig plan;
  TrainConfig train;
  {
    std::lock_guard lock(mutex_);
    Job& job = jobs_.at(job_id);
    job.status = JobStatus::kRunning;
    persist_job(job);
    plan = plans_.at(job.plan_id);
    train = job.train;
  }
  changed_.notify_all();

  auto finish = [&](JobStatus status, const std::string& reason) {
    {
      std::lock_guard lock(mutex_);
      Job& job = jobs_.at(job_id);
      job.status = status;
      job.reason = reason;
      if (status == JobStatus::kDone) job.iteration = job.train.iterations;
      persist_job(job);
    }
    changed_.notify_all();
  };

  try {
    // Training state lives on this thread only; the observer just publishes
    // the iteration counter.
    auto observer = [&](int iteration, double) {
      std::lock_guard lock(mutex_);
      jobs_.at(job_id).iteration = iteration;
    };
    const TrainingRun run =
        run_training(plan, train, series_ ? &*series_ : nullptr, observer);

    const Rollout waterfall = simulate(plan, run.evaluation, waterfall_policy);
    const Rollout even = simulate(plan, run.evaluation, even_split_policy);
    const json compare{
        {"total_utility",
         {{"learned", run.rollout.value}, {"waterfall", waterfall.value}, {"even_split", even.value}}},
        {"schedules",
         {{"learned", schedule_json(plan, run.rollout)},
          {"waterfall", schedule_json(plan, waterfall)},
          {"even_split", schedule_json(plan, even)}}}};

    const fs::path dir = job_dir(job_id);
    fs::create_directories(dir);
    save_checkpoint(run.report.params, run.report.architecture, dir / "policy.ckpt");
    write_text(dir / "report.json", train_report_json(run.report).dump(2) + "\n");
    write_text(dir / "schedule.json", schedule_json(plan, run.rollout).dump() + "\n");
    write_text(dir / "compare.json", compare.dump() + "\n");
    finish(JobStatus::kDone, {});
  } catch (const std::exception& e) {
    finish(JobStatus::kFailed, e.what());
  }
}

void register_routes(httplib::Server& server, Service& service) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/plans", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.create_plan(req.body));
  });
  server.Get(R"(/plans/([^/]+))", [&service, reply](const httplib::Request& req,
                                                    httplib::Response& res) {
    reply(res, service.get_plan(req.matches[1]));
  });
  server.Post(R"(/plans/([^/]+)/jobs)", [&service, reply](const httplib::Request& req,
                                                          httplib::Response& res) {
    reply(res, service.start_job(req.matches[1], req.body));
  });
  server.Get(R"(/jobs/([^/]+))", [&service, reply](const httplib::Request& req,
                                                   httplib::Response& res) {
    reply(res, service.get_job(req.matches[1]));
  });
  server.Get(R"(/jobs/([^/]+)/schedule)", [&service, reply](const httplib::Request& req,
                                                            httplib::Response& res) {
    reply(res, service.get_schedule(req.matches[1]));
  });
  server.Get(R"(/jobs/([^/]+)/compare)", [&service, reply](const httplib::Request& req,
                                                           httplib::Response& res) {
    reply(res, service.get_compare(req.matches[1]));
  });
  server.Get("/rates/series", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.list_series());
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"code", "not_found"}, {"message", "no such route"}}.dump(),
                    "application/json");
  });
}

bool serve(Service& service, const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw ConfigError("address must be host:port", "/serve-addr");
  const std::string host = address.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("port must be a number", "/serve-addr");
  }
  httplib::Server server;
  register_routes(server, service);
  return server.listen(host, port);
}

}  // namespace paycheck
