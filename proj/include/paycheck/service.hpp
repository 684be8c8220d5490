#pragma once

// HTTP+JSON job service: plans are stored, training jobs run on a bounded
// worker pool, and results are polled. Every handler is callable directly so
// the behaviour can be tested without a socket; `register_routes` binds them
// to an httplib server.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "paycheck/experiment.hpp"

namespace httplib {
class Server;
}

namespace paycheck {

struct ServiceConfig {
  std::filesystem::path data_dir;   // plans/ and jobs/ live here
  std::filesystem::path rates_dir;  // optional; needed for series plans
  int max_concurrent_jobs = 1;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

enum class JobStatus { kQueued, kRunning, kDone, kFailed };
const char* to_string(JobStatus status);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // POST /plans: 201 {"id"} or 400 {code, message, path}.
  Response create_plan(const std::string& body);
  // GET /plans/{id}
  Response get_plan(const std::string& plan_id) const;
  // POST /plans/{id}/jobs: 202 {"id", ...}; 404 unknown plan; 409 when an
  // identical job (same plan and training request) is queued or running.
  Response start_job(const std::string& plan_id, const std::string& body);
  // GET /jobs/{id}
  Response get_job(const std::string& job_id) const;
  // GET /jobs/{id}/schedule: 404 unknown; 409 not finished.
  Response get_schedule(const std::string& job_id) const;
  // GET /jobs/{id}/compare: learned vs waterfall vs even split.
  Response get_compare(const std::string& job_id) const;
  // GET /rates/series
  Response list_series() const;

  // Blocks until the job is Done or Failed, or the timeout passes. Returns
  // whether the job finished.
  bool wait(const std::string& job_id, std::chrono::milliseconds timeout) const;

 private:
  struct Job {
    std::string id;
    std::string plan_id;
    TrainConfig train;
    std::string request_key;
    JobStatus status = JobStatus::kQueued;
    int iteration = 0;
    std::string reason;
  };

  void worker_loop();
  void run_job(const std::string& job_id);
  void persist_job(const Job& job) const;
  void load_existing();
  nlohmann::json job_json(const Job& job) const;
  std::filesystem::path job_dir(const std::string& job_id) const;
  Response finished_artifact(const std::string& job_id, const char* file) const;

  ServiceConfig config_;
  std::optional<std::map<std::string, RateSeries>> series_;
  std::string series_error_;

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, PlanConfig> plans_;
  std::map<std::string, Job> jobs_;
  std::deque<std::string> queue_;
  std::uint64_t next_plan_ = 1;
  std::uint64_t next_job_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

void register_routes(httplib::Server& server, Service& service);

// Serves until the process is stopped. `address` is "host:port".
// Returns false if the socket could not be bound.
bool serve(Service& service, const std::string& address);

}  // namespace paycheck
