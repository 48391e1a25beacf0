// Copyright 2026 The Chaoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chaoscope/service.hpp"

#include <sys/socket.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "chaoscope/error.hpp"
#include "chaoscope/projection.hpp"
#include "chaoscope/store.hpp"
#include "chaoscope/workflow.hpp"
#include "json_io.hpp"

namespace chaoscope {
namespace {

enum class JobState { kQueued, kRunning, kDone, kFailed, kCanceled };

const char* state_name(JobState s) {
  switch (s) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
    case JobState::kCanceled: return "canceled";
  }
  return "unknown";
}

struct Job {
  std::string id;
  std::string kind;
  Json request;
  std::optional<PreparedRun> prepared;
  JobState state = JobState::kQueued;
  double progress = 0.0;
  std::string run_id;
  std::string error;
  std::atomic<bool> cancel{false};
};

int http_status(Errc code) {
  switch (code) {
    case Errc::kNotFound: return 404;
    case Errc::kDuplicate: return 409;
    case Errc::kIntegrity:
    case Errc::kIo: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, Json{{"error", message}, {"code", code}});
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, http_status(e.code()), std::string(errc_name(e.code())), e.what());
}

Json summary_json(const RunSummary& s) {
  return Json{{"run_id", s.run_id},
              {"created_at", s.created_at},
              {"system_name", s.system_name},
              {"kind", s.kind}};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = text.find(',', pos);
    out.push_back(text.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) return out;
    pos = end + 1;
  }
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  Store store;
  httplib::Server server;
  int bound_port = -1;
  std::thread server_thread;

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::shared_ptr<Job>> queue;
  bool shutting_down = false;
  std::thread executor;
  std::atomic<unsigned long> job_counter{0};

  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), store(config.store_root) {
    if (config.workers < 1) throw Error(Errc::kValidation, "workers must be at least 1");
    routes();
    executor = std::thread([this] { run_executor(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(mu);
      shutting_down = true;
      for (auto& [_, job] : jobs) job->cancel = true;
    }
    cv.notify_all();
    server.stop();
    if (server_thread.joinable()) server_thread.join();
    if (executor.joinable()) executor.join();
  }

  Json job_json(const Job& job) const {
    Json j{{"job_id", job.id},
           {"kind", job.kind},
           {"state", state_name(job.state)},
           {"progress", job.progress},
           {"request", job.request}};
    if (!job.run_id.empty()) j["run_id"] = job.run_id;
    if (!job.error.empty()) j["error"] = job.error;
    if (job.cancel && (job.state == JobState::kQueued || job.state == JobState::kRunning)) {
      j["cancel_requested"] = true;
    }
    return j;
  }

  void run_executor() {
    while (true) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return shutting_down || !queue.empty(); });
        if (shutting_down) return;
        job = queue.front();
        queue.pop_front();
        if (job->state != JobState::kQueued) continue;
        job->state = JobState::kRunning;
      }
      RunControl control;
      control.workers = config.workers;
      control.cancel = &job->cancel;
      control.progress = [this, job](std::size_t done, std::size_t total) {
        std::lock_guard lock(mu);
        job->progress = total ? static_cast<double>(done) / static_cast<double>(total) : 1.0;
      };
      try {
        WorkflowResult r = execute(*job->prepared, store, control);
        std::lock_guard lock(mu);
        job->run_id = r.run_id;
        job->progress = 1.0;
        job->state = JobState::kDone;
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        if (e.code() == Errc::kCanceled) {
          job->state = JobState::kCanceled;
        } else {
          job->state = JobState::kFailed;
          job->error = e.what();
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        job->state = JobState::kFailed;
        job->error = e.what();
      }
      std::lock_guard lock(mu);
      job->prepared.reset();
    }
  }

  void routes() {
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json{{"status", "ok"}});
    });

    server.Get("/api/runs", [this](const httplib::Request&, httplib::Response& res) {
      Json out = Json::array();
      for (const auto& s : store.list_runs()) out.push_back(summary_json(s));
      send_json(res, 200, out);
    });

    server.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        StoredRun run = store.load_run(req.matches[1]);
        Json results = Json::object();
        if (auto b = run.boxcount()) results["boxcount"] = to_json(*b);
        if (auto f = run.fdim()) results["fdim"] = to_json(*f);
        send_json(res, 200, Json{{"manifest", to_json(run.manifest())}, {"results", results}});
      } catch (const Error& e) {
        send_error(res, e);
      }
    });

    server.Get(R"(/api/runs/([^/]+)/trajectories)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 try {
                   send_json(res, 200, trajectories(req));
                 } catch (const Error& e) {
                   send_error(res, e);
                 }
               });

    server.Post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      auto job = std::make_shared<Job>();
      try {
        RunRequest request = request_from_json_text(req.body);
        job->prepared = prepare(request);
        job->kind = request.kind;
        job->request = Json::parse(request_to_json_text(request));
      } catch (const Error& e) {
        send_error(res, 400, std::string(errc_name(e.code())), e.what());
        return;
      }
      {
        std::lock_guard lock(mu);
        if (shutting_down) {
          send_error(res, 503, "unavailable", "service is shutting down");
          return;
        }
        job->id = "job-" + std::to_string(++job_counter);
        jobs[job->id] = job;
        queue.push_back(job);
        send_json(res, 202, job_json(*job));
      }
      cv.notify_one();
    });

    server.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = jobs.find(req.matches[1]);
      if (it == jobs.end()) {
        send_error(res, 404, "not-found", "no such job: " + std::string(req.matches[1]));
        return;
      }
      send_json(res, 200, job_json(*it->second));
    });

    server.Delete(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = jobs.find(req.matches[1]);
      if (it == jobs.end()) {
        send_error(res, 404, "not-found", "no such job: " + std::string(req.matches[1]));
        return;
      }
      Job& job = *it->second;
      if (job.state != JobState::kQueued && job.state != JobState::kRunning) {
        send_error(res, 409, "conflict",
                   "job " + job.id + " already " + state_name(job.state));
        return;
      }
      job.cancel = true;
      if (job.state == JobState::kQueued) {
        job.state = JobState::kCanceled;
        job.prepared.reset();
      }
      send_json(res, 200, job_json(job));
    });
  }

  Json trajectories(const httplib::Request& req) {
    StoredRun run = store.load_run(req.matches[1]);
    const RunManifest& m = run.manifest();
    std::vector<std::string> vars;
    for (const auto& a : m.region.ranges()) vars.push_back(a.var);

    std::vector<std::string> axes =
        req.has_param("vars") ? split_list(req.get_param_value("vars"))
                              : std::vector<std::string>(vars.begin(), vars.begin() + std::min<std::size_t>(2, vars.size()));
    if (axes.size() != 2) throw Error(Errc::kValidation, "vars must name exactly two variables");
    std::size_t idx[2];
    for (int a = 0; a < 2; ++a) {
      auto it = std::find(vars.begin(), vars.end(), axes[a]);
      if (it == vars.end()) throw Error(Errc::kValidation, "unknown variable '" + axes[a] + "'");
      idx[a] = static_cast<std::size_t>(it - vars.begin());
    }
    std::optional<Window> window;
    if (req.has_param("window")) window = parse_window(req.get_param_value("window"));
    std::optional<std::size_t> limit;
    if (req.has_param("decimate")) {
      const std::string v = req.get_param_value("decimate");
      char* stop = nullptr;
      long long k = std::strtoll(v.c_str(), &stop, 10);
      if (v.empty() || *stop != '\0' || k < 1) {
        throw Error(Errc::kValidation, "decimate must be a positive integer");
      }
      limit = static_cast<std::size_t>(k);
    }

    std::optional<SystemDef> sys;
    std::optional<Predicate> pred;
    if (!m.predicate_source.empty()) {
      sys = parse_system(m.system_source, m.system_name);
      pred = parse_predicate(m.predicate_source, *sys);
    }

    Json orbits = Json::array();
    for (std::size_t i = 0; i < run.trajectory_count(); ++i) {
      Trajectory t = run.trajectory(i);
      Segments segs = project(t, idx[0], idx[1], window);
      if (limit) segs = decimate(segs, *limit);
      Json jsegs = Json::array();
      for (const auto& s : segs) {
        Json pts = Json::array();
        for (const auto& p : s) pts.push_back({p.t, p.x, p.y});
        jsegs.push_back(std::move(pts));
      }
      Json label = nullptr;
      if (pred) label = classification_name(classify(*sys, t, *pred).cls);
      orbits.push_back({{"ic_index", t.ic_index},
                        {"status", t.completed() ? "completed" : "failed"},
                        {"class", label},
                        {"segments", std::move(jsegs)}});
    }
    Json out{{"run_id", m.run_id}, {"vars", axes}, {"orbits", std::move(orbits)}};
    out["window"] = window ? Json{window->xlo, window->xhi, window->ylo, window->yhi} : Json(nullptr);
    out["decimate"] = limit ? Json(*limit) : Json(nullptr);
    return out;
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

void Service::bind() {
  auto& s = *impl_;
  if (s.config.port == 0) {
    s.bound_port = s.server.bind_to_any_port(s.config.host);
  } else if (s.server.bind_to_port(s.config.host, s.config.port)) {
    s.bound_port = s.config.port;
  }
  if (s.bound_port <= 0) {
    s.bound_port = -1;
    throw Error(Errc::kBind, "cannot bind " + s.config.host + ":" + std::to_string(s.config.port));
  }
}

int Service::port() const { return impl_->bound_port; }

void Service::serve() {
  if (impl_->bound_port < 0) throw Error(Errc::kBind, "service is not bound");
  impl_->server.listen_after_bind();
}

void Service::start() {
  bind();
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

}  // namespace chaoscope
