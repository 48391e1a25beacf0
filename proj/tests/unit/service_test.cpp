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

#include <chrono>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "chaoscope/error.hpp"
#include "chaoscope/projection.hpp"
#include "chaoscope/service.hpp"
#include "chaoscope/store.hpp"
#include "chaoscope/workflow.hpp"
#include "test_util.hpp"

namespace chaoscope {
namespace {

using Json = nlohmann::json;
using testing::TempDir;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig cfg;
    cfg.store_root = dir_.path();
    cfg.port = 0;
    cfg.workers = 2;
    service_ = std::make_unique<Service>(cfg);
    service_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", service_->port());
    client_->set_read_timeout(60, 0);
  }

  void TearDown() override {
    service_->stop();
    service_.reset();
  }

  Json region2_payload(const std::string& kind) const {
    return Json{{"kind", kind},
                {"system", testing::read_text(testing::system_path("lorenz.sys"))},
                {"system_name", "lorenz"},
                {"params", {{"R", 20}}},
                {"region",
                 {{"ranges",
                   {{{"var", "x"}, {"lo", -1.001}, {"hi", 1.001}},
                    {{"var", "y"}, {"lo", -1.001}, {"hi", 1.001}},
                    {{"var", "z"}, {"lo", 21.999}, {"hi", 22.001}}}}}},
                {"predicate", "x < 0"},
                {"t_range", {0, 16}},
                {"t_calc_step", 0.01},
                {"t_plot_step", 0.05},
                {"number_ic", 8},
                {"seed", 1}};
  }

  Json wait_for(const std::string& job_id) {
    for (int i = 0; i < 600; ++i) {
      auto res = client_->Get("/api/jobs/" + job_id);
      EXPECT_TRUE(res);
      Json j = Json::parse(res->body);
      std::string state = j["state"];
      if (state != "queued" && state != "running") return j;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ADD_FAILURE() << "job did not finish";
    return {};
  }

  std::string submit_and_wait(const Json& payload) {
    auto res = client_->Post("/api/jobs", payload.dump(), "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 202) << res->body;
    Json j = wait_for(Json::parse(res->body)["job_id"]);
    EXPECT_EQ(j["state"], "done") << j.dump();
    return j.value("run_id", "");
  }

  TempDir dir_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, HealthAndCors) {
  auto res = client_->Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["status"], "ok");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto pre = client_->Options("/api/jobs");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST_F(ServiceTest, SolveJobRoundTripsPayload) {
  Json payload = region2_payload("solve");
  std::string run_id = submit_and_wait(payload);
  ASSERT_FALSE(run_id.empty());

  auto res = client_->Get("/api/runs/" + run_id);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  Json body = Json::parse(res->body);
  RunManifest m = manifest_from_json_text(body["manifest"].dump());
  EXPECT_EQ(m.run_id, run_id);
  EXPECT_EQ(m.trajectories.size(), 8u);

  // The stored manifest describes the same run as the payload.
  PreparedRun want = prepare(request_from_json_text(payload.dump()));
  PreparedRun got = prepare(request_from_manifest(m));
  EXPECT_TRUE(structurally_equal(want.system, got.system));
  EXPECT_EQ(Json::parse(to_json_text(got.region)), payload["region"]);
  EXPECT_EQ(got.cfg.h, want.cfg.h);
  EXPECT_EQ(got.cfg.t1, want.cfg.t1);
  EXPECT_EQ(got.cfg.sample_stride, want.cfg.sample_stride);
  EXPECT_EQ(got.request.seed, want.request.seed);
  EXPECT_EQ(got.request.number_ic, want.request.number_ic);
  EXPECT_EQ(got.request.predicate, want.request.predicate);

  // Same result as running the workflow directly.
  TempDir other;
  Store direct(other.path());
  std::string id = execute(want, direct).run_id;
  Store served(dir_.path());
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(direct.load_run(id).read_file("ic_" + std::to_string(i) + ".csv"),
              served.load_run(run_id).read_file("ic_" + std::to_string(i) + ".csv"));
  }

  auto list = client_->Get("/api/runs");
  ASSERT_TRUE(list);
  Json runs = Json::parse(list->body);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0]["run_id"], run_id);
  EXPECT_EQ(runs[0]["system_name"], "lorenz");
}

TEST_F(ServiceTest, TrajectoryWindowMatchesStoredSamples) {
  Json payload = region2_payload("solve");
  payload["params"]["R"] = 28;
  payload["region"] = "x=-0.37717..-0.37716, y=0.48685..0.48686, z=-0.29894..-0.29893";
  payload["predicate"] = "x < -4 and x > -11";
  payload["t_range"] = {0, 20};
  payload["t_calc_step"] = 0.005;
  payload["t_plot_step"] = 0.01;
  std::string run_id = submit_and_wait(payload);

  auto res = client_->Get("/api/runs/" + run_id + "/trajectories?vars=x,z&window=-10,0,20,30");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  Json body = Json::parse(res->body);
  EXPECT_EQ(body["vars"], Json({"x", "z"}));
  ASSERT_EQ(body["orbits"].size(), 8u);

  StoredRun run = Store(dir_.path()).load_run(run_id);
  std::size_t total = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    const Json& orbit = body["orbits"][i];
    Trajectory t = run.trajectory(i);
    std::vector<std::array<double, 3>> expected;
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      double x = t.states[k][0], z = t.states[k][2];
      if (x >= -10 && x <= 0 && z >= 20 && z <= 30) expected.push_back({t.times[k], x, z});
    }
    std::vector<std::array<double, 3>> got;
    for (const auto& seg : orbit["segments"]) {
      for (const auto& p : seg) got.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    EXPECT_EQ(got, expected);
    total += got.size();
    std::string cls = orbit["class"];
    EXPECT_TRUE(cls == "true" || cls == "false");
  }
  EXPECT_GT(total, 0u);

  auto dec = client_->Get("/api/runs/" + run_id + "/trajectories?vars=x,z&window=-10,0,20,30&decimate=50");
  ASSERT_TRUE(dec);
  Json dbody = Json::parse(dec->body);
  for (std::size_t i = 0; i < 8; ++i) {
    const Json& full = body["orbits"][i]["segments"];
    const Json& thin = dbody["orbits"][i]["segments"];
    ASSERT_EQ(full.size(), thin.size());
    std::size_t n = 0;
    for (std::size_t s = 0; s < full.size(); ++s) {
      EXPECT_EQ(thin[s].front(), full[s].front());
      EXPECT_EQ(thin[s].back(), full[s].back());
      n += thin[s].size();
    }
    if (2 * full.size() <= 50) EXPECT_LE(n, 50u);
  }

  auto bad = client_->Get("/api/runs/" + run_id + "/trajectories?vars=x,q");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  bad = client_->Get("/api/runs/" + run_id + "/trajectories?window=1,0,0,1");
  EXPECT_EQ(bad->status, 400);
  bad = client_->Get("/api/runs/" + run_id + "/trajectories?decimate=0");
  EXPECT_EQ(bad->status, 400);
}

TEST_F(ServiceTest, BoxcountJobStoresResult) {
  Json payload = region2_payload("boxcount");
  payload.erase("t_range");
  payload.erase("t_plot_step");
  payload["system"] = testing::read_text(testing::system_path("plane.sys"));
  payload.erase("params");
  payload["region"] = "x=-1..1, y=-1..1, z=-1..1";
  payload["final_time"] = 1;
  payload["t_calc_step"] = 0.5;
  payload["epsilon"] = 0.05;
  payload["number_ic"] = 400;
  std::string run_id = submit_and_wait(payload);
  auto res = client_->Get("/api/runs/" + run_id);
  Json body = Json::parse(res->body);
  EXPECT_EQ(body["results"]["boxcount"]["n_testable"], 400);
  EXPECT_EQ(body["manifest"]["kind"], "boxcount");
}

TEST_F(ServiceTest, ErrorStatuses) {
  auto res = client_->Get("/api/jobs/job-999");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(client_->Delete("/api/jobs/job-999")->status, 404);
  EXPECT_EQ(client_->Get("/api/runs/nope")->status, 404);
  EXPECT_EQ(client_->Get("/api/runs/nope/trajectories")->status, 404);

  auto bad = client_->Post("/api/jobs", "{\"kind\": \"solve\"}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(Json::parse(bad->body).contains("error"));
  Json zero = region2_payload("solve");
  zero["number_ic"] = 0;
  EXPECT_EQ(client_->Post("/api/jobs", zero.dump(), "application/json")->status, 400);
  EXPECT_EQ(client_->Post("/api/jobs", "not json", "application/json")->status, 400);
  Json from_file = region2_payload("solve");
  from_file.erase("system");
  from_file["system_file"] = testing::system_path("lorenz.sys");
  EXPECT_EQ(client_->Post("/api/jobs", from_file.dump(), "application/json")->status, 400);

  Json small = region2_payload("solve");
  small["number_ic"] = 1;
  small["t_range"] = {0, 1};
  auto posted = client_->Post("/api/jobs", small.dump(), "application/json");
  std::string job_id = Json::parse(posted->body)["job_id"];
  wait_for(job_id);
  auto del = client_->Delete("/api/jobs/" + job_id);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 409);
}

TEST_F(ServiceTest, CancelQueuedAndRunningJobs) {
  Json big = region2_payload("solve");
  big["number_ic"] = 2000;
  big["t_range"] = {0, 200};
  big["t_calc_step"] = 0.001;
  big["t_plot_step"] = 1;
  std::string first = Json::parse(client_->Post("/api/jobs", big.dump(), "application/json")->body)["job_id"];
  std::string second = Json::parse(client_->Post("/api/jobs", big.dump(), "application/json")->body)["job_id"];

  auto del2 = client_->Delete("/api/jobs/" + second);
  ASSERT_TRUE(del2);
  EXPECT_EQ(del2->status, 200);
  EXPECT_EQ(Json::parse(client_->Get("/api/jobs/" + second)->body)["state"], "canceled");

  auto del1 = client_->Delete("/api/jobs/" + first);
  EXPECT_EQ(del1->status, 200);
  Json j = wait_for(first);
  EXPECT_EQ(j["state"], "canceled");
  EXPECT_TRUE(Store(dir_.path()).list_runs().empty());
}

TEST(Service, BindFailure) {
  TempDir dir;
  ServiceConfig cfg;
  cfg.store_root = dir.path();
  cfg.port = 0;
  Service a(cfg);
  a.bind();
  cfg.port = a.port();
  Service b(cfg);
  try {
    b.bind();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kBind);
  }
}

}  // namespace
}  // namespace chaoscope
