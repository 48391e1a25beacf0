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

#include <filesystem>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "chaoscope/error.hpp"
#include "chaoscope/store.hpp"
#include "test_util.hpp"

namespace chaoscope {
namespace {

using testing::TempDir;

RunManifest sample_manifest() {
  RunManifest m;
  m.kind = "solve";
  m.system_name = "lorenz";
  m.system_source = pretty_print(testing::load_system("lorenz.sys"));
  m.predicate_source = "x < 0";
  m.region = InitRegion::parse("x=-1..1, y=-1..1, z=21.999..22.001");
  m.h = 0.01;
  m.t0 = 0.0;
  m.t1 = 0.5;
  m.sample_stride = 5;
  m.seed = 1;
  m.number_ic = 3;
  m.options["epsilon"] = 2e-7;
  return m;
}

std::vector<Trajectory> sample_trajectories(const RunManifest& m) {
  SystemDef s = parse_system(m.system_source);
  ICSet ics = sample_ics(m.region, m.number_ic, m.seed);
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < ics.count(); ++i) {
    out.push_back(integrate(s, ics.points[i], m.integrator_config(), i));
  }
  return out;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::kIo;
}

TEST(Store, SaveLoadRoundTrip) {
  TempDir dir;
  Store store(dir.path());
  RunManifest m = sample_manifest();
  auto trajs = sample_trajectories(m);
  RunResults res;
  res.ics = sample_ics(m.region, m.number_ic, m.seed);
  BoxcountResult b;
  b.epsilon = 2e-7;
  b.delta = 1e-7;
  b.n_testable = 3;
  b.n_boundary = 1;
  res.boxcount = b;
  std::string id = store.save_run(m, trajs, res);

  StoredRun run = store.load_run(id);
  const RunManifest& back = run.manifest();
  EXPECT_EQ(back.run_id, id);
  EXPECT_FALSE(back.created_at.empty());
  RunManifest expect = m;
  expect.run_id = back.run_id;
  expect.created_at = back.created_at;
  expect.trajectories = back.trajectories;
  expect.result_refs = back.result_refs;
  EXPECT_TRUE(manifests_equal(expect, back));
  EXPECT_EQ(back.result_refs, (std::vector<std::string>{"ics.csv", "boxcount.json"}));
  EXPECT_TRUE(structurally_equal(parse_system(back.system_source), testing::load_system("lorenz.sys")));

  ASSERT_EQ(run.trajectory_count(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    Trajectory t = run.trajectory(i);
    EXPECT_EQ(t.ic_index, i);
    EXPECT_EQ(t.times, trajs[i].times);
    EXPECT_EQ(t.states, trajs[i].states);
  }
  EXPECT_EQ(run.boxcount()->n_boundary, 1u);
  EXPECT_FALSE(run.fdim().has_value());
  EXPECT_EQ(*run.initial_conditions(), res.ics->points);
  EXPECT_EQ(run.read_file("ic_0.csv").substr(0, 8), "t,x,y,z\n");
}

TEST(Store, ManifestJsonRoundTrip) {
  RunManifest m = sample_manifest();
  m.run_id = "abc";
  m.created_at = "2026-01-01T00:00:00.000Z";
  m.method = "plugin";
  m.compile_command = "cc -o {exe} {src}";
  TrajectoryEntry e;
  e.ic_index = 2;
  e.file = "ic_2.csv";
  e.samples = 4;
  e.completed = false;
  e.reason = "non-finite state";
  e.last_good_time = 0.125;
  m.trajectories.push_back(e);
  RunManifest back = manifest_from_json_text(to_json_text(m));
  EXPECT_TRUE(manifests_equal(m, back));
  EXPECT_EQ(to_json_text(back), to_json_text(m));
  EXPECT_EQ(back.region.ranges()[2].lo, 21.999);
}

TEST(Store, FdimJsonRoundTripIsExact) {
  FdimResult f;
  f.D = 3;
  f.alpha = 0.78680188382572;
  f.d_B = 3.0 - f.alpha;
  f.se_percent = 1.868128109494962;
  f.pearson_r = 0.9993933454816381;
  f.points.push_back({2e-7, 1e-7, 0.02, 10000, 200, 0, true});
  f.points.push_back({1e-6, 5e-7, 0.0, 10000, 0, 3, false});
  FdimResult back = fdim_from_json_text(to_json_text(f));
  EXPECT_EQ(back.alpha, f.alpha);
  EXPECT_EQ(back.d_B, f.d_B);
  EXPECT_EQ(back.points[1].n_excluded, 3u);
  EXPECT_FALSE(back.points[1].used);
  EXPECT_EQ(fdim_points_csv(f).substr(0, 15), "delta,fraction\n");
}

TEST(Store, TrajectoryCsvRoundTripIsBitwise) {
  Trajectory t;
  t.times = {0.0, 0.1, 1.0 / 3.0};
  t.states = {{1e-300, -0.0}, {3.141592653589793, 2.718281828459045}, {-1e300, 5e-324}};
  Trajectory back = trajectory_from_csv(trajectory_to_csv(t, {"a", "b"}), 2, "x.csv");
  EXPECT_EQ(back.times, t.times);
  EXPECT_EQ(back.states, t.states);
  EXPECT_THROW(trajectory_from_csv("t,a\n0,1,2\n", 1, "x.csv"), Error);
  EXPECT_THROW(trajectory_from_csv("t,a\n0,zz\n", 1, "x.csv"), Error);
}

TEST(Store, DuplicateRunId) {
  TempDir dir;
  Store store(dir.path());
  RunManifest m = sample_manifest();
  m.run_id = "fixed-id";
  store.save_run(m, {});
  EXPECT_EQ(code_of([&] { store.save_run(m, {}); }), Errc::kDuplicate);
  // No staging directories left behind.
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(e.path().filename().string(), "fixed-id");
  }
}

TEST(Store, ConcurrentSavesGetDistinctIds) {
  TempDir dir;
  Store store(dir.path());
  RunManifest m = sample_manifest();
  auto trajs = sample_trajectories(m);
  std::vector<std::string> ids(8);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] { ids[i] = store.save_run(m, trajs); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 8u);
  for (const auto& id : ids) EXPECT_EQ(store.load_run(id).trajectory_count(), 3u);
  EXPECT_EQ(store.list_runs().size(), 8u);
}

TEST(Store, IntegrityErrors) {
  TempDir dir;
  Store store(dir.path());
  RunManifest m = sample_manifest();
  RunResults res;
  res.ics = sample_ics(m.region, 3, 1);
  std::string id = store.save_run(m, sample_trajectories(m), res);

  EXPECT_EQ(code_of([&] { store.load_run("missing"); }), Errc::kNotFound);
  EXPECT_EQ(code_of([&] { store.load_run("../etc"); }), Errc::kNotFound);

  std::filesystem::remove(dir / id / "ics.csv");
  try {
    store.load_run(id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIntegrity);
    EXPECT_NE(std::string(e.what()).find("ics.csv"), std::string::npos);
  }

  std::string id2 = store.save_run(m, sample_trajectories(m));
  testing::write_text(dir / id2 / "ic_1.csv", "t,x,y,z\n0,1,2\n");
  StoredRun run = store.load_run(id2);
  try {
    run.trajectory(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIntegrity);
    EXPECT_NE(std::string(e.what()).find("ic_1.csv:2"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { run.trajectory(7); }), Errc::kNotFound);

  testing::write_text(dir / id2 / "manifest.json", "{ not json");
  try {
    store.load_run(id2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIntegrity);
    EXPECT_NE(std::string(e.what()).find("manifest.json"), std::string::npos);
  }
}

TEST(Store, ListRunsNewestFirstAndSkipsJunk) {
  TempDir dir;
  Store store(dir.path());
  RunManifest m = sample_manifest();
  m.created_at = "2026-01-01T00:00:00.000Z";
  m.run_id = "old";
  store.save_run(m, {});
  m.created_at = "2026-02-01T00:00:00.000Z";
  m.run_id = "new";
  store.save_run(m, {});
  std::filesystem::create_directories(dir / "not-a-run");
  testing::write_text(dir / "stray.txt", "x");
  auto runs = store.list_runs();
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].run_id, "new");
  EXPECT_EQ(runs[1].run_id, "old");
  EXPECT_EQ(runs[0].system_name, "lorenz");
  EXPECT_TRUE(Store(dir / "nope").list_runs().empty());
}

TEST(Store, DefaultRootFollowsEnvironment) {
  ::setenv("CHAOSCOPE_STORE", "/tmp/some-store", 1);
  EXPECT_EQ(Store::default_root(), std::filesystem::path("/tmp/some-store"));
  ::unsetenv("CHAOSCOPE_STORE");
  EXPECT_EQ(Store::default_root(), std::filesystem::path("chaoscope-store"));
}

}  // namespace
}  // namespace chaoscope
