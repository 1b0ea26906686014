// Copyright 2026 The URNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "testing/oracles.h"
#include "urnn/scene_io.h"

namespace urnn::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ::testing::HasSubstr;
using urnn::testing::LineTrack;
using urnn::testing::MakeScene;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json ReadJson(const fs::path& path) { return json::parse(ReadFile(path)); }

size_t CountLines(const std::string& text) {
  size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

const std::vector<std::string> kTinyModel = {"--e-dim",    "4", "--hidden", "8",
                                             "--pool-dim", "8", "--epochs", "2",
                                             "--quiet"};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("urnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("URNN_CONFIG");
    fs::remove_all(dir_);
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Synth(size_t n, uint64_t seed, const std::string& name = "synth.ndjson") {
    const std::string path = Path(name);
    const Result r = Invoke({"synth", "-n", std::to_string(n), "--seed", std::to_string(seed),
                             "--out", path});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return path;
  }

  std::string TrainTiny(const std::string& data, const std::string& name,
                        std::vector<std::string> extra = {}) {
    const std::string path = Path(name);
    std::vector<std::string> args = {"train", "--data", data, "--out", path, "--seed", "3",
                                     "--deterministic", "--pool", "directional"};
    args.insert(args.end(), kTinyModel.begin(), kTinyModel.end());
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = Invoke(args);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, MissingDataIsUsageError) {
  const Result r = Invoke({"train", "--out", Path("m.urnn")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("--data"));
}

TEST_F(CliTest, UnknownSubcommandAndBadTokenAreUsageErrors) {
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  const std::string data = Synth(4, 1);
  EXPECT_EQ(Invoke({"train", "--data", data, "--out", Path("m"), "--cell", "rnn"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"eval", "--data", data}).code, kExitUsage);
  EXPECT_EQ(Invoke({"eval", "--data", data, "--baseline", "oracle"}).code, kExitUsage);
}

TEST_F(CliTest, MalformedDataIsIntegrityError) {
  std::ofstream(Path("bad.ndjson")) << "{\"scene\": {\"id\": 0\n";
  EXPECT_EQ(Invoke({"categorize", "--data", Path("bad.ndjson")}).code, kExitIntegrity);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const std::string a = Synth(100, 7, "a.ndjson");
  const std::string b = Synth(100, 7, "b.ndjson");
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  EXPECT_NE(ReadFile(a), ReadFile(Synth(100, 8, "c.ndjson")));
  const json m = ReadJson(a + ".manifest.json");
  EXPECT_EQ(m["command"], "synth");
  EXPECT_EQ(m["scenes"], 100);
  EXPECT_EQ(m["outputs"][0]["sha256"], Sha256File(a));
}

TEST_F(CliTest, CategorizeSynthIsAllTypeThree) {
  const std::string data = Synth(50, 7);
  const Result r = Invoke({"categorize", "--data", data, "--out", Path("tagged.ndjson")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = ReadJson(Path("tagged.ndjson.manifest.json"));
  EXPECT_EQ(m["types"]["III"], 50);
  EXPECT_EQ(m["types"]["I"], 0);
  EXPECT_THAT(r.out, HasSubstr("100.0%"));
  // Tags survive a reparse.
  EXPECT_EQ(ParseScenes(Path("tagged.ndjson")).size(), 50u);
}

TEST_F(CliTest, CategorizeStaticFileIsAllTypeOne) {
  std::vector<Scene> scenes;
  for (int64_t k = 0; k < 5; ++k) {
    scenes.push_back(MakeScene(k, {LineTrack(2 * k + 1, 0, 21, {0.1 * k, 0}, {0, 0}),
                                   LineTrack(2 * k + 2, 0, 21, {3, 1}, {0, 0})}));
  }
  WriteNdjsonFile(Path("static.ndjson"), scenes);
  const Result r =
      Invoke({"categorize", "--data", Path("static.ndjson"), "--out", Path("tagged.ndjson")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = ReadJson(Path("tagged.ndjson.manifest.json"));
  EXPECT_EQ(m["types"]["I"], 5);
  EXPECT_EQ(m["types"]["III"], 0);
}

TEST_F(CliTest, BaselineEvalGivesTwoRows) {
  const std::string data = Synth(20, 2);
  const Result r = Invoke({"eval", "--data", data, "--baseline", "cv,kalman", "--out",
                           Path("table.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(CountLines(ReadFile(Path("table.csv"))), 3u);  // header + 2 rows
  EXPECT_EQ(CountLines(r.out), 4u);  // header, rule, 2 rows
  const json m = ReadJson(Path("table.csv.manifest.json"));
  EXPECT_EQ(m["metrics"].size(), 2u);

  const Result b = Invoke({"baseline", "--data", data, "--out", Path("b.csv")});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(ReadFile(Path("b.csv")), ReadFile(Path("table.csv")));
}

TEST_F(CliTest, TypesFilterRestrictsScoredScenes) {
  std::vector<Scene> scenes = ParseScenes(Synth(12, 4));
  for (int64_t k = 0; k < 4; ++k) {
    scenes.push_back(MakeScene(100 + k, {LineTrack(1000 + 2 * k, 0, 21, {0, 0}, {0, 0}),
                                         LineTrack(1001 + 2 * k, 0, 21, {3, 1}, {0, 0})}));
  }
  WriteNdjsonFile(Path("mixed.ndjson"), scenes);
  ASSERT_EQ(Invoke({"eval", "--data", Path("mixed.ndjson"), "--baseline", "cv", "--out",
                    Path("all.csv")})
                .code,
            kExitOk);
  ASSERT_EQ(Invoke({"eval", "--data", Path("mixed.ndjson"), "--baseline", "cv", "--types", "III",
                    "--out", Path("iii.csv")})
                .code,
            kExitOk);
  const json all = ReadJson(Path("all.csv.manifest.json"))["metrics"][0]["report"];
  const json iii = ReadJson(Path("iii.csv.manifest.json"))["metrics"][0]["report"];
  EXPECT_EQ(all["overall"]["scenes"], 16);
  EXPECT_EQ(all["I"]["scenes"], 4);
  EXPECT_EQ(iii["overall"]["scenes"], 12);
  EXPECT_EQ(iii["I"]["scenes"], 0);
  EXPECT_EQ(iii["III"]["scenes"], 12);
  EXPECT_EQ(Invoke({"eval", "--data", Path("mixed.ndjson"), "--baseline", "cv", "--types", "V"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, TrainWritesModelAndManifest) {
  const std::string data = Synth(10, 5);
  const std::string model = TrainTiny(data, "u.urnn", {"--encoder", "u", "--cell", "lstm"});
  ASSERT_TRUE(fs::exists(model));
  const json m = ReadJson(model + ".manifest.json");
  EXPECT_EQ(m["command"], "train");
  EXPECT_EQ(m["model"]["sha256"], Sha256File(model));
  EXPECT_EQ(m["config"]["model"]["encoder"], "u");
  EXPECT_EQ(m["config"]["model"]["cell"], "lstm");
  EXPECT_EQ(m["training"]["epochs_run"], 2);
  EXPECT_EQ(m["datasets"][0]["split"]["train"].get<size_t>() +
                m["datasets"][0]["split"]["val"].get<size_t>(),
            10u);
}

TEST_F(CliTest, TrainAndEvalAreReproducible) {
  const std::string data = Synth(10, 5);
  const std::string a = TrainTiny(data, "a.urnn");
  const std::string b = TrainTiny(data, "b.urnn");
  EXPECT_EQ(ReadFile(a), ReadFile(b));
  json ma = ReadJson(a + ".manifest.json");
  json mb = ReadJson(b + ".manifest.json");
  for (json* m : {&ma, &mb}) {
    m->erase("wall_clock_seconds");
    (*m)["model"].erase("file");
  }
  EXPECT_EQ(ma, mb);

  // Re-evaluating the saved model reproduces the manifest metrics.
  ASSERT_EQ(Invoke({"eval", "--data", data, "--model", a, "--out", Path("e.csv")}).code, kExitOk);
  const json e = ReadJson(Path("e.csv.manifest.json"));
  EXPECT_EQ(e["models"][0]["sha256"], Sha256File(a));
}

TEST_F(CliTest, CorruptModelIsIntegrityError) {
  const std::string data = Synth(10, 5);
  const std::string model = TrainTiny(data, "m.urnn");
  std::string bytes = ReadFile(model);
  bytes[bytes.size() / 2] ^= 0x01;
  std::ofstream(model, std::ios::binary) << bytes;
  const Result r = Invoke({"eval", "--data", data, "--model", model});
  EXPECT_EQ(r.code, kExitIntegrity);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Invoke({"predict", "--data", data, "--model", model, "--out", Path("p")}).code,
            kExitIntegrity);
}

TEST_F(CliTest, PredictWritesOneRowPerPedestrianStep) {
  std::vector<Scene> scenes;
  scenes.push_back(MakeScene(0, {LineTrack(1, 0, 21, {0, 0}, {0.4, 0}),
                                 LineTrack(2, 0, 21, {0, 2}, {0, 0.1})}));
  WriteNdjsonFile(Path("s.ndjson"), scenes);
  ASSERT_EQ(Invoke({"predict", "--data", Path("s.ndjson"), "--baseline", "cv", "--out",
                    Path("p.ndjson")})
                .code,
            kExitOk);
  std::istringstream lines(ReadFile(Path("p.ndjson")));
  std::string line;
  size_t n = 0;
  while (std::getline(lines, line)) {
    const json p = json::parse(line)["prediction"];
    if (p["p"] == 1 && p["f"] == 20) EXPECT_NEAR(p["x"].get<double>(), 8.0, 1e-12);
    ++n;
  }
  EXPECT_EQ(n, 2u * 12u);
  EXPECT_EQ(Invoke({"predict", "--data", Path("s.ndjson"), "--out", Path("p")}).code,
            kExitUsage);
}

TEST_F(CliTest, AblationGridRowsAndRunCount) {
  const std::string data = Synth(10, 6);
  std::vector<std::string> args = {"ablation", "--data",  data,    "--encoders", "plain,u",
                                   "--cells",  "gru",     "--seeds", "3",        "--out",
                                   Path("abl"), "--quiet", "--deterministic"};
  for (const std::string& a : kTinyModel) {
    if (a == "--epochs") {
      args.insert(args.end(), {"--epochs", "1"});
    } else if (a != "2" && a != "--quiet") {
      args.push_back(a);
    }
  }
  const Result r = Invoke(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = ReadJson(Path("abl/manifest.json"));
  EXPECT_EQ(m["total_runs"], 2 * 1 * 1 * 3);
  EXPECT_EQ(m["runs"].size(), 6u);
  const json& table = m["metrics"]["table"];
  ASSERT_EQ(table.size(), 4u);  // cv, kalman, 2 grid rows
  size_t with_spread = 0;
  for (const json& row : table) with_spread += row.contains("ade_spread");
  EXPECT_EQ(with_spread, 2u);
  EXPECT_THAT(r.out, HasSubstr("ADE spread"));
  EXPECT_THAT(r.out, HasSubstr("total runs: 6"));
  EXPECT_TRUE(fs::exists(Path("abl/runs.csv")));
  EXPECT_EQ(CountLines(ReadFile(Path("abl/runs.csv"))), 7u);
}

TEST_F(CliTest, ConfigPrecedence) {
  std::ofstream(Path("env.json")) << R"({"train": {"seed": 5}})";
  std::ofstream(Path("file.json")) << R"({"train": {"seed": 6}})";
  auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"synth", "-n", "1", "--out", Path("s.ndjson")};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(Invoke(args).code, kExitOk);
    return ReadJson(Path("s.ndjson.manifest.json"))["seed"].get<uint64_t>();
  };
  const uint64_t defaults = seed_of({});
  setenv("URNN_CONFIG", Path("env.json").c_str(), 1);
  EXPECT_EQ(seed_of({}), 5u);
  EXPECT_EQ(seed_of({"--config", Path("file.json")}), 6u);
  EXPECT_EQ(seed_of({"--config", Path("file.json"), "--seed", "9"}), 9u);
  unsetenv("URNN_CONFIG");
  EXPECT_EQ(seed_of({}), defaults);
}

TEST_F(CliTest, BadConfigIsUsageError) {
  std::ofstream(Path("bad.json")) << R"({"trian": {}})";
  std::ofstream(Path("broken.json")) << "{";
  for (const char* name : {"bad.json", "broken.json", "missing.json"}) {
    EXPECT_EQ(Invoke({"synth", "-n", "1", "--out", Path("s"), "--config", Path(name)}).code,
              kExitUsage)
        << name;
  }
}

}  // namespace
}  // namespace urnn::cli
