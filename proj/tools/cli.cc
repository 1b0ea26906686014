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

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "urnn/baselines.h"
#include "urnn/config.h"
#include "urnn/metrics.h"
#include "urnn/model_io.h"
#include "urnn/scene_io.h"
#include "urnn/synth.h"
#include "urnn/train.h"

#ifndef URNN_GIT_DESCRIBE
#define URNN_GIT_DESCRIBE ""
#endif

namespace urnn::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Every setting a command may consume, resolved as
// built-in defaults < config file < command-line flags.
struct Settings {
  ModelConfig model;
  TrainSchedule train;
  CategorizeOptions categorize;
  SynthOptions synth;
  CsvOptions csv;
  EvaluateOptions eval;

  // Horizons follow the model section.
  void SyncHorizon() {
    categorize.obs_len = synth.obs_len = model.obs_len;
    categorize.pred_len = synth.pred_len = model.pred_len;
    synth.categorize = categorize;
    csv.window = model.obs_len + model.pred_len;
    eval.categorize = categorize;
  }

  json ToJson() const {
    return {{"model", urnn::ToJson(model)},
            {"train", urnn::ToJson(train)},
            {"categorize", urnn::ToJson(categorize)},
            {"synth", urnn::ToJson(synth)},
            {"csv", {{"window", csv.window}, {"stride", csv.stride}, {"fps", csv.fps}}},
            {"eval",
             {{"collision_threshold", eval.collision_threshold},
              {"subframe_steps", eval.subframe_steps}}}};
  }
};

void MergeSettings(const json& j, Settings& s) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "model") {
      Merge(value, s.model);
    } else if (key == "train") {
      Merge(value, s.train);
    } else if (key == "categorize") {
      Merge(value, s.categorize);
    } else if (key == "synth") {
      Merge(value, s.synth);
    } else if (key == "csv") {
      for (const auto& [k, v] : value.items()) {
        if (k == "stride") {
          s.csv.stride = v.get<size_t>();
        } else if (k == "fps") {
          s.csv.fps = v.get<double>();
        } else if (k != "window") {
          throw UsageError("config: unknown key csv." + k);
        }
      }
    } else if (key == "eval") {
      for (const auto& [k, v] : value.items()) {
        if (k == "collision_threshold") {
          s.eval.collision_threshold = v.get<double>();
        } else if (k == "subframe_steps") {
          s.eval.subframe_steps = v.get<size_t>();
        } else {
          throw UsageError("config: unknown key eval." + k);
        }
      }
    } else {
      throw UsageError("config: unknown section '" + key + "'");
    }
  }
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string Basename(const std::string& path) { return fs::path(path).filename().string(); }

void WriteJsonFile(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path);
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

json BucketJson(const MetricsBucket& b) {
  return {{"scenes", b.count}, {"ade", b.ade()}, {"fde", b.fde()}, {"col1", b.col1_pct()},
          {"col2", b.col2_pct()}};
}

json ReportJson(const MetricsReport& r) {
  json j = json::object();
  for (const MetricsBucket& b : r.buckets) j[b.name] = BucketJson(b);
  return j;
}

// Shared flags and the resolution of settings from them.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app->add_option("--config", config_path_,
                    "JSON config file (defaults to $URNN_CONFIG when set)");
    obs_ = app->add_option("--obs-len", obs_len_, "Observed frames (default 9)");
    pred_ = app->add_option("--pred-len", pred_len_, "Predicted frames (default 12)");
  }

  void AddModelFlags() {
    encoder_ = app_->add_option("--encoder", encoder_token_, "Encoder: plain, bi, u, ur")
                   ->check(CLI::IsMember({"plain", "bi", "u", "ur", "reversed-u"}));
    cell_ = app_->add_option("--cell", cell_token_, "Cell: gru, lstm")
                ->check(CLI::IsMember({"gru", "lstm"}));
    pool_ = app_->add_option("--pool", pool_token_,
                             "Pooling: none, occupancy, directional, social")
                ->check(CLI::IsMember({"none", "occupancy", "directional", "social"}));
    loss_ = app_->add_option("--loss", loss_token_, "Loss: l2, nll")
                ->check(CLI::IsMember({"l2", "nll"}));
    e_dim_ = app_->add_option("--e-dim", e_dim_value_, "Embedding width");
    hidden_ = app_->add_option("--hidden", hidden_value_, "Encoder hidden width");
    pool_dim_ = app_->add_option("--pool-dim", pool_dim_value_, "Interaction embedding width");
  }

  void AddTrainFlags() {
    epochs_ = app_->add_option("--epochs", epochs_value_, "Maximum epochs");
    lr_ = app_->add_option("--lr", lr_value_, "Initial learning rate");
    batch_ = app_->add_option("--batch-size", batch_value_, "Scenes per optimizer step");
    no_augment_ = app_->add_flag("--no-augment", "Disable rotation augmentation");
    AddSeedFlag();
    jobs_ = app_->add_option("--jobs", jobs_value_, "Worker threads");
    deterministic_ = app_->add_flag("--deterministic", "Single ordered gradient reduction");
  }

  void AddSeedFlag() {
    if (!seed_) seed_ = app_->add_option("--seed", seed_value_, "Random seed");
  }

  Settings Resolve() const {
    Settings s;
    std::string path = config_path_;
    if (path.empty()) {
      if (const char* env = std::getenv("URNN_CONFIG"); env != nullptr) path = env;
    }
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw UsageError("cannot open config file " + path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
      }
      try {
        MergeSettings(j, s);
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
    if (obs_->count()) s.model.obs_len = obs_len_;
    if (pred_->count()) s.model.pred_len = pred_len_;
    if (encoder_ && encoder_->count()) s.model.encoder = ParseEncoderVariant(encoder_token_);
    if (cell_ && cell_->count()) s.model.cell = ParseCellKind(cell_token_);
    if (pool_ && pool_->count()) s.model.pooling = ParsePoolingKind(pool_token_);
    if (loss_ && loss_->count()) s.model.loss = ParseLossKind(loss_token_);
    if (e_dim_ && e_dim_->count()) s.model.e_dim = e_dim_value_;
    if (hidden_ && hidden_->count()) s.model.hidden_dim = hidden_value_;
    if (pool_dim_ && pool_dim_->count()) s.model.pool_dim = pool_dim_value_;
    if (epochs_ && epochs_->count()) s.train.max_epochs = epochs_value_;
    if (lr_ && lr_->count()) s.train.lr = lr_value_;
    if (batch_ && batch_->count()) s.train.batch_size = batch_value_;
    if (no_augment_ && no_augment_->count()) s.train.augment = false;
    if (seed_ && seed_->count()) s.train.seed = seed_value_;
    if (jobs_ && jobs_->count()) s.train.jobs = jobs_value_;
    if (deterministic_ && deterministic_->count()) s.train.deterministic = true;
    try {
      s.model.Validate();
      s.train.Validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    s.SyncHorizon();
    return s;
  }

  uint64_t seed(const Settings& s) const { return s.train.seed; }

 private:
  CLI::App* app_;
  std::string config_path_;
  size_t obs_len_ = 9;
  size_t pred_len_ = 12;
  CLI::Option* obs_ = nullptr;
  CLI::Option* pred_ = nullptr;
  std::string encoder_token_, cell_token_, pool_token_, loss_token_;
  size_t e_dim_value_ = 0, hidden_value_ = 0, pool_dim_value_ = 0;
  size_t epochs_value_ = 0, batch_value_ = 0, jobs_value_ = 1;
  double lr_value_ = 0.0;
  uint64_t seed_value_ = 1;
  CLI::Option *encoder_ = nullptr, *cell_ = nullptr, *pool_ = nullptr, *loss_ = nullptr;
  CLI::Option *e_dim_ = nullptr, *hidden_ = nullptr, *pool_dim_ = nullptr;
  CLI::Option *epochs_ = nullptr, *lr_ = nullptr, *batch_ = nullptr, *no_augment_ = nullptr;
  CLI::Option *seed_ = nullptr, *jobs_ = nullptr, *deterministic_ = nullptr;
};

std::vector<Scene> LoadScenes(const std::string& path, const Settings& s) {
  return ParseScenes(path, FormatFromPath(path), s.csv);
}

std::vector<PreparedScene> PrepareAll(std::span<const Scene> scenes, const Settings& s) {
  std::vector<PreparedScene> out;
  out.reserve(scenes.size());
  for (const Scene& scene : scenes) {
    try {
      out.push_back(PrepareScene(scene, s.model.obs_len, s.model.pred_len));
    } catch (const Error& e) {
      throw ParseError("scene " + std::to_string(scene.id) + ": " + e.what());
    }
  }
  return out;
}

json DatasetJson(const std::string& role, const std::string& path, size_t scenes) {
  return {{"role", role},
          {"path", path},
          {"sha256", Sha256File(path)},
          {"bytes", fs::file_size(path)},
          {"scenes", scenes}};
}

json ManifestBase(const std::string& command, const Settings& s) {
  return {{"tool", "urnn"},
          {"command", command},
          {"config", s.ToJson()},
          {"seed", s.train.seed},
          {"git_describe", URNN_GIT_DESCRIBE},
          {"model_format_version", kModelFormatVersion}};
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::map<std::string, size_t> TypeHistogram(std::span<const SceneType> types) {
  std::map<std::string, size_t> counts;
  for (const char* k : {"I", "II", "III", "IV", "III/leader_follower",
                        "III/collision_avoidance", "III/group", "III/others"}) {
    counts[k] = 0;
  }
  for (const SceneType& t : types) {
    ++counts[CategoryLabel(t.category)];
    if (t.subtype) ++counts[SceneTypeLabel(t)];
  }
  return counts;
}

void PrintHistogram(std::ostream& out, const std::map<std::string, size_t>& hist, size_t total) {
  for (const char* k : {"I", "II", "III", "III/leader_follower", "III/collision_avoidance",
                        "III/group", "III/others", "IV"}) {
    const double pct = total ? 100.0 * hist.at(k) / static_cast<double>(total) : 0.0;
    out << std::left << std::setw(24) << k << std::right << std::setw(8) << hist.at(k) << "  "
        << std::fixed << std::setprecision(1) << std::setw(5) << pct << "%\n";
  }
  out << std::left << std::setw(24) << "total" << std::right << std::setw(8) << total << '\n';
  out.unsetf(std::ios::floatfield);
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  size_t n = 0;
  int64_t first_id = 0;
  std::string out;
};

int CmdSynth(const Options& opts, const SynthArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Settings s = opts.Resolve();
  Rng rng(s.train.seed);
  SynthOptions options = s.synth;
  options.first_scene_id = a.first_id;
  const std::vector<Scene> scenes = SynthScenes(a.n, rng, options);
  std::vector<SceneType> types;
  for (const Scene& scene : scenes) types.push_back(Categorize(scene, s.categorize));
  WriteNdjsonFile(a.out, scenes, types);
  json m = ManifestBase("synth", s);
  m["scenes"] = scenes.size();
  m["types"] = TypeHistogram(types);
  m["outputs"] = {DatasetJson("scenes", a.out, scenes.size())};
  m["wall_clock_seconds"] = SecondsSince(start);
  WriteJsonFile(a.out + ".manifest.json", m);
  out << "wrote " << scenes.size() << " scenes to " << a.out << '\n';
  return kExitOk;
}

// ---- categorize ------------------------------------------------------------

struct CategorizeArgs {
  std::string data;
  std::string out;
};

int CmdCategorize(const Options& opts, const CategorizeArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Settings s = opts.Resolve();
  const std::vector<Scene> scenes = LoadScenes(a.data, s);
  std::vector<SceneType> types;
  for (const Scene& scene : scenes) types.push_back(Categorize(scene, s.categorize));
  const auto hist = TypeHistogram(types);
  PrintHistogram(out, hist, scenes.size());
  if (!a.out.empty()) {
    WriteNdjsonFile(a.out, scenes, types);
    json m = ManifestBase("categorize", s);
    m["datasets"] = {DatasetJson("input", a.data, scenes.size())};
    m["types"] = hist;
    m["outputs"] = {DatasetJson("annotated", a.out, scenes.size())};
    m["wall_clock_seconds"] = SecondsSince(start);
    WriteJsonFile(a.out + ".manifest.json", m);
  }
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string val;
  std::string out;
  bool quiet = false;
};

EpochCallback EpochLogger(std::ostream& err, bool quiet) {
  if (quiet) return {};
  return [&err](const EpochRecord& r) {
    err << "epoch " << std::setw(4) << r.epoch << "  train " << std::setprecision(6)
        << r.train_loss << "  val " << r.val_loss << "  lr " << r.lr
        << (r.improved ? "  *" : "") << '\n';
  };
}

json HistoryJson(const TrainResult& r) {
  json h = json::array();
  for (const EpochRecord& e : r.history) {
    h.push_back({{"epoch", e.epoch},
                 {"train_loss", e.train_loss},
                 {"val_loss", e.val_loss},
                 {"lr", e.lr},
                 {"improved", e.improved}});
  }
  return h;
}

// Training and validation scenes: the explicit --val file, or a seeded
// stratified 80/20 split of --data.
struct Splits {
  std::vector<Scene> train;
  std::vector<Scene> val;
  json datasets;
};

Splits LoadSplits(const std::string& data, const std::string& val, const Settings& s) {
  Splits out;
  std::vector<Scene> all = LoadScenes(data, s);
  if (val.empty()) {
    SceneSplit split = SplitScenes(all, {0.8, 0.2, 0.0}, s.train.seed, s.categorize);
    out.train = std::move(split.train);
    out.val = std::move(split.val);
    out.datasets = {DatasetJson("data", data, all.size())};
    out.datasets[0]["split"] = {{"train", out.train.size()}, {"val", out.val.size()},
                                {"seed", s.train.seed}};
  } else {
    out.train = std::move(all);
    out.val = LoadScenes(val, s);
    out.datasets = {DatasetJson("train", data, out.train.size()),
                    DatasetJson("val", val, out.val.size())};
  }
  if (out.train.empty() || out.val.empty()) {
    throw ParseError("training and validation splits must both be non-empty");
  }
  return out;
}

int CmdTrain(const Options& opts, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Settings s = opts.Resolve();
  const Splits splits = LoadSplits(a.data, a.val, s);
  const std::vector<PreparedScene> train = PrepareAll(splits.train, s);
  const std::vector<PreparedScene> val = PrepareAll(splits.val, s);

  ForecastModel model = ForecastModel::Create(s.model, s.train.seed);
  const TrainResult result = Train(model, train, val, s.train, EpochLogger(err, a.quiet));
  SaveModel(model, a.out);

  ModelPredictor predictor(model);
  const MetricsReport report = Evaluate(predictor, splits.val, s.eval);
  json m = ManifestBase("train", s);
  m["datasets"] = splits.datasets;
  m["model"] = {{"label", ModelLabel(s.model)},
                {"interaction", PoolingLabel(s.model.pooling)},
                {"parameters", model.ParameterCount()},
                {"file", Basename(a.out)},
                {"sha256", Sha256File(a.out)}};
  m["training"] = {{"epochs_run", result.history.size()},
                   {"best_epoch", result.best_epoch},
                   {"best_val_loss", result.best_val_loss},
                   {"stopped_early", result.stopped_early},
                   {"history", HistoryJson(result)}};
  m["metrics"] = {{"split", "val"}, {"report", ReportJson(report)}};
  m["wall_clock_seconds"] = SecondsSince(start);
  WriteJsonFile(a.out + ".manifest.json", m);

  const TableRow row = RowFromBucket(predictor.name(), predictor.interaction(), report.overall());
  PrintTable(out, std::span(&row, 1));
  out << "wrote " << a.out << " (" << model.ParameterCount() << " parameters)\n";
  return kExitOk;
}

// ---- eval / baseline -------------------------------------------------------

struct EvalArgs {
  std::string data;
  std::vector<std::string> models;
  std::string baselines;
  std::string types;
  std::string out;
  std::string buckets_out;
};

std::unique_ptr<Predictor> MakeBaseline(const std::string& token, const Settings& s) {
  if (token == "cv") return std::make_unique<ConstantVelocityPredictor>();
  if (token == "kalman") return std::make_unique<KalmanPredictor>(s.categorize.kalman);
  throw UsageError("unknown baseline '" + token + "' (expected cv or kalman)");
}

int EvaluateAll(const Settings& base, const EvalArgs& a, std::ostream& out,
                const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  Settings s = base;
  for (const std::string& t : SplitList(a.types)) {
    try {
      s.eval.categories.insert(ParseCategoryLabel(t));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<std::unique_ptr<Predictor>> predictors;
  std::vector<std::unique_ptr<ForecastModel>> models;
  json model_info = json::array();
  for (const std::string& path : a.models) {
    models.push_back(std::make_unique<ForecastModel>(LoadModel(path)));
    const ModelConfig& c = models.back()->config();
    if (c.obs_len != s.model.obs_len || c.pred_len != s.model.pred_len) {
      // The horizon stored in the model file wins.
      s.model.obs_len = c.obs_len;
      s.model.pred_len = c.pred_len;
      s.SyncHorizon();
    }
    predictors.push_back(std::make_unique<ModelPredictor>(*models.back()));
    model_info.push_back({{"file", path}, {"sha256", Sha256File(path)},
                          {"config", ToJson(c)}});
  }
  for (const std::string& b : SplitList(a.baselines)) predictors.push_back(MakeBaseline(b, s));
  if (predictors.empty()) throw UsageError("nothing to evaluate: pass --model and/or --baseline");

  const std::vector<Scene> scenes = LoadScenes(a.data, s);
  std::vector<TableRow> rows;
  std::vector<MetricsReport> reports;
  std::vector<std::string> names;
  for (auto& p : predictors) {
    reports.push_back(Evaluate(*p, scenes, s.eval));
    rows.push_back(RowFromBucket(p->name(), p->interaction(), reports.back().overall()));
    names.push_back(p->name() + " / " + p->interaction());
  }
  PrintTable(out, rows);
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw Error("cannot write " + a.out);
    WriteTableCsv(csv, rows);
    json m = ManifestBase(command, s);
    m["datasets"] = {DatasetJson("data", a.data, scenes.size())};
    m["models"] = model_info;
    m["types"] = a.types;
    json metrics = json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
      metrics.push_back({{"model", rows[i].model},
                         {"interaction", rows[i].interaction},
                         {"report", ReportJson(reports[i])}});
    }
    m["metrics"] = metrics;
    m["wall_clock_seconds"] = SecondsSince(start);
    WriteJsonFile(a.out + ".manifest.json", m);
  }
  if (!a.buckets_out.empty()) {
    std::ofstream csv(a.buckets_out);
    if (!csv) throw Error("cannot write " + a.buckets_out);
    WriteReportCsv(csv, names, reports);
  }
  return kExitOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string data;
  std::string model;
  std::string baseline;
  std::string out;
};

int CmdPredict(const Options& opts, const PredictArgs& a, std::ostream& out) {
  Settings s = opts.Resolve();
  std::unique_ptr<ForecastModel> model;
  std::unique_ptr<Predictor> predictor;
  if (!a.model.empty() == !a.baseline.empty()) {
    throw UsageError("pass exactly one of --model or --baseline");
  }
  if (!a.model.empty()) {
    model = std::make_unique<ForecastModel>(LoadModel(a.model));
    s.model.obs_len = model->config().obs_len;
    s.model.pred_len = model->config().pred_len;
    s.SyncHorizon();
    predictor = std::make_unique<ModelPredictor>(*model);
  } else {
    predictor = MakeBaseline(a.baseline, s);
  }
  const std::vector<Scene> scenes = LoadScenes(a.data, s);
  const std::vector<PreparedScene> prepared = PrepareAll(scenes, s);
  const std::vector<ScenePrediction> predictions = predictor->PredictBatch(prepared);
  std::ofstream file(a.out);
  if (!file) throw Error("cannot write " + a.out);
  for (size_t k = 0; k < scenes.size(); ++k) {
    const int64_t step = scenes[k].FrameStep();
    const PreparedScene& p = prepared[k];
    for (size_t i = 0; i < p.num_peds(); ++i) {
      for (size_t t = 0; t < p.pred_len; ++t) {
        const Vec2 xy = predictions[k].positions[i][t];
        const int64_t frame = scenes[k].start_frame + static_cast<int64_t>(p.obs_len + t) * step;
        file << json{{"prediction",
                      {{"scene", p.scene_id}, {"p", p.ped_ids[i]}, {"f", frame},
                       {"x", xy.x}, {"y", xy.y}}}}
                    .dump()
             << '\n';
      }
    }
  }
  out << "wrote predictions for " << scenes.size() << " scenes to " << a.out << '\n';
  return kExitOk;
}

// ---- ablation --------------------------------------------------------------

struct AblationArgs {
  std::string data;
  std::string val;
  std::string encoders = "plain,bi,u,ur";
  std::string cells = "gru,lstm";
  std::string pools = "directional";
  size_t seeds = 3;
  std::string out;
  bool quiet = false;
};

int CmdAblation(const Options& opts, const AblationArgs& a, std::ostream& out,
                std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Settings s = opts.Resolve();
  if (a.seeds < 1) throw UsageError("--seeds must be at least 1");
  std::vector<EncoderVariant> encoders;
  std::vector<CellKind> cells;
  std::vector<PoolingKind> pools;
  try {
    for (const auto& t : SplitList(a.encoders)) encoders.push_back(ParseEncoderVariant(t));
    for (const auto& t : SplitList(a.cells)) cells.push_back(ParseCellKind(t));
    for (const auto& t : SplitList(a.pools)) pools.push_back(ParsePoolingKind(t));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (encoders.empty() || cells.empty() || pools.empty()) {
    throw UsageError("ablation grid is empty");
  }
  fs::create_directories(a.out);
  const Splits splits = LoadSplits(a.data, a.val, s);
  const std::vector<PreparedScene> train = PrepareAll(splits.train, s);
  const std::vector<PreparedScene> val = PrepareAll(splits.val, s);

  std::ofstream runs_csv(fs::path(a.out) / "runs.csv");
  runs_csv << "model,interaction,encoder,cell,pool,seed,epochs,best_epoch,parameters,ade,fde,"
              "col1,col2\n";
  runs_csv << std::setprecision(17);
  std::vector<TableRow> rows;
  json runs = json::array();
  size_t total_runs = 0;
  for (PoolingKind pool : pools) {
    for (CellKind cell : cells) {
      for (EncoderVariant encoder : encoders) {
        ModelConfig config = s.model;
        config.encoder = encoder;
        config.cell = cell;
        config.pooling = pool;
        std::vector<double> ade, fde, col1, col2;
        for (size_t k = 0; k < a.seeds; ++k) {
          TrainSchedule schedule = s.train;
          schedule.seed = s.train.seed + k;
          ForecastModel model = ForecastModel::Create(config, schedule.seed);
          if (!a.quiet) {
            err << "[" << total_runs + 1 << "] " << ModelLabel(config) << " / "
                << PoolingLabel(pool) << " seed " << schedule.seed << '\n';
          }
          const TrainResult result = Train(model, train, val, schedule);
          ModelPredictor predictor(model);
          const MetricsBucket b = Evaluate(predictor, splits.val, s.eval).overall();
          ade.push_back(b.ade());
          fde.push_back(b.fde());
          col1.push_back(b.col1_pct());
          col2.push_back(b.col2_pct());
          ++total_runs;
          runs_csv << '"' << ModelLabel(config) << "\"," << PoolingLabel(pool) << ','
                   << ToString(encoder) << ',' << ToString(cell) << ',' << ToString(pool) << ','
                   << schedule.seed << ',' << result.history.size() << ',' << result.best_epoch
                   << ',' << model.ParameterCount() << ',' << b.ade() << ',' << b.fde() << ','
                   << b.col1_pct() << ',' << b.col2_pct() << '\n';
          runs.push_back({{"model", ModelLabel(config)},
                          {"interaction", PoolingLabel(pool)},
                          {"seed", schedule.seed},
                          {"epochs", result.history.size()},
                          {"best_epoch", result.best_epoch},
                          {"parameters", model.ParameterCount()},
                          {"metrics", BucketJson(b)}});
          if (!a.quiet) {
            err << "    ADE " << b.ade() << "  FDE " << b.fde() << "  Col-I " << b.col1_pct()
                << "%  epochs " << result.history.size() << '\n';
          }
        }
        TableRow row;
        row.model = ModelLabel(config);
        row.interaction = PoolingLabel(pool);
        row.ade = Median(ade);
        row.fde = Median(fde);
        row.col1 = Median(col1);
        row.col2 = Median(col2);
        row.scenes = splits.val.size();
        if (a.seeds > 1) {
          row.ade_spread = Spread(ade);
          row.fde_spread = Spread(fde);
          row.col1_spread = Spread(col1);
          row.col2_spread = Spread(col2);
          row.runs = a.seeds;
        }
        rows.push_back(row);
      }
    }
  }
  std::vector<TableRow> table;
  for (const std::string token : {"cv", "kalman"}) {
    auto p = MakeBaseline(token, s);
    table.push_back(
        RowFromBucket(p->name(), p->interaction(), Evaluate(*p, splits.val, s.eval).overall()));
  }
  table.insert(table.end(), rows.begin(), rows.end());

  std::ostringstream text;
  PrintTable(text, table);
  // Each encoder against the plain encoder with the same cell and pooling.
  std::ostringstream cmp;
  json comparisons = json::array();
  for (const TableRow& r : rows) {
    for (const TableRow& ref : rows) {
      if (&r == &ref || ref.interaction != r.interaction) continue;
      const std::string cell = ref.model.substr(ref.model.rfind(' ') + 1);
      if (ref.model != cell + " - " + cell || r.model.substr(r.model.rfind(' ') + 1) != cell) {
        continue;
      }
      const RowComparison c = CompareRows(r, ref);
      cmp << r.model << " vs " << ref.model << " (" << r.interaction << "): dADE "
          << std::showpos << std::fixed << std::setprecision(3) << c.ade
          << (c.ade_significant ? "" : " (n.s.)") << ", dFDE " << c.fde
          << (c.fde_significant ? "" : " (n.s.)") << ", dCol-I " << std::setprecision(1)
          << c.col1 << (c.col1_significant ? "" : " (n.s.)") << std::noshowpos << '\n';
      cmp.unsetf(std::ios::floatfield);
      comparisons.push_back({{"model", r.model}, {"reference", ref.model},
                             {"interaction", r.interaction}, {"d_ade", c.ade},
                             {"d_fde", c.fde}, {"d_col1", c.col1},
                             {"ade_significant", c.ade_significant},
                             {"fde_significant", c.fde_significant},
                             {"col1_significant", c.col1_significant}});
    }
  }
  out << text.str();
  if (!cmp.str().empty()) {
    out << "\nDifferences against the plain encoder (noise floor 0.01 m ADE/FDE, 0.5% Col-I):\n"
        << cmp.str();
  }
  {
    std::ofstream f(fs::path(a.out) / "table.txt");
    f << text.str() << '\n' << cmp.str();
    std::ofstream csv(fs::path(a.out) / "ablation.csv");
    WriteTableCsv(csv, table);
  }
  json m = ManifestBase("ablation", s);
  m["datasets"] = splits.datasets;
  m["grid"] = {{"encoders", a.encoders}, {"cells", a.cells}, {"pools", a.pools},
               {"seeds", a.seeds}};
  m["total_runs"] = total_runs;
  m["runs"] = runs;
  json table_json = json::array();
  for (const TableRow& r : table) {
    json row = {{"model", r.model}, {"interaction", r.interaction}, {"ade", r.ade},
                {"fde", r.fde},     {"col1", r.col1},               {"col2", r.col2}};
    if (r.ade_spread) {
      row["ade_spread"] = *r.ade_spread;
      row["fde_spread"] = *r.fde_spread;
      row["col1_spread"] = *r.col1_spread;
      row["col2_spread"] = *r.col2_spread;
    }
    table_json.push_back(row);
  }
  m["metrics"] = {{"split", "val"}, {"aggregate", "median over seeds"}, {"table", table_json},
                  {"comparisons", comparisons}};
  m["wall_clock_seconds"] = SecondsSince(start);
  WriteJsonFile((fs::path(a.out) / "manifest.json").string(), m);
  out << "total runs: " << total_runs << '\n';
  return kExitOk;
}

}  // namespace

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedestrian trajectory forecasting toolkit", "urnn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const std::string data_help = "Scene file (.ndjson, or .csv rows frame,ped_id,x,y)";

  CLI::App* synth = app.add_subcommand("synth", "Generate synthetic interacting scenes");
  Options synth_opts(synth);
  synth_opts.AddSeedFlag();
  SynthArgs synth_args;
  synth->add_option("-n,--count", synth_args.n, "Number of scenes")->required();
  synth->add_option("--first-id", synth_args.first_id, "Id of the first scene");
  synth->add_option("--out", synth_args.out, "Output ndjson file")->required();

  CLI::App* categorize = app.add_subcommand("categorize", "Tag scenes with Types I-IV");
  Options categorize_opts(categorize);
  CategorizeArgs categorize_args;
  categorize->add_option("--data", categorize_args.data, data_help)
      ->required()
      ->check(CLI::ExistingFile);
  categorize->add_option("--out", categorize_args.out, "Annotated ndjson output");

  CLI::App* train = app.add_subcommand("train", "Train one model");
  Options train_opts(train);
  train_opts.AddModelFlags();
  train_opts.AddTrainFlags();
  TrainArgs train_args;
  train->add_option("--data", train_args.data, data_help)->required()->check(CLI::ExistingFile);
  train->add_option("--val", train_args.val, "Validation scenes (default: 80/20 split of --data)")
      ->check(CLI::ExistingFile);
  train->add_option("--out", train_args.out, "Model file to write")->required();
  train->add_flag("--quiet", train_args.quiet, "No per-epoch log");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate models and baselines");
  Options eval_opts(eval);
  EvalArgs eval_args;
  eval->add_option("--data", eval_args.data, data_help)->required()->check(CLI::ExistingFile);
  eval->add_option("--model", eval_args.models, "Model file(s)")
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  eval->add_option("--baseline", eval_args.baselines, "Comma-separated: cv, kalman");
  eval->add_option("--types", eval_args.types, "Restrict to scene types, e.g. III or I,II");
  eval->add_option("--out", eval_args.out, "Table CSV (a manifest is written next to it)");
  eval->add_option("--buckets-out", eval_args.buckets_out, "Per-bucket CSV");

  CLI::App* baseline = app.add_subcommand("baseline", "Evaluate the learning-free baselines");
  Options baseline_opts(baseline);
  EvalArgs baseline_args;
  baseline_args.baselines = "cv,kalman";
  baseline->add_option("--data", baseline_args.data, data_help)
      ->required()
      ->check(CLI::ExistingFile);
  baseline->add_option("--method", baseline_args.baselines, "Comma-separated: cv, kalman");
  baseline->add_option("--types", baseline_args.types, "Restrict to scene types");
  baseline->add_option("--out", baseline_args.out, "Table CSV");

  CLI::App* predict = app.add_subcommand("predict", "Write predicted trajectories");
  Options predict_opts(predict);
  PredictArgs predict_args;
  predict->add_option("--data", predict_args.data, data_help)
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--model", predict_args.model, "Model file")->check(CLI::ExistingFile);
  predict->add_option("--baseline", predict_args.baseline, "cv or kalman");
  predict->add_option("--out", predict_args.out, "Predictions ndjson")->required();

  CLI::App* ablation = app.add_subcommand("ablation", "Train the encoder x cell x pooling grid");
  Options ablation_opts(ablation);
  ablation_opts.AddModelFlags();
  ablation_opts.AddTrainFlags();
  AblationArgs ablation_args;
  ablation->add_option("--data", ablation_args.data, data_help)
      ->required()
      ->check(CLI::ExistingFile);
  ablation->add_option("--val", ablation_args.val, "Validation scenes")->check(CLI::ExistingFile);
  ablation->add_option("--encoders", ablation_args.encoders, "Comma-separated encoder tokens");
  ablation->add_option("--cells", ablation_args.cells, "Comma-separated cell tokens");
  ablation->add_option("--pools", ablation_args.pools, "Comma-separated pooling tokens");
  ablation->add_option("--seeds", ablation_args.seeds, "Seeds per grid cell");
  ablation->add_option("--out", ablation_args.out, "Output directory")->required();
  ablation->add_flag("--quiet", ablation_args.quiet, "No progress log");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return CmdSynth(synth_opts, synth_args, out);
    if (*categorize) return CmdCategorize(categorize_opts, categorize_args, out);
    if (*train) return CmdTrain(train_opts, train_args, out, err);
    if (*eval) return EvaluateAll(eval_opts.Resolve(), eval_args, out, "eval");
    if (*baseline) return EvaluateAll(baseline_opts.Resolve(), baseline_args, out, "baseline");
    if (*predict) return CmdPredict(predict_opts, predict_args, out);
    if (*ablation) return CmdAblation(ablation_opts, ablation_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace urnn::cli
