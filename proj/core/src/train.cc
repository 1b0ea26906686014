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

#include "urnn/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "urnn/optim.h"

namespace urnn {
namespace {

struct ChunkResult {
  std::unique_ptr<Graph> graph;
  double loss = 0.0;
  size_t count = 0;
};

// Forward pass and loss of one chunk; the backward pass runs once the
// batch-wide point count is known.
void RunChunk(ForecastModel& model, std::span<const PreparedScene* const> scenes,
              ChunkResult& out, Var& root) {
  out.graph = std::make_unique<Graph>();
  const ModelVars vars = BindModel(*out.graph, model, true);
  const Rollout rollout = ForwardBatch(*out.graph, vars, scenes);
  const LossSum loss = RolloutLoss(*out.graph, rollout, model.config().loss, scenes);
  out.loss = loss.total.value()[0];
  out.count = loss.count;
  root = loss.total;
}

}  // namespace

void TrainSchedule::Validate() const {
  if (!(lr > 0)) throw Error("lr must be positive");
  if (plateau_patience < 1 || early_stop_patience < 1) throw Error("patience must be >= 1");
  if (!(decay_factor > 0 && decay_factor < 1)) throw Error("decay_factor must be in (0, 1)");
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (!(clip_norm > 0)) throw Error("clip_norm must be positive");
  if (jobs < 1) throw Error("jobs must be >= 1");
}

TrainResult Train(ForecastModel& model, std::span<const PreparedScene> train,
                  std::span<const PreparedScene> val, const TrainSchedule& schedule,
                  const EpochCallback& on_epoch) {
  schedule.Validate();
  TrainResult result;
  if (schedule.max_epochs == 0) return result;
  if (train.empty() || val.empty()) throw Error("train: empty training or validation split");
  std::map<int64_t, std::vector<const PreparedScene*>> by_id;
  for (const auto& s : train) by_id[s.scene_id].push_back(&s);
  for (const auto& s : val) {
    auto it = by_id.find(s.scene_id);
    if (it == by_id.end()) continue;
    for (const PreparedScene* t : it->second) {
      if (t->positions == s.positions) {
        throw Error("train: scene " + std::to_string(s.scene_id) +
                    " appears in both training and validation splits");
      }
    }
  }

  const std::vector<Parameter*> params = model.Parameters();
  AdamState adam(params, {.lr = schedule.lr});
  Rng rng(schedule.seed);
  const size_t jobs = schedule.deterministic ? 1 : schedule.jobs;

  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Tensor> best;
  double best_val = std::numeric_limits<double>::infinity();
  size_t since_best = 0;
  size_t since_decay = 0;

  for (size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
    rng.Shuffle(order);
    double train_sum = 0.0;
    size_t train_count = 0;
    for (size_t begin = 0; begin < order.size(); begin += schedule.batch_size) {
      const size_t end = std::min(order.size(), begin + schedule.batch_size);
      std::vector<PreparedScene> rotated;
      std::vector<const PreparedScene*> batch;
      rotated.reserve(end - begin);
      for (size_t i = begin; i < end; ++i) {
        const PreparedScene& scene = train[order[i]];
        if (schedule.augment) {
          const double theta = rng.Uniform(0.0, 2.0 * M_PI);
          rotated.push_back(RotatePrepared(scene, theta, PreparedCentroid(scene)));
          batch.push_back(&rotated.back());
        } else {
          batch.push_back(&scene);
        }
      }

      const size_t chunks = std::min(jobs, batch.size());
      std::vector<ChunkResult> parts(chunks);
      std::vector<Var> roots(chunks);
      auto chunk_span = [&](size_t c) {
        const size_t lo = batch.size() * c / chunks;
        const size_t hi = batch.size() * (c + 1) / chunks;
        return std::span<const PreparedScene* const>(batch.data() + lo, hi - lo);
      };
      auto run = [&](size_t c, auto&& body) {
        if (chunks == 1) {
          body(c);
          return;
        }
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(chunks);
        for (size_t k = 0; k < chunks; ++k) {
          pool.emplace_back([&, k] {
            try {
              body(k);
            } catch (...) {
              errors[k] = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      };
      run(0, [&](size_t c) { RunChunk(model, chunk_span(c), parts[c], roots[c]); });
      size_t count = 0;
      for (const auto& p : parts) count += p.count;
      if (count == 0) continue;
      const Scalar inv = Scalar(1) / static_cast<Scalar>(count);
      run(0, [&](size_t c) { parts[c].graph->Backward(Scale(roots[c], inv), false); });

      for (Parameter* p : params) p->ZeroGrad();
      for (const auto& p : parts) {
        p.graph->AccumulateParamGrads();
        train_sum += p.loss;
      }
      train_count += count;
      ClipGradNorm(params, schedule.clip_norm);
      AdamStep(adam, params);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_count ? train_sum / static_cast<double>(train_count) : 0.0;
    record.val_loss = EvaluateLoss(model, val);
    record.lr = adam.options().lr;
    if (!std::isfinite(record.val_loss)) throw NumericalError("validation loss is not finite");
    if (record.val_loss < best_val) {
      best_val = record.val_loss;
      record.improved = true;
      result.best_epoch = epoch;
      since_best = 0;
      since_decay = 0;
      if (schedule.restore_best) {
        best.clear();
        for (const Parameter* p : params) best.push_back(p->value);
      }
    } else {
      ++since_best;
      if (++since_decay >= schedule.plateau_patience) {
        adam.set_lr(adam.options().lr * schedule.decay_factor);
        since_decay = 0;
      }
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (since_best >= schedule.early_stop_patience) {
      result.stopped_early = true;
      break;
    }
  }
  result.best_val_loss = best_val;
  if (schedule.restore_best && !best.empty()) {
    for (size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  }
  for (Parameter* p : params) p->grad.reset();
  return result;
}

}  // namespace urnn
