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

#ifndef URNN_TRAIN_H_
#define URNN_TRAIN_H_

#include <functional>
#include <span>
#include <vector>

#include "urnn/model.h"

namespace urnn {

struct TrainSchedule {
  size_t max_epochs = 100;
  double lr = 1e-3;
  // Epochs without validation improvement before the learning rate is
  // multiplied by decay_factor.
  size_t plateau_patience = 5;
  double decay_factor = 0.5;
  // Epochs without validation improvement before training stops.
  size_t early_stop_patience = 15;
  size_t batch_size = 8;  // scenes per optimizer step
  bool augment = true;    // random rotation per scene per epoch
  uint64_t seed = 1;
  double clip_norm = 10.0;
  // Worker threads per batch. Gradients are always reduced in chunk order;
  // deterministic mode forces a single chunk.
  size_t jobs = 1;
  bool deterministic = false;
  // Return the parameters of the best-validation epoch.
  bool restore_best = true;

  // Throws Error when a field is out of range.
  void Validate() const;
};

struct EpochRecord {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  size_t best_epoch = 0;  // 0 when no epoch ran
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Seeded minibatch training with rotation augmentation, plateau learning
// rate decay and early stopping on the validation loss. Throws Error on
// empty or overlapping splits.
TrainResult Train(ForecastModel& model, std::span<const PreparedScene> train,
                  std::span<const PreparedScene> val, const TrainSchedule& schedule,
                  const EpochCallback& on_epoch = {});

}  // namespace urnn

#endif  // URNN_TRAIN_H_
