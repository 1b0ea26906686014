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

#ifndef URNN_MODEL_H_
#define URNN_MODEL_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urnn/encoders.h"
#include "urnn/pooling.h"
#include "urnn/predictor.h"

namespace urnn {

enum class LossKind { kL2, kGaussianNll };
// Tokens: l2, nll.
std::string_view ToString(LossKind kind);
LossKind ParseLossKind(std::string_view token);

struct ModelConfig {
  CellKind cell = CellKind::kLstm;
  EncoderVariant encoder = EncoderVariant::kU;
  PoolingKind pooling = PoolingKind::kDirectional;
  size_t e_dim = 32;
  size_t hidden_dim = 128;
  size_t pool_dim = 256;
  GridSpec grid;
  LossKind loss = LossKind::kL2;
  size_t obs_len = 9;
  size_t pred_len = 12;

  // Throws Error on an unusable configuration.
  void Validate() const;
  bool operator==(const ModelConfig& o) const;
};

// "U-LSTM - LSTM" style label: encoder family and decoder cell.
std::string ModelLabel(const ModelConfig& config);
// "Directional", "Occupancy", "Social", "None".
std::string PoolingLabel(PoolingKind kind);

// Output width of the head: 2 (velocity) for L2, 5 (mean, log sigmas,
// correlation) for the Gaussian likelihood.
size_t HeadWidth(LossKind loss);

class ForecastModel {
 public:
  // Fresh parameters drawn from `seed`.
  static ForecastModel Create(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  // Hidden width of the decoder; equals the encoding width.
  size_t decoder_dim() const { return encoder_.EncodingDim(); }

  // Canonical order: embedding, encoder, pooling, decoder, head.
  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;
  size_t ParameterCount() const;
  // Throws IntegrityError when a name is unknown or a shape disagrees.
  Parameter& FindParameter(const std::string& name);

  EmbeddingParams& embedding() { return embedding_; }
  EncoderParams& encoder() { return encoder_; }
  PoolingParams& pooling() { return pooling_; }
  CellParams& decoder() { return decoder_; }
  Parameter& head_weight() { return head_weight_; }
  Parameter& head_bias() { return head_bias_; }

 private:
  ModelConfig config_;
  EmbeddingParams embedding_;
  EncoderParams encoder_;
  PoolingParams pooling_;
  CellParams decoder_;
  Parameter head_weight_;  // decoder_dim x HeadWidth
  Parameter head_bias_;
};

// Model weights recorded into one graph.
struct ModelVars {
  const ModelConfig* config;
  EmbeddingVars embedding;
  EncoderVars encoder;
  PoolingVars pooling;
  CellVars decoder;
  Var head_weight;
  Var head_bias;
};

ModelVars BindModel(Graph& graph, ForecastModel& model, bool trainable);

// Rolled-out predictions of a batch of scenes stacked row-wise. Every scene
// is expressed in its own local frame whose origin is the primary's last
// observed position.
struct Rollout {
  std::vector<std::pair<size_t, size_t>> groups;  // rows of each scene
  std::vector<Vec2> origins;                       // one per scene
  std::vector<Vec2> last_observed;                 // absolute, one per row
  Var initial_hidden;                              // decoder h_1 (rows x dim)
  Var encoding;                                    // encoder output
  std::vector<Var> positions;                      // per step, rows x 2, local
  std::vector<Var> steps;                          // per step, rows x 2
  std::vector<Var> spreads;                        // per step, rows x 3 (NLL only)

  size_t rows() const { return groups.empty() ? 0 : groups.back().second; }
};

// Encodes every pedestrian's observed velocities, initializes its decoder
// from its encoding and rolls all pedestrians out jointly for pred_len
// steps. No teacher forcing: each step consumes the previous predictions.
Rollout ForwardBatch(Graph& graph, const ModelVars& vars,
                     std::span<const PreparedScene* const> scenes);

// Absolute predicted positions of every scene in the batch.
std::vector<ScenePrediction> ExtractPredictions(const Rollout& rollout);

ScenePrediction ForwardScene(ForecastModel& model, const PreparedScene& scene);

// Sum of per-point losses and the number of points it covers.
struct LossSum {
  Var total;
  size_t count = 0;
};

// Squared Euclidean error summed over (row, step) pairs whose mask is set.
// truth[t] is rows x 2; mask[t] holds one 0/1 entry per row.
LossSum L2LossSum(Graph& graph, std::span<const Var> predicted, std::span<const Tensor> truth,
                  std::span<const std::vector<bool>> mask);

// Bivariate Gaussian negative log-likelihood with means `predicted` and
// spreads (log sigma_x, log sigma_y, raw correlation) per row; the
// correlation is 0.99 * tanh(raw).
LossSum GaussianNllSum(Graph& graph, std::span<const Var> predicted,
                       std::span<const Var> spreads, std::span<const Tensor> truth,
                       std::span<const std::vector<bool>> mask);

// Training objective of a rollout against the scenes' ground truth, in the
// same local frames. Throws NumericalError on non-finite inputs or loss.
LossSum RolloutLoss(Graph& graph, const Rollout& rollout, LossKind kind,
                    std::span<const PreparedScene* const> scenes);

// Mean per-point loss of a set of scenes without recording gradients.
double EvaluateLoss(ForecastModel& model, std::span<const PreparedScene> scenes,
                    size_t batch_size = 64);

class ModelPredictor : public Predictor {
 public:
  // The model must outlive the predictor.
  explicit ModelPredictor(ForecastModel& model, size_t batch_size = 64)
      : model_(model), batch_size_(batch_size) {}
  std::string name() const override { return ModelLabel(model_.config()); }
  std::string interaction() const override { return PoolingLabel(model_.config().pooling); }
  ScenePrediction Predict(const PreparedScene& scene) override;
  std::vector<ScenePrediction> PredictBatch(std::span<const PreparedScene> scenes) override;

 private:
  ForecastModel& model_;
  size_t batch_size_;
};

}  // namespace urnn

#endif  // URNN_MODEL_H_
