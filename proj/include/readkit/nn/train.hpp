#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "readkit/nn/model.hpp"

namespace readkit::nn {

struct TrainConfig {
  double learning_rate = 1e-5;
  int warmup_steps = 500;
  int epochs = 11;
  int batch_size = 8;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

// Regression-loss coefficient: 0.4, stepping up 0.05 every 3 epochs, capped
// at 0.8. Integer arithmetic so the plateau values are exact doubles.
double dynamic_weight(int epoch);

struct LossBreakdown {
  double ce_loss = 0.0;
  double mse_loss = 0.0;
  double class_loss = 0.0;
  double w_yod = 0.0;
  double class_weight = 4.0;
  double total = 0.0;
};

LossBreakdown composite_loss(double ce, double mse, double class_ce, int epoch);

// Linear warmup to cfg.learning_rate, then cosine decay to 0 at total_steps.
double lr_schedule(std::int64_t step, std::int64_t total_steps, const TrainConfig& cfg);

struct TrainExample {
  std::vector<int> src_ids;  // control token already prepended
  std::vector<int> tgt_ids;  // summary tokens without bos/eos
  int level = 1;             // [1,16]
};

struct StepStats {
  std::int64_t step = 0;
  int epoch = 0;
  LossBreakdown loss;
  double lr = 0.0;
  double grad_norm = 0.0;  // global norm before clipping
};

std::string step_stats_to_json_line(const StepStats& s);

class AdamW {
 public:
  explicit AdamW(const TrainConfig& cfg) : cfg_(cfg) {}
  // One decoupled-weight-decay adaptive-moment update from the accumulated
  // gradients.
  void apply(ParameterRegistry& params, double lr);
  std::int64_t updates_applied() const { return t_; }

 private:
  TrainConfig cfg_;
  std::int64_t t_ = 0;
};

struct BatchGraph {
  LossBreakdown breakdown;
  Node* total = nullptr;
};

// Mean ce/mse/class losses over the batch composed into the weighted total.
// Teacher forcing: decoder input is bos + target, labels are target + eos.
BatchGraph build_batch_loss(Tape& t, const Model& model,
                            const std::vector<TrainExample>& batch, int epoch,
                            bool training, std::uint64_t* dropout_state);

// Loss evaluation without any parameter update.
LossBreakdown batch_loss(const Model& model, const std::vector<TrainExample>& batch,
                         int epoch);

class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& cfg, std::int64_t total_steps);

  // Returns the pre-update loss breakdown; throws NonFiniteLossError.
  StepStats train_step(const std::vector<TrainExample>& batch, int epoch);
  std::int64_t step() const { return step_; }

 private:
  Model& model_;
  TrainConfig cfg_;
  AdamW optimizer_;
  std::int64_t total_steps_;
  std::int64_t step_ = 0;
  std::uint64_t dropout_state_;
};

struct TrainRunResult {
  std::vector<StepStats> steps;
  std::int64_t steps_per_epoch = 0;
  std::int64_t total_steps = 0;
};

// Epoch loop with weighted with-replacement batch sampling; level_weights
// index l-1 weights examples of level l. on_step may be null.
TrainRunResult run_training(Model& model, const std::vector<TrainExample>& examples,
                            const std::array<double, 16>& level_weights,
                            const TrainConfig& cfg,
                            const std::function<void(const StepStats&)>& on_step);

}  // namespace readkit::nn
