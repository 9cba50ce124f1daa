#include "readkit/nn/train.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "readkit/corpus.hpp"

namespace readkit::nn {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw Error("learning_rate must be positive");
  if (warmup_steps < 0) throw Error("warmup_steps must be non-negative");
  if (epochs <= 0) throw Error("epochs must be positive");
  if (batch_size <= 0) throw Error("batch_size must be positive");
  if (weight_decay < 0.0) throw Error("weight_decay must be non-negative");
  if (clip_norm <= 0.0) throw Error("clip_norm must be positive");
}

double dynamic_weight(int epoch) {
  if (epoch < 0) throw Error("epoch must be non-negative");
  const int steps = std::min(epoch / 3, 8);
  return static_cast<double>(8 + steps) / 20.0;
}

LossBreakdown composite_loss(double ce, double mse, double class_ce, int epoch) {
  LossBreakdown b;
  b.ce_loss = ce;
  b.mse_loss = mse;
  b.class_loss = class_ce;
  b.w_yod = dynamic_weight(epoch);
  b.class_weight = 4.0;
  b.total = ce + b.w_yod * mse + 4.0 * class_ce;
  return b;
}

double lr_schedule(std::int64_t step, std::int64_t total_steps, const TrainConfig& cfg) {
  if (step < 0 || total_steps <= 0) throw Error("invalid schedule position");
  const auto warmup = static_cast<std::int64_t>(cfg.warmup_steps);
  if (warmup > 0 && step < warmup) {
    return cfg.learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
  }
  if (total_steps <= warmup) return cfg.learning_rate;
  const double progress =
      std::clamp(static_cast<double>(step - warmup) /
                     static_cast<double>(total_steps - warmup),
                 0.0, 1.0);
  return cfg.learning_rate * 0.5 * (1.0 + std::cos(progress * M_PI));
}

std::string step_stats_to_json_line(const StepStats& s) {
  nlohmann::json line = {{"step", s.step},
                         {"epoch", s.epoch},
                         {"ce", s.loss.ce_loss},
                         {"mse", s.loss.mse_loss},
                         {"class", s.loss.class_loss},
                         {"w_yod", s.loss.w_yod},
                         {"total", s.loss.total},
                         {"lr", s.lr},
                         {"grad_norm", s.grad_norm}};
  return line.dump();
}

void AdamW::apply(ParameterRegistry& params, double lr) {
  ++t_;
  const double bias1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (const auto& p : params.all()) {
    p->m = cfg_.beta1 * p->m + (1.0 - cfg_.beta1) * p->grad;
    p->v = (cfg_.beta2 * p->v.array() +
            (1.0 - cfg_.beta2) * p->grad.array().square())
               .matrix();
    const Mat m_hat = p->m / bias1;
    const Mat v_hat = p->v / bias2;
    p->value.array() -=
        lr * m_hat.array() / (v_hat.array().sqrt() + cfg_.epsilon);
    if (p->decay) p->value *= (1.0 - lr * cfg_.weight_decay);
  }
}

BatchGraph build_batch_loss(Tape& t, const Model& model,
                            const std::vector<TrainExample>& batch, int epoch,
                            bool training, std::uint64_t* dropout_state) {
  if (batch.empty()) throw Error("empty training batch");
  Node* ce_sum = nullptr;
  Node* mse_sum = nullptr;
  Node* cls_sum = nullptr;
  for (const auto& ex : batch) {
    if (ex.level < 1 || ex.level > 16) throw UnknownLevelError(ex.level);
    std::vector<int> dec_input = {ControlVocab::kBosId};
    dec_input.insert(dec_input.end(), ex.tgt_ids.begin(), ex.tgt_ids.end());
    std::vector<int> labels = ex.tgt_ids;
    labels.push_back(ControlVocab::kEosId);

    auto g = model.forward(t, ex.src_ids, dec_input, training, dropout_state);
    Node* ce = t.cross_entropy_rows(g.dec_logits, labels);
    Node* mse = t.mse_scalar(g.reg_score, static_cast<double>(ex.level));
    Node* cls = t.cross_entropy_rows(g.cls_logits, {ex.level - 1});

    ce_sum = ce_sum ? t.add(ce_sum, ce) : ce;
    mse_sum = mse_sum ? t.add(mse_sum, mse) : mse;
    cls_sum = cls_sum ? t.add(cls_sum, cls) : cls;
  }
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Node* ce_mean = t.scale(ce_sum, inv_b);
  Node* mse_mean = t.scale(mse_sum, inv_b);
  Node* cls_mean = t.scale(cls_sum, inv_b);

  BatchGraph out;
  out.breakdown = composite_loss(ce_mean->value(0, 0), mse_mean->value(0, 0),
                                 cls_mean->value(0, 0), epoch);
  out.total = t.add(t.add(ce_mean, t.scale(mse_mean, out.breakdown.w_yod)),
                    t.scale(cls_mean, 4.0));
  return out;
}

LossBreakdown batch_loss(const Model& model, const std::vector<TrainExample>& batch,
                         int epoch) {
  Tape t;
  return build_batch_loss(t, model, batch, epoch, /*training=*/false, nullptr)
      .breakdown;
}

Trainer::Trainer(Model& model, const TrainConfig& cfg, std::int64_t total_steps)
    : model_(model),
      cfg_(cfg),
      optimizer_(cfg),
      total_steps_(total_steps),
      dropout_state_(cfg.seed ^ 0xD1B5'4A32'D192'ED03ULL) {
  cfg_.validate();
  if (total_steps_ <= 0) throw Error("total_steps must be positive");
}

StepStats Trainer::train_step(const std::vector<TrainExample>& batch, int epoch) {
  model_.params().zero_grads();
  Tape t;
  auto graph = build_batch_loss(t, model_, batch, epoch, /*training=*/true,
                                &dropout_state_);
  if (!std::isfinite(graph.breakdown.total)) {
    throw NonFiniteLossError("step " + std::to_string(step_));
  }
  t.backward(graph.total);

  double norm_sq = 0.0;
  for (const auto& p : model_.params().all()) {
    norm_sq += p->grad.squaredNorm();
  }
  const double grad_norm = std::sqrt(norm_sq);
  if (!std::isfinite(grad_norm)) {
    throw NonFiniteLossError("gradient norm at step " + std::to_string(step_));
  }
  if (grad_norm > cfg_.clip_norm) {
    const double scale = cfg_.clip_norm / grad_norm;
    for (const auto& p : model_.params().all()) p->grad *= scale;
  }

  const double lr = lr_schedule(step_, total_steps_, cfg_);
  optimizer_.apply(model_.params(), lr);

  StepStats stats;
  stats.step = step_;
  stats.epoch = epoch;
  stats.loss = graph.breakdown;
  stats.lr = lr;
  stats.grad_norm = grad_norm;
  ++step_;
  return stats;
}

TrainRunResult run_training(Model& model, const std::vector<TrainExample>& examples,
                            const std::array<double, 16>& level_weights,
                            const TrainConfig& cfg,
                            const std::function<void(const StepStats&)>& on_step) {
  cfg.validate();
  if (examples.empty()) throw Error("no training examples");

  std::vector<double> example_weights;
  example_weights.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.level < 1 || ex.level > 16) throw UnknownLevelError(ex.level);
    example_weights.push_back(level_weights[static_cast<std::size_t>(ex.level - 1)]);
  }
  corpus::WeightedSampler sampler(example_weights, cfg.seed);

  TrainRunResult result;
  result.steps_per_epoch = static_cast<std::int64_t>(
      (examples.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
      static_cast<std::size_t>(cfg.batch_size));
  if (result.steps_per_epoch == 0) result.steps_per_epoch = 1;
  result.total_steps = result.steps_per_epoch * cfg.epochs;

  Trainer trainer(model, cfg, result.total_steps);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::int64_t s = 0; s < result.steps_per_epoch; ++s) {
      std::vector<TrainExample> batch;
      batch.reserve(static_cast<std::size_t>(cfg.batch_size));
      for (int b = 0; b < cfg.batch_size; ++b) {
        batch.push_back(examples[sampler.draw()]);
      }
      auto stats = trainer.train_step(batch, epoch);
      if (on_step) on_step(stats);
      result.steps.push_back(stats);
    }
  }
  return result;
}

}  // namespace readkit::nn
