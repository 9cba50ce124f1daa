#include "readkit/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace readkit::nn {

GradCheckResult gradient_check(Model& model, const std::vector<TrainExample>& batch,
                               const GradCheckConfig& cfg) {
  model.params().zero_grads();
  {
    Tape t;
    auto graph = build_batch_loss(t, model, batch, cfg.epoch, /*training=*/false,
                                  nullptr);
    t.backward(graph.total);
  }

  std::vector<std::pair<std::string, Mat>> analytic;
  for (const auto& p : model.params().all()) {
    analytic.emplace_back(p->name, p->grad);
  }

  auto loss_at = [&]() {
    return batch_loss(model, batch, cfg.epoch).total;
  };

  GradCheckResult result;
  std::uint64_t state = cfg.seed ^ 0x6C62'272E'07BB'0142ULL;
  std::size_t param_index = 0;
  for (const auto& p : model.params().all()) {
    const Mat& grad = analytic[param_index++].second;
    const auto size = static_cast<std::int64_t>(p->value.size());
    const auto coords =
        std::min<std::int64_t>(cfg.coords_per_param, size);
    for (std::int64_t c = 0; c < coords; ++c) {
      const auto flat = static_cast<Eigen::Index>(splitmix64(state) %
                                                  static_cast<std::uint64_t>(size));
      const Eigen::Index i = flat / p->value.cols();
      const Eigen::Index j = flat % p->value.cols();

      const double saved = p->value(i, j);
      p->value(i, j) = saved + cfg.epsilon;
      const double loss_plus = loss_at();
      p->value(i, j) = saved - cfg.epsilon;
      const double loss_minus = loss_at();
      p->value(i, j) = saved;

      const double numeric = (loss_plus - loss_minus) / (2.0 * cfg.epsilon);
      double analytic_value = grad(i, j);
      if (cfg.corrupt_head_sign && p->name.rfind("reg.", 0) == 0) {
        analytic_value = -analytic_value;
      }

      const double denom = std::max(std::abs(analytic_value), std::abs(numeric));
      const double err = (denom < 1e-8)
                             ? std::abs(analytic_value - numeric)
                             : std::abs(analytic_value - numeric) / denom;
      ++result.coords_checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = p->name;
      }
    }
  }
  return result;
}

}  // namespace readkit::nn
