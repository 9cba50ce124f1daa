#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "readkit/nn/train.hpp"

namespace readkit::nn {

struct GradCheckConfig {
  double epsilon = 1e-5;
  int coords_per_param = 4;
  std::uint64_t seed = 0;
  int epoch = 0;
  // Mutation fixture: flips the analytic gradient sign on regression-head
  // parameters so the comparison must fail.
  bool corrupt_head_sign = false;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::int64_t coords_checked = 0;
  std::string worst_param;
};

// Central finite differences against tape gradients of the composite loss,
// dropout off. Relative error uses an absolute fallback when both analytic
// and numeric values sit below 1e-8.
GradCheckResult gradient_check(Model& model, const std::vector<TrainExample>& batch,
                               const GradCheckConfig& cfg = {});

}  // namespace readkit::nn
