#pragma once

#include <span>
#include <vector>

namespace paycheck {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step = 0;

  AdamState() = default;
  AdamState(std::size_t parameters, AdamConfig cfg)
      : config(cfg), first_moment(parameters, 0.0), second_moment(parameters, 0.0) {}
};

// One ADAM update that *increases* the objective whose gradient is `grad`
// (descent on the negated objective). Throws TrainingError on a non-finite
// gradient entry, using state.step as the iteration index; params and state
// are left untouched in that case.
void adam_ascent_step(std::span<double> params, std::span<const double> grad, AdamState& state);

}  // namespace paycheck
