#include "paycheck/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "paycheck/errors.hpp"

namespace paycheck {

void adam_ascent_step(std::span<double> params, std::span<const double> grad, AdamState& state) {
  if (params.size() != grad.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size())
    throw std::invalid_argument("adam: parameter, gradient and moment sizes differ");
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw TrainingError("non-finite gradient at parameter " + std::to_string(i),
                          static_cast<int>(state.step));

  const AdamConfig& c = state.config;
  ++state.step;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = -grad[i];  // loss = -objective
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace paycheck
