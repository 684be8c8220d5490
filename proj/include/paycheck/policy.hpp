#pragma once

// Feed-forward allocation policy: tanh hidden layers and a softmax head over
// the goal slots plus the residual slot.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "paycheck/autodiff.hpp"
#include "paycheck/goals.hpp"

namespace paycheck {

enum class Activation { kTanh };

struct PolicyArchitecture {
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::kTanh;
  // Append a 0/1 "goal complete" flag per stock goal to the features.
  bool completion_flags = true;
  // Append the current monthly rates (x100) to the features.
  bool observe_rates = false;

  bool operator==(const PolicyArchitecture&) const = default;
};

struct LayerShape {
  int inputs = 0;
  int outputs = 0;
  int weight_offset = 0;  // row-major outputs x inputs
  int bias_offset = 0;

  bool operator==(const LayerShape&) const = default;
};

class PolicyParams {
 public:
  PolicyParams() = default;
  // Zero-initialized network with the given layer widths.
  PolicyParams(int input_dim, const std::vector<int>& hidden, int output_dim,
               Activation activation = Activation::kTanh);

  // Glorot-uniform weights in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static PolicyParams glorot(int input_dim, const std::vector<int>& hidden, int output_dim,
                             std::uint64_t seed, Activation activation = Activation::kTanh);

  int input_dim() const { return layers_.empty() ? 0 : layers_.front().inputs; }
  int output_dim() const { return layers_.empty() ? 0 : layers_.back().outputs; }
  std::vector<int> hidden() const;
  Activation activation() const { return activation_; }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  // Softmax probabilities. Throws ConfigError on a feature-length mismatch.
  std::vector<double> forward(std::span<const double> features) const;
  // Same computation recorded on a tape; `params` must be a leaf holding data().
  ad::Var forward(ad::Tape& tape, ad::Var params, ad::Var features) const;

  bool operator==(const PolicyParams&) const = default;

 private:
  std::vector<LayerShape> layers_;
  std::vector<double> data_;
  Activation activation_ = Activation::kTanh;
};

// Number of policy inputs for a plan: one per stock goal, optionally one
// completion flag per stock goal, t/T, and optionally one per rate key.
int feature_count(const PlanLayout& layout, const PolicyArchitecture& arch);

PolicyParams make_policy(const PlanConfig& plan, const PolicyArchitecture& arch, std::uint64_t seed);

// Features: stock fractions in layout order, completion flags (1 where the
// fraction is exactly 0), month / horizon, then the monthly rates scaled by
// 100 when observed.
void write_features(std::span<const double> fractions, int month, int horizon,
                    std::span<const double> monthly_rates, const PolicyArchitecture& arch,
                    std::vector<double>& out);

Allocation policy_forward(const PolicyParams& params, std::span<const double> features);

// Versioned JSON checkpoint with an architecture header.
void save_checkpoint(const PolicyParams& params, const PolicyArchitecture& arch,
                     const std::filesystem::path& path);
struct Checkpoint {
  PolicyParams params;
  PolicyArchitecture architecture;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace paycheck
