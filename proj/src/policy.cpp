#include "paycheck/policy.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "paycheck/errors.hpp"
#include "paycheck/kernels.hpp"

namespace paycheck {

namespace {

constexpr int kCheckpointVersion = 1;

}  // namespace

PolicyParams::PolicyParams(int input_dim, const std::vector<int>& hidden, int output_dim,
                           Activation activation)
    : activation_(activation) {
  if (input_dim <= 0 || output_dim <= 0) throw ConfigError("layer widths must be positive");
  std::vector<int> widths{input_dim};
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("hidden widths must be positive", "/architecture/hidden");
    widths.push_back(h);
  }
  widths.push_back(output_dim);
  int offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    LayerShape s{widths[l], widths[l + 1], offset, offset + widths[l] * widths[l + 1]};
    offset = s.bias_offset + s.outputs;
    layers_.push_back(s);
  }
  data_.assign(static_cast<std::size_t>(offset), 0.0);
}

PolicyParams PolicyParams::glorot(int input_dim, const std::vector<int>& hidden, int output_dim,
                                  std::uint64_t seed, Activation activation) {
  PolicyParams p(input_dim, hidden, output_dim, activation);
  std::mt19937_64 rng(seed);
  for (const LayerShape& s : p.layers_) {
    const double a = std::sqrt(6.0 / static_cast<double>(s.inputs + s.outputs));
    std::uniform_real_distribution<double> dist(-a, a);
    for (int i = 0; i < s.inputs * s.outputs; ++i) p.data_[s.weight_offset + i] = dist(rng);
  }
  return p;
}

std::vector<int> PolicyParams::hidden() const {
  std::vector<int> h;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) h.push_back(layers_[l].outputs);
  return h;
}

std::vector<double> PolicyParams::forward(std::span<const double> features) const {
  if (static_cast<int>(features.size()) != input_dim())
    throw ConfigError("policy expects " + std::to_string(input_dim()) + " features, got " +
                      std::to_string(features.size()));
  std::vector<double> x(features.begin(), features.end());
  std::vector<double> y;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    y.resize(s.outputs);
    kernels::affine(data_.data() + s.weight_offset, data_.data() + s.bias_offset, x.data(),
                    s.outputs, s.inputs, y.data());
    if (l + 1 < layers_.size())
      for (double& v : y) v = std::tanh(v);
    x.swap(y);
  }
  std::vector<double> out(x.size());
  kernels::softmax(x.data(), static_cast<int>(x.size()), out.data());
  return out;
}

ad::Var PolicyParams::forward(ad::Tape& tape, ad::Var params, ad::Var features) const {
  if (features.size() != input_dim())
    throw ConfigError("policy expects " + std::to_string(input_dim()) + " features, got " +
                      std::to_string(features.size()));
  if (params.size() != static_cast<int>(data_.size()))
    throw ConfigError("parameter leaf does not match the network");
  ad::Var x = features;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerShape& s = layers_[l];
    x = tape.affine(params, s.weight_offset, s.bias_offset, s.outputs, s.inputs, x);
    if (l + 1 < layers_.size()) x = tape.tanh(x);
  }
  return tape.softmax(x);
}

int feature_count(const PlanLayout& layout, const PolicyArchitecture& arch) {
  const int n_stock = static_cast<int>(layout.stock_goals.size());
  int n = n_stock + 1;
  if (arch.completion_flags) n += n_stock;
  if (arch.observe_rates) n += static_cast<int>(layout.rate_keys.size());
  return n;
}

PolicyParams make_policy(const PlanConfig& plan, const PolicyArchitecture& arch,
                         std::uint64_t seed) {
  const PlanLayout layout(plan);
  return PolicyParams::glorot(feature_count(layout, arch), arch.hidden,
                              static_cast<int>(plan.slot_count()), seed, arch.activation);
}

void write_features(std::span<const double> fractions, int month, int horizon,
                    std::span<const double> monthly_rates, const PolicyArchitecture& arch,
                    std::vector<double>& out) {
  out.assign(fractions.begin(), fractions.end());
  if (arch.completion_flags)
    for (double x : fractions) out.push_back(x == 0.0 ? 1.0 : 0.0);
  out.push_back(horizon > 0 ? static_cast<double>(month) / horizon : 0.0);
  if (arch.observe_rates)
    for (double r : monthly_rates) out.push_back(r * 100.0);
}

Allocation policy_forward(const PolicyParams& params, std::span<const double> features) {
  return Allocation{params.forward(features)};
}

void save_checkpoint(const PolicyParams& params, const PolicyArchitecture& arch,
                     const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "paycheck-policy";
  j["version"] = kCheckpointVersion;
  j["architecture"] = {{"input_dim", params.input_dim()},
                       {"hidden", params.hidden()},
                       {"output_dim", params.output_dim()},
                       {"activation", "tanh"},
                       {"completion_flags", arch.completion_flags},
                       {"observe_rates", arch.observe_rates}};
  j["parameters"] = std::vector<double>(params.data().begin(), params.data().end());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "paycheck-policy")
    throw DataError("checkpoint " + path.string() + " has an unknown format");
  if (j.value("version", 0) != kCheckpointVersion)
    throw DataError("checkpoint version " + std::to_string(j.value("version", 0)) +
                    " is not supported");
  try {
    const auto& a = j.at("architecture");
    if (a.at("activation").get<std::string>() != "tanh")
      throw DataError("unsupported activation in checkpoint");
    Checkpoint c;
    c.architecture.hidden = a.at("hidden").get<std::vector<int>>();
    c.architecture.completion_flags = a.at("completion_flags").get<bool>();
    c.architecture.observe_rates = a.at("observe_rates").get<bool>();
    c.params = PolicyParams(a.at("input_dim").get<int>(), c.architecture.hidden,
                            a.at("output_dim").get<int>());
    auto values = j.at("parameters").get<std::vector<double>>();
    if (values.size() != c.params.size())
      throw DataError("checkpoint parameter count does not match its architecture");
    std::copy(values.begin(), values.end(), c.params.data().begin());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace paycheck
