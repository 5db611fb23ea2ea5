// Copyright 2026 The edgesub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "edgesub/errors.hpp"

namespace edgesub {

// One fully-connected layer. Weights are row-major with one row per output
// neuron: weights[r * cols + c].
struct LayerSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double weight(std::size_t r, std::size_t c) const {
    return weights[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {weights.data() + r * cols, cols};
  }
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A ReLU multilayer perceptron. Every layer except the last applies ReLU;
// the last layer is the (linear) output layer.
struct MlpSpec {
  std::size_t in_dim = 0;
  std::vector<LayerSpec> layers;

  std::size_t depth() const { return layers.size(); }
  std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().rows; }
  // D^(0), D^(1), ..., D^(L).
  std::vector<std::size_t> widths() const;
  std::size_t parameter_count() const;
  std::size_t hidden_neuron_count() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

// Throws InputError if the dimension chain is broken or an entry is not
// finite.
void check_model(const MlpSpec& model);

enum class ModelErrorKind { kParse, kDimensionMismatch, kNonFinite };

class ModelError : public InputError {
 public:
  ModelError(ModelErrorKind kind, const std::string& what, std::size_t layer = 0)
      : InputError(what), kind_(kind), layer_(layer) {}
  ModelErrorKind kind() const { return kind_; }
  // 1-based layer index, 0 when not layer-specific.
  std::size_t layer() const { return layer_; }

 private:
  ModelErrorKind kind_;
  std::size_t layer_;
};

MlpSpec parse_model(const std::string& json_text);
MlpSpec load_model(const std::filesystem::path& path);
std::string model_to_json(const MlpSpec& model);
void save_model(const MlpSpec& model, const std::filesystem::path& path);

// Stateless-seedable xorshift64* stream. Seeds pass through splitmix64 so
// nearby seeds give unrelated streams.
class XorShift64Star {
 public:
  explicit XorShift64Star(std::uint64_t seed);
  std::uint64_t next();
  // Uniform on the open interval (0, 1).
  double uniform_open();

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

// depth hidden layers of `width` neurons followed by an output layer of
// out_dim neurons. Weights and biases of layer l are uniform on
// (-1/sqrt(fan_in), 1/sqrt(fan_in)); each row draws from its own stream keyed
// by (seed, layer, row).
MlpSpec random_model(std::size_t in_dim, std::size_t depth, std::size_t width,
                     std::size_t out_dim, std::uint64_t seed);

// 1-based layer, 0-based neuron index.
struct NeuronRef {
  std::size_t layer = 1;
  std::size_t index = 0;
  friend auto operator<=>(const NeuronRef&, const NeuronRef&) = default;
};

// Global processing order: layer-major, ascending index within a layer.
struct NeuronSchedule {
  std::vector<NeuronRef> order;
  bool include_output = false;

  // All hidden neurons, plus output neurons when include_output is set.
  static NeuronSchedule for_model(const MlpSpec& model, bool include_output);
  // Only the first layer. Used for plain hyperplane arrangements.
  static NeuronSchedule first_layer(const MlpSpec& model);

  std::size_t size() const { return order.size(); }
  // Position of `neuron` in the order; throws InputError if absent.
  std::size_t position(const NeuronRef& neuron) const;
};

void check_schedule(const MlpSpec& model, const NeuronSchedule& schedule);

// Per-layer pre-activations and post-activations. post[l] = max(0, pre[l]) for
// hidden layers; the output layer's post slot equals its pre-activation.
struct PreactivationTrace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  double at(const NeuronRef& n) const { return pre[n.layer - 1][n.index]; }
  std::span<const double> output() const { return post.back(); }
};

PreactivationTrace forward_trace(const MlpSpec& model, std::span<const double> point);
std::vector<double> evaluate(const MlpSpec& model, std::span<const double> point);

// Pre-activation of one neuron at every point of a flat row-major point list.
std::vector<double> batch_preactivation(const MlpSpec& model,
                                        std::span<const double> points,
                                        const NeuronRef& neuron,
                                        unsigned threads = 1);

// The shared kernel: dot(row, x) + bias, accumulated left to right. Every
// evaluation path goes through this so results agree bitwise.
inline double affine(std::span<const double> row, double bias,
                     std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * x[k];
  return acc + bias;
}

// Applies layer `layer` (1-based) to its input. Writes pre-activations and,
// for hidden layers, the rectified output.
void apply_layer(const MlpSpec& model, std::size_t layer,
                 std::span<const double> input, std::span<double> pre,
                 std::span<double> post);

// Gradient of output `output_index` at `point`, using the activation pattern
// observed there.
std::vector<double> output_gradient(const MlpSpec& model,
                                    std::span<const double> point,
                                    std::size_t output_index = 0);

enum class NeuronLabel { kStablyNegative, kStablyPositive, kIntersecting };

const char* to_string(NeuronLabel label);

// labels[l - 1][i] for hidden layer l; the output layer gets no entry unless
// a caller appends one.
using NeuronLabels = std::vector<std::vector<NeuronLabel>>;

NeuronLabels classify_neurons_on_boundary(const MlpSpec& model,
                                          std::span<const double> boundary_vertices);

// Removes every stably-negative hidden neuron: its row and bias in layer l and
// its column in layer l + 1.
MlpSpec prune_stably_negative(const MlpSpec& model, const NeuronLabels& labels);

}  // namespace edgesub
