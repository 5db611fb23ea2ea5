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

#include "edgesub/model.hpp"

#include "edgesub/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgesub/parallel.hpp"
#include "json.hpp"

namespace edgesub {

using nlohmann::json;

std::vector<std::size_t> MlpSpec::widths() const {
  std::vector<std::size_t> w{in_dim};
  for (const auto& layer : layers) w.push_back(layer.rows);
  return w;
}

std::size_t MlpSpec::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::size_t MlpSpec::hidden_neuron_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) n += layers[l].rows;
  return n;
}

void check_model(const MlpSpec& model) {
  if (model.in_dim == 0)
    throw ModelError(ModelErrorKind::kDimensionMismatch, "in_dim must be positive");
  if (model.layers.empty())
    throw ModelError(ModelErrorKind::kDimensionMismatch, "model has no layers");
  std::size_t prev = model.in_dim;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const std::string where = "layer " + std::to_string(l + 1);
    if (layer.rows == 0)
      throw ModelError(ModelErrorKind::kDimensionMismatch, where + " has no neurons", l + 1);
    if (layer.cols != prev || layer.weights.size() != layer.rows * layer.cols)
      throw ModelError(ModelErrorKind::kDimensionMismatch,
                       where + ": weight matrix must be " + std::to_string(layer.rows) +
                           "x" + std::to_string(prev),
                       l + 1);
    if (layer.bias.size() != layer.rows)
      throw ModelError(ModelErrorKind::kDimensionMismatch,
                       where + ": bias length " + std::to_string(layer.bias.size()) +
                           " != " + std::to_string(layer.rows) + " rows",
                       l + 1);
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite))
      throw ModelError(ModelErrorKind::kNonFinite, where + " has a non-finite entry", l + 1);
    prev = layer.rows;
  }
}

namespace {

double read_number(const json& v, std::size_t layer) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "NaN" || s == "nan" || s == "Infinity" || s == "-Infinity" || s == "inf" ||
        s == "-inf")
      throw ModelError(ModelErrorKind::kNonFinite,
                       "layer " + std::to_string(layer) + " has a non-finite entry", layer);
  }
  throw ModelError(ModelErrorKind::kParse,
                   "layer " + std::to_string(layer) + ": expected a number", layer);
}

bool mentions_non_finite(const std::string& text) {
  for (const char* token : {"NaN", "nan", "Infinity", "inf"}) {
    if (text.find(token) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

MlpSpec parse_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // Bare NaN/Infinity tokens are not JSON but are what most writers emit.
    if (mentions_non_finite(json_text))
      throw ModelError(ModelErrorKind::kNonFinite,
                       std::string("non-finite number in model: ") + e.what());
    throw ModelError(ModelErrorKind::kParse, e.what());
  }
  if (!doc.is_object() || !doc.contains("in_dim") || !doc.contains("layers") ||
      !doc["layers"].is_array())
    throw ModelError(ModelErrorKind::kParse, "model must be {\"in_dim\": D, \"layers\": [...]}");
  if (!doc["in_dim"].is_number_unsigned())
    throw ModelError(ModelErrorKind::kParse, "in_dim must be a positive integer");

  MlpSpec model;
  model.in_dim = doc["in_dim"].get<std::size_t>();
  std::size_t l = 0;
  for (const auto& jl : doc["layers"]) {
    ++l;
    if (!jl.is_object() || !jl.contains("weights") || !jl.contains("bias") ||
        !jl["weights"].is_array() || !jl["bias"].is_array())
      throw ModelError(ModelErrorKind::kParse,
                       "layer " + std::to_string(l) + " needs \"weights\" and \"bias\" arrays", l);
    LayerSpec layer;
    layer.rows = jl["weights"].size();
    layer.cols = layer.rows == 0 ? 0 : jl["weights"][0].size();
    for (const auto& row : jl["weights"]) {
      if (!row.is_array())
        throw ModelError(ModelErrorKind::kParse,
                         "layer " + std::to_string(l) + ": weight rows must be arrays", l);
      if (row.size() != layer.cols)
        throw ModelError(ModelErrorKind::kDimensionMismatch,
                         "layer " + std::to_string(l) + ": ragged weight matrix", l);
      for (const auto& v : row) layer.weights.push_back(read_number(v, l));
    }
    for (const auto& v : jl["bias"]) layer.bias.push_back(read_number(v, l));
    model.layers.push_back(std::move(layer));
  }
  check_model(model);
  return model;
}

MlpSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError(ModelErrorKind::kParse, "cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string model_to_json(const MlpSpec& model) {
  json doc;
  doc["in_dim"] = model.in_dim;
  doc["layers"] = json::array();
  for (const auto& layer : model.layers) {
    json jl;
    jl["weights"] = json::array();
    for (std::size_t r = 0; r < layer.rows; ++r) {
      auto row = layer.row(r);
      jl["weights"].push_back(std::vector<double>(row.begin(), row.end()));
    }
    jl["bias"] = layer.bias;
    doc["layers"].push_back(std::move(jl));
  }
  return doc.dump(1) + "\n";
}

void save_model(const MlpSpec& model, const std::filesystem::path& path) {
  write_text(path, model_to_json(model));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

XorShift64Star::XorShift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t XorShift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545f4914f6cdd1dULL;
}

double XorShift64Star::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

MlpSpec random_model(std::size_t in_dim, std::size_t depth, std::size_t width,
                     std::size_t out_dim, std::uint64_t seed) {
  if (in_dim == 0 || depth == 0 || width == 0 || out_dim == 0)
    throw InputError("random_model: all sizes must be >= 1");
  MlpSpec model;
  model.in_dim = in_dim;
  std::size_t fan_in = in_dim;
  for (std::size_t l = 1; l <= depth + 1; ++l) {
    LayerSpec layer;
    layer.rows = l <= depth ? width : out_dim;
    layer.cols = fan_in;
    layer.weights.resize(layer.rows * layer.cols);
    layer.bias.resize(layer.rows);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t r = 0; r < layer.rows; ++r) {
      XorShift64Star rng(splitmix64(splitmix64(seed) ^ (l << 32)) ^ r);
      for (std::size_t c = 0; c < layer.cols; ++c)
        layer.weights[r * layer.cols + c] = bound * (2.0 * rng.uniform_open() - 1.0);
      layer.bias[r] = bound * (2.0 * rng.uniform_open() - 1.0);
    }
    fan_in = layer.rows;
    model.layers.push_back(std::move(layer));
  }
  return model;
}

NeuronSchedule NeuronSchedule::for_model(const MlpSpec& model, bool include_output) {
  NeuronSchedule s;
  s.include_output = include_output;
  const std::size_t last = include_output ? model.depth() : model.depth() - 1;
  for (std::size_t l = 1; l <= last; ++l)
    for (std::size_t i = 0; i < model.layers[l - 1].rows; ++i) s.order.push_back({l, i});
  return s;
}

NeuronSchedule NeuronSchedule::first_layer(const MlpSpec& model) {
  NeuronSchedule s;
  s.include_output = model.depth() == 1;
  for (std::size_t i = 0; i < model.layers.front().rows; ++i) s.order.push_back({1, i});
  return s;
}

std::size_t NeuronSchedule::position(const NeuronRef& neuron) const {
  auto it = std::lower_bound(order.begin(), order.end(), neuron);
  if (it == order.end() || *it != neuron)
    throw InputError("neuron (" + std::to_string(neuron.layer) + ", " +
                     std::to_string(neuron.index) + ") is not scheduled");
  return static_cast<std::size_t>(it - order.begin());
}

void check_schedule(const MlpSpec& model, const NeuronSchedule& schedule) {
  for (std::size_t k = 0; k < schedule.order.size(); ++k) {
    const auto& n = schedule.order[k];
    if (n.layer < 1 || n.layer > model.depth() || n.index >= model.layers[n.layer - 1].rows)
      throw InputError("schedule entry " + std::to_string(k) + " is not a neuron of the model");
    if (n.layer == model.depth() && !schedule.include_output)
      throw InputError("output neuron scheduled without include_output");
    if (k > 0 && !(schedule.order[k - 1] < n))
      throw InputError("schedule must be layer-major, ascending, without duplicates");
  }
}

void apply_layer(const MlpSpec& model, std::size_t layer, std::span<const double> input,
                 std::span<double> pre, std::span<double> post) {
  const auto& spec = model.layers[layer - 1];
  const bool hidden = layer < model.depth();
  for (std::size_t r = 0; r < spec.rows; ++r) {
    pre[r] = affine(spec.row(r), spec.bias[r], input);
    post[r] = hidden ? std::max(0.0, pre[r]) : pre[r];
  }
}

PreactivationTrace forward_trace(const MlpSpec& model, std::span<const double> point) {
  if (point.size() != model.in_dim)
    throw InputError("point has " + std::to_string(point.size()) + " coordinates, model expects " +
                     std::to_string(model.in_dim));
  PreactivationTrace trace;
  trace.pre.resize(model.depth());
  trace.post.resize(model.depth());
  std::span<const double> input = point;
  for (std::size_t l = 1; l <= model.depth(); ++l) {
    trace.pre[l - 1].resize(model.layers[l - 1].rows);
    trace.post[l - 1].resize(model.layers[l - 1].rows);
    apply_layer(model, l, input, trace.pre[l - 1], trace.post[l - 1]);
    input = trace.post[l - 1];
  }
  return trace;
}

std::vector<double> evaluate(const MlpSpec& model, std::span<const double> point) {
  auto trace = forward_trace(model, point);
  return std::move(trace.post.back());
}

std::vector<double> batch_preactivation(const MlpSpec& model, std::span<const double> points,
                                        const NeuronRef& neuron, unsigned threads) {
  const std::size_t d = model.in_dim;
  if (points.size() % d != 0) throw InputError("point list length is not a multiple of in_dim");
  const std::size_t n = points.size() / d;
  std::vector<double> out(n);
  std::size_t widest = d;
  for (const auto& layer : model.layers) widest = std::max(widest, layer.rows);
  parallel_for(n, threads, [&](std::size_t j) {
    std::vector<double> a(points.begin() + j * d, points.begin() + (j + 1) * d);
    std::vector<double> pre(widest), post(widest);
    for (std::size_t l = 1; l < neuron.layer; ++l) {
      const std::size_t rows = model.layers[l - 1].rows;
      apply_layer(model, l, a, std::span(pre).first(rows), std::span(post).first(rows));
      a.assign(post.begin(), post.begin() + rows);
    }
    const auto& spec = model.layers[neuron.layer - 1];
    out[j] = affine(spec.row(neuron.index), spec.bias[neuron.index], a);
  });
  return out;
}

std::vector<double> output_gradient(const MlpSpec& model, std::span<const double> point,
                                    std::size_t output_index) {
  const auto trace = forward_trace(model, point);
  const std::size_t L = model.depth();
  // Back-propagate the row vector e_out^T through active units.
  std::vector<double> g(model.layers[L - 1].rows, 0.0);
  g[output_index] = 1.0;
  for (std::size_t l = L; l >= 1; --l) {
    const auto& spec = model.layers[l - 1];
    if (l < L)
      for (std::size_t r = 0; r < spec.rows; ++r)
        if (!(trace.pre[l - 1][r] > 0.0)) g[r] = 0.0;
    std::vector<double> next(spec.cols, 0.0);
    for (std::size_t r = 0; r < spec.rows; ++r)
      for (std::size_t c = 0; c < spec.cols; ++c) next[c] += g[r] * spec.weight(r, c);
    g = std::move(next);
  }
  return g;
}

const char* to_string(NeuronLabel label) {
  switch (label) {
    case NeuronLabel::kStablyNegative:
      return "stably_negative";
    case NeuronLabel::kStablyPositive:
      return "stably_positive";
    case NeuronLabel::kIntersecting:
      return "intersecting";
  }
  return "?";
}

NeuronLabels classify_neurons_on_boundary(const MlpSpec& model,
                                          std::span<const double> boundary_vertices) {
  const std::size_t d = model.in_dim;
  if (boundary_vertices.empty() || boundary_vertices.size() % d != 0)
    throw InputError("classify_neurons_on_boundary needs a non-empty vertex list");
  const std::size_t n = boundary_vertices.size() / d;
  const std::size_t hidden = model.depth() - 1;
  std::vector<std::vector<bool>> all_neg(hidden), all_pos(hidden);
  for (std::size_t l = 0; l < hidden; ++l) {
    all_neg[l].assign(model.layers[l].rows, true);
    all_pos[l].assign(model.layers[l].rows, true);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto trace = forward_trace(model, boundary_vertices.subspan(j * d, d));
    for (std::size_t l = 0; l < hidden; ++l)
      for (std::size_t i = 0; i < model.layers[l].rows; ++i) {
        if (!(trace.pre[l][i] < 0.0)) all_neg[l][i] = false;
        if (!(trace.pre[l][i] > 0.0)) all_pos[l][i] = false;
      }
  }
  NeuronLabels labels(hidden);
  for (std::size_t l = 0; l < hidden; ++l) {
    labels[l].resize(model.layers[l].rows);
    for (std::size_t i = 0; i < labels[l].size(); ++i) {
      if (all_neg[l][i])
        labels[l][i] = NeuronLabel::kStablyNegative;
      else if (all_pos[l][i])
        labels[l][i] = NeuronLabel::kStablyPositive;
      else
        labels[l][i] = NeuronLabel::kIntersecting;
    }
  }
  return labels;
}

MlpSpec prune_stably_negative(const MlpSpec& model, const NeuronLabels& labels) {
  check_model(model);
  if (labels.size() > model.depth())
    throw InputError("labels reference more layers than the model has");
  if (labels.size() == model.depth()) {
    for (auto label : labels.back())
      if (label == NeuronLabel::kStablyNegative)
        throw InputError("output-layer neurons cannot be pruned");
  }
  std::vector<std::vector<std::size_t>> keep(model.depth());
  for (std::size_t l = 0; l < model.depth(); ++l) {
    for (std::size_t i = 0; i < model.layers[l].rows; ++i) {
      const bool dead = l < labels.size() && i < labels[l].size() &&
                        labels[l][i] == NeuronLabel::kStablyNegative;
      if (!dead) keep[l].push_back(i);
    }
    if (keep[l].empty())
      throw InputError("pruning would remove every neuron of layer " + std::to_string(l + 1));
  }
  MlpSpec out;
  out.in_dim = model.in_dim;
  for (std::size_t l = 0; l < model.depth(); ++l) {
    const auto& src = model.layers[l];
    LayerSpec dst;
    dst.rows = keep[l].size();
    dst.cols = l == 0 ? src.cols : keep[l - 1].size();
    for (auto r : keep[l]) {
      if (l == 0) {
        auto row = src.row(r);
        dst.weights.insert(dst.weights.end(), row.begin(), row.end());
      } else {
        for (auto c : keep[l - 1]) dst.weights.push_back(src.weight(r, c));
      }
      dst.bias.push_back(src.bias[r]);
    }
    out.layers.push_back(std::move(dst));
  }
  return out;
}

}  // namespace edgesub
