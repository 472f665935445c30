// Copyright 2026 The GDBR Authors
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

#include "gdbr/flsim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gdbr/error.h"
#include "gdbr/random.h"

namespace gdbr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string FormatDouble(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::vector<std::string> SplitColons(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t ParseIndex(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-') {
    throw ConfigError("bad integer '" + text + "' in distribution '" + context + "'");
  }
  return static_cast<std::size_t>(v);
}

double ParseFraction(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw ConfigError("bad number '" + text + "' in distribution '" + context + "'");
  }
  return v;
}

// Picks `k` distinct entries of `items` uniformly at random; the result keeps
// the draw order.
std::vector<std::size_t> ChooseDistinct(std::vector<std::size_t> items,
                                        std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(k);
  return items;
}

std::size_t PickOne(const std::vector<std::size_t>& items, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
  return items[pick(rng)];
}

void AddIid(std::vector<std::size_t>& counts,
            const std::vector<std::size_t>& classes, std::size_t n, Rng& rng) {
  if (n == 0) return;
  if (classes.empty()) throw SamplingError("no classes left to draw from");
  for (std::size_t i = 0; i < n; ++i) ++counts[PickOne(classes, rng)];
}

void AddEqual(std::vector<std::size_t>& counts,
              std::vector<std::size_t> classes, std::size_t n) {
  std::sort(classes.begin(), classes.end());
  const std::size_t k = classes.size();
  for (std::size_t j = 0; j < k; ++j) {
    counts[classes[j]] += n / k + (j < n % k ? 1 : 0);
  }
}

}  // namespace

std::string DistributionName(const BatchDistribution& dist) {
  return std::visit(
      Overloaded{
          [](const RandomDist&) -> std::string { return "random"; },
          [](const UniformDist&) -> std::string { return "uniform"; },
          [](const SingleDist& d) -> std::string {
            return d.class_index ? "single:" + std::to_string(*d.class_index)
                                 : "single";
          },
          [](const SubclassedDist& d) -> std::string {
            return "subclassed:" + std::to_string(d.subset_size);
          },
          [](const ImbalancedDist& d) -> std::string {
            return "imbalanced:" +
                   (d.major_class ? std::to_string(*d.major_class) : "") + ":" +
                   FormatDouble(d.major_fraction);
          },
      },
      dist);
}

BatchDistribution ParseDistribution(const std::string& text) {
  const auto parts = SplitColons(text);
  const std::string& mode = parts[0];
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo + 1 || parts.size() > hi + 1) {
      throw ConfigError("wrong number of parameters in distribution '" + text + "'");
    }
  };
  if (mode == "random") {
    arity(0, 0);
    return RandomDist{};
  }
  if (mode == "uniform") {
    arity(0, 0);
    return UniformDist{};
  }
  if (mode == "single") {
    arity(0, 1);
    SingleDist d;
    if (parts.size() == 2 && !parts[1].empty()) d.class_index = ParseIndex(parts[1], text);
    return d;
  }
  if (mode == "subclassed") {
    arity(1, 1);
    return SubclassedDist{ParseIndex(parts[1], text)};
  }
  if (mode == "imbalanced") {
    arity(0, 2);
    ImbalancedDist d;
    if (parts.size() >= 2 && !parts[1].empty()) d.major_class = ParseIndex(parts[1], text);
    if (parts.size() == 3) d.major_fraction = ParseFraction(parts[2], text);
    return d;
  }
  throw ConfigError("unknown distribution '" + text +
                    "' (expected random, uniform, single, subclassed or imbalanced)");
}

void ValidateDistribution(const BatchDistribution& dist, std::size_t class_count) {
  std::visit(
      Overloaded{
          [](const RandomDist&) {},
          [](const UniformDist&) {},
          [&](const SingleDist& d) {
            if (d.class_index && *d.class_index >= class_count) {
              throw SamplingError("single class " + std::to_string(*d.class_index) +
                                  " outside [0, " + std::to_string(class_count) + ")");
            }
          },
          [&](const SubclassedDist& d) {
            if (d.subset_size < 1 || d.subset_size > class_count) {
              throw SamplingError("subclassed subset size " +
                                  std::to_string(d.subset_size) + " outside [1, " +
                                  std::to_string(class_count) + "]");
            }
          },
          [&](const ImbalancedDist& d) {
            if (d.major_class && *d.major_class >= class_count) {
              throw SamplingError("major class " + std::to_string(*d.major_class) +
                                  " outside [0, " + std::to_string(class_count) + ")");
            }
            if (!(d.major_fraction > 0.0 && d.major_fraction <= 1.0)) {
              throw SamplingError("major fraction " + FormatDouble(d.major_fraction) +
                                  " outside (0, 1]");
            }
          },
      },
      dist);
}

Batch SampleBatch(const Dataset& data, const BatchDistribution& dist,
                  std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw SamplingError("batch size must be at least 1");
  if (data.size() == 0) throw SamplingError("cannot sample from an empty dataset");
  const std::size_t classes = data.class_count;
  ValidateDistribution(dist, classes);
  const auto pools = data.ClassPools();
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < classes; ++c) {
    if (!pools[c].empty()) present.push_back(c);
  }

  Rng rng(seed);
  std::vector<std::size_t> counts(classes, 0);
  std::visit(
      Overloaded{
          [&](const RandomDist&) {
            const std::size_t lo = std::min<std::size_t>(2, present.size());
            std::uniform_int_distribution<std::size_t> size(lo, present.size());
            AddIid(counts, ChooseDistinct(present, size(rng), rng), batch_size, rng);
          },
          [&](const UniformDist&) {
            std::vector<std::size_t> all(classes);
            std::iota(all.begin(), all.end(), 0);
            AddEqual(counts, all, batch_size);
          },
          [&](const SingleDist& d) {
            counts[d.class_index ? *d.class_index : PickOne(present, rng)] = batch_size;
          },
          [&](const SubclassedDist& d) {
            if (d.subset_size > present.size()) {
              throw SamplingError("subclassed subset size " +
                                  std::to_string(d.subset_size) + " exceeds the " +
                                  std::to_string(present.size()) + " non-empty classes");
            }
            AddEqual(counts, ChooseDistinct(present, d.subset_size, rng), batch_size);
          },
          [&](const ImbalancedDist& d) {
            const std::size_t major = d.major_class ? *d.major_class : PickOne(present, rng);
            const double want = d.major_fraction * static_cast<double>(batch_size);
            const std::size_t n_major =
                std::min(batch_size, static_cast<std::size_t>(std::ceil(want - 1e-9)));
            counts[major] = n_major;
            std::vector<std::size_t> others;
            for (std::size_t c = 0; c < classes; ++c) {
              if (c != major) others.push_back(c);
            }
            AddIid(counts, others, batch_size - n_major, rng);
          },
      },
      dist);

  std::vector<std::size_t> picks;
  picks.reserve(batch_size);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) continue;
    const auto& pool = pools[c];
    if (pool.empty()) {
      throw SamplingError("class " + std::to_string(c) + " has no samples but " +
                          std::to_string(counts[c]) + " were requested");
    }
    const std::size_t distinct = std::min(counts[c], pool.size());
    auto chosen = ChooseDistinct(pool, distinct, rng);
    for (std::size_t i = distinct; i < counts[c]; ++i) chosen.push_back(PickOne(pool, rng));
    picks.insert(picks.end(), chosen.begin(), chosen.end());
  }
  std::shuffle(picks.begin(), picks.end(), rng);

  Batch batch;
  batch.true_counts = std::move(counts);
  for (std::size_t i : picks) {
    batch.inputs.push_back(data.sample(i));
    batch.labels.push_back(data.labels[i]);
  }
  return batch;
}

std::string DefenseName(const DefenseSpec& defense) {
  return std::visit(
      Overloaded{
          [](const NoDefense&) -> std::string { return "none"; },
          [](const PruneDefense& d) -> std::string {
            return "prune:" + FormatDouble(d.ratio);
          },
          [](const NoiseDefense& d) -> std::string {
            return "noise:" + FormatDouble(d.sigma);
          },
      },
      defense);
}

void ValidateDefense(const DefenseSpec& defense) {
  if (const auto* p = std::get_if<PruneDefense>(&defense)) {
    if (!(p->ratio >= 0.0 && p->ratio < 1.0)) {
      throw ConfigError("prune ratio " + FormatDouble(p->ratio) + " outside [0, 1)");
    }
  }
  if (const auto* n = std::get_if<NoiseDefense>(&defense)) {
    if (!(n->sigma >= 0.0) || !std::isfinite(n->sigma)) {
      throw ConfigError("noise sigma " + FormatDouble(n->sigma) + " must be >= 0");
    }
  }
}

GradientShare ClientStep(const Model& model, const Batch& batch,
                         std::size_t shared_stack) {
  if (shared_stack >= model.stack_count()) {
    throw IndexError("shared stack " + std::to_string(shared_stack) +
                     " outside [0, " + std::to_string(model.stack_count()) + ")");
  }
  if (shared_stack + 1 == model.stack_count()) {
    throw PolicyError("the final classifier gradient is never shared");
  }
  if (batch.inputs.empty()) throw SamplingError("empty batch");
  const ForwardTrace trace = Forward(model, batch.inputs);
  BatchGradients grads = Backward(model, trace, batch.labels);
  GradientShare share;
  share.layer_index = shared_stack;
  share.grad = std::move(grads.weights[model.stack_layer(shared_stack)]);
  share.batch_size = batch.inputs.size();
  return share;
}

GradientShare ApplyDefense(GradientShare share, const DefenseSpec& defense,
                           std::uint64_t seed) {
  ValidateDefense(defense);
  std::span<double> v = share.grad.data();
  if (const auto* p = std::get_if<PruneDefense>(&defense)) {
    const std::size_t k = static_cast<std::size_t>(
        std::floor(p->ratio * static_cast<double>(v.size()) + 1e-9));
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(v[a]) < std::abs(v[b]);
    });
    for (std::size_t i = 0; i < k; ++i) v[order[i]] = 0.0;
  } else if (const auto* n = std::get_if<NoiseDefense>(&defense)) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, n->sigma);
    if (n->sigma > 0.0) {
      for (double& x : v) x += noise(rng);
    }
  }
  share.defense_applied = defense;
  return share;
}

}  // namespace gdbr
