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

#include "gdbr/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "config_json.h"
#include "gdbr/error.h"
#include "gdbr/nn.h"

namespace gdbr {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool Has(const std::string& key) const { return j_.contains(key); }

  const json& Get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing '" + key + "'");
    return j_.at(key);
  }

  std::string Path(const std::string& key) const { return where_ + "." + key; }

  std::size_t Size(const std::string& key) { return AsSize(Get(key), Path(key)); }
  double Number(const std::string& key) { return AsNumber(Get(key), Path(key)); }
  std::string String(const std::string& key) { return AsString(Get(key), Path(key)); }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  static std::size_t AsSize(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw ConfigError(where + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }
  static double AsNumber(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
  }
  static std::string AsString(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    return v.get<std::string>();
  }
  static std::vector<std::size_t> AsSizes(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(AsSize(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

LayerSpec LayerFromJson(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  const std::string type = r.String("type");
  LayerSpec layer;
  if (type == "relu") {
    layer = LayerSpec::Relu();
  } else if (type == "fc") {
    layer = LayerSpec::Fc(r.Size("out"), 0);
  } else if (type == "conv") {
    const std::size_t out = r.Size("out_channels");
    const json& k = r.Get("kernel");
    std::vector<std::size_t> kernel;
    if (k.is_array()) {
      kernel = ObjectReader::AsSizes(k, r.Path("kernel"));
    } else {
      kernel.assign(2, ObjectReader::AsSize(k, r.Path("kernel")));
    }
    if (kernel.size() != 2) throw ConfigError(r.Path("kernel") + ": expected [h, w]");
    layer = LayerSpec::Conv(out, 0, kernel[0], kernel[1]);
  } else {
    throw ConfigError(r.Path("type") + ": unknown layer type '" + type + "'");
  }
  r.Finish();
  return layer;
}

json LayerToJson(const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::kRelu:
      return {{"type", "relu"}};
    case LayerKind::kFc:
      return {{"type", "fc"}, {"out", layer.out}};
    case LayerKind::kConv:
      return {{"type", "conv"},
              {"out_channels", layer.out},
              {"kernel", {layer.kernel_h, layer.kernel_w}}};
  }
  return {};
}

SyntheticSpec SyntheticFromJson(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  SyntheticSpec spec;
  if (r.Has("classes")) spec.classes = r.Size("classes");
  if (r.Has("per_class")) spec.per_class = r.Size("per_class");
  if (r.Has("input_shape")) {
    spec.input_shape = ObjectReader::AsSizes(r.Get("input_shape"), r.Path("input_shape"));
  }
  if (r.Has("separation")) spec.separation = r.Number("separation");
  if (r.Has("seed")) spec.seed = r.Size("seed");
  r.Finish();
  if (spec.classes < 2) throw ConfigError(where + ".classes: need at least 2");
  if (spec.per_class < 1) throw ConfigError(where + ".per_class: need at least 1");
  if (spec.input_shape.empty() || ShapeSize(spec.input_shape) == 0) {
    throw ConfigError(where + ".input_shape: must be non-empty with positive dims");
  }
  if (!(spec.separation >= 0.0)) throw ConfigError(where + ".separation: must be >= 0");
  return spec;
}

json SyntheticToJson(const SyntheticSpec& spec) {
  return {{"classes", spec.classes},
          {"per_class", spec.per_class},
          {"input_shape", spec.input_shape},
          {"separation", spec.separation},
          {"seed", spec.seed}};
}

std::string ResolvePath(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

DefenseSpec DefenseFromJson(const json& j) {
  ObjectReader r(j, "defense");
  const std::string type = r.String("type");
  DefenseSpec d;
  if (type == "none") {
    d = NoDefense{};
  } else if (type == "prune") {
    d = PruneDefense{r.Number("ratio")};
  } else if (type == "noise") {
    d = NoiseDefense{r.Number("sigma")};
  } else {
    throw ConfigError("defense.type: unknown defense '" + type + "'");
  }
  r.Finish();
  try {
    ValidateDefense(d);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("defense: ") + e.what());
  }
  return d;
}

json DefenseToJson(const DefenseSpec& d) {
  if (const auto* p = std::get_if<PruneDefense>(&d)) {
    return {{"type", "prune"}, {"ratio", p->ratio}};
  }
  if (const auto* n = std::get_if<NoiseDefense>(&d)) {
    return {{"type", "noise"}, {"sigma", n->sigma}};
  }
  return {{"type", "none"}};
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  ObjectReader r(j, "config");

  {
    ObjectReader m(r.Get("model"), "model");
    if (m.Has("feature_extractor")) {
      const json& fe = m.Get("feature_extractor");
      if (!fe.is_array()) throw ConfigError("model.feature_extractor: expected an array");
      for (std::size_t i = 0; i < fe.size(); ++i) {
        c.model.feature_extractor.push_back(
            LayerFromJson(fe[i], "model.feature_extractor[" + std::to_string(i) + "]"));
      }
    }
    if (m.Has("first_stack")) {
      const std::string kind = m.String("first_stack");
      if (kind == "fc") {
        c.model.first_stack = LayerKind::kFc;
      } else if (kind == "conv") {
        c.model.first_stack = LayerKind::kConv;
      } else {
        throw ConfigError("model.first_stack: expected 'fc' or 'conv'");
      }
    }
    c.model.widths = ObjectReader::AsSizes(m.Get("widths"), "model.widths");
    if (c.model.widths.empty()) throw ConfigError("model.widths: need at least one width");
    m.Finish();
  }

  {
    ObjectReader d(r.Get("dataset"), "dataset");
    const bool synthetic = d.Has("synthetic");
    const bool idx = d.Has("idx");
    if (synthetic == idx) {
      throw ConfigError("dataset: give exactly one of 'synthetic' or 'idx'");
    }
    if (synthetic) {
      c.dataset = SyntheticSource{SyntheticFromJson(d.Get("synthetic"), "dataset.synthetic")};
    } else {
      ObjectReader f(d.Get("idx"), "dataset.idx");
      IdxSource src;
      src.images = ResolvePath(f.String("images"), base_dir);
      src.labels = ResolvePath(f.String("labels"), base_dir);
      if (f.Has("aux_images") || f.Has("aux_labels")) {
        src.aux_images = ResolvePath(f.String("aux_images"), base_dir);
        src.aux_labels = ResolvePath(f.String("aux_labels"), base_dir);
      }
      f.Finish();
      c.dataset = src;
    }
    d.Finish();
  }

  if (r.Has("batch_size")) c.batch_size = r.Size("batch_size");
  if (c.batch_size < 1) throw ConfigError("batch_size: must be at least 1");
  if (r.Has("distribution")) c.distribution = ParseDistribution(r.String("distribution"));
  if (r.Has("shared_layer") && !r.Get("shared_layer").is_null()) {
    c.shared_layer = r.Size("shared_layer");
  }
  if (r.Has("estimator")) c.estimator = ParseEstimatorSource(r.String("estimator"));
  if (r.Has("aux_samples")) c.aux_samples = r.Size("aux_samples");
  if (c.aux_samples < 1) throw ConfigError("aux_samples: must be at least 1");
  if (r.Has("init")) c.init = ParseInitScheme(r.String("init"));
  if (r.Has("defense")) c.defense = DefenseFromJson(r.Get("defense"));
  if (r.Has("repetitions")) c.repetitions = r.Size("repetitions");
  if (c.repetitions < 1) throw ConfigError("repetitions: must be at least 1");
  if (r.Has("seed")) c.seed = r.Size("seed");
  r.Finish();

  // Catch index errors now rather than in the first trial.
  if (const auto* s = std::get_if<SyntheticSource>(&c.dataset)) {
    const ModelSpec spec = BuildModelSpec(c.model, s->spec.input_shape, s->spec.classes);
    SharedStack(c, spec.bottom.stack_count());
    try {
      ValidateDistribution(c.distribution, s->spec.classes);
    } catch (const SamplingError& e) {
      throw ConfigError(std::string("distribution: ") + e.what());
    }
  }
  return c;
}

json ConfigToJson(const ExperimentConfig& c) {
  json model;
  model["feature_extractor"] = json::array();
  for (const LayerSpec& l : c.model.feature_extractor) {
    model["feature_extractor"].push_back(LayerToJson(l));
  }
  model["first_stack"] = LayerKindName(c.model.first_stack);
  model["widths"] = c.model.widths;

  json dataset;
  if (const auto* s = std::get_if<SyntheticSource>(&c.dataset)) {
    dataset["synthetic"] = SyntheticToJson(s->spec);
  } else {
    const auto& f = std::get<IdxSource>(c.dataset);
    json idx = {{"images", f.images}, {"labels", f.labels}};
    if (!f.aux_images.empty()) {
      idx["aux_images"] = f.aux_images;
      idx["aux_labels"] = f.aux_labels;
    }
    dataset["idx"] = idx;
  }

  json j;
  j["model"] = model;
  j["dataset"] = dataset;
  j["batch_size"] = c.batch_size;
  j["distribution"] = DistributionName(c.distribution);
  j["shared_layer"] = c.shared_layer ? json(*c.shared_layer) : json(nullptr);
  j["estimator"] = EstimatorSourceName(c.estimator);
  j["aux_samples"] = c.aux_samples;
  j["init"] = InitSchemeName(c.init);
  j["defense"] = DefenseToJson(c.defense);
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  return j;
}

ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return ConfigFromJson(j, base_dir);
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), path.parent_path());
}

std::string SerializeConfig(const ExperimentConfig& config) {
  return ConfigToJson(config).dump(2);
}

SyntheticSpec ParseSyntheticSpec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
  }
  return SyntheticFromJson(j, "synthetic");
}

ModelSpec BuildModelSpec(const ModelConfig& config, const Shape& input_shape,
                         std::size_t classes) {
  ModelSpec spec;
  spec.input_shape = input_shape;
  Shape shape = input_shape;
  for (LayerSpec layer : config.feature_extractor) {
    switch (layer.kind) {
      case LayerKind::kFc:
        layer.in = ShapeSize(shape);
        shape = {layer.out};
        break;
      case LayerKind::kConv:
        if (shape.size() != 3) {
          throw SpecError("conv extractor layer needs a [C, H, W] input, got " +
                          ShapeString(shape));
        }
        layer.in = shape[0];
        if (layer.kernel_h > shape[1] || layer.kernel_w > shape[2]) {
          throw SpecError("conv extractor kernel larger than its input " +
                          ShapeString(shape));
        }
        shape = nn::ConvOutputShape(layer.weight_shape(), shape);
        break;
      case LayerKind::kRelu:
        break;
    }
    spec.feature_extractor.push_back(layer);
  }
  if (config.widths.empty()) throw SpecError("bottom stack needs at least one width");
  if (config.first_stack == LayerKind::kConv) {
    const std::span<const std::size_t> rest(config.widths.begin() + 1, config.widths.end());
    spec.bottom = ConvBottom(shape, config.widths[0], rest, classes);
  } else {
    spec.bottom = FcBottom(ShapeSize(shape), config.widths, classes);
  }
  ValidateSpec(spec);
  return spec;
}

std::size_t SharedStack(const ExperimentConfig& config, std::size_t stack_count) {
  if (stack_count < 2) throw SpecError("model has no shareable stack");
  const std::size_t stack = config.shared_layer.value_or(stack_count - 2);
  if (stack + 1 == stack_count) {
    throw PolicyError("shared_layer " + std::to_string(stack) +
                      " is the final classifier, which is never shared");
  }
  if (stack >= stack_count) {
    throw ConfigError("shared_layer " + std::to_string(stack) + " outside [0, " +
                      std::to_string(stack_count - 1) + ")");
  }
  return stack;
}

}  // namespace gdbr
