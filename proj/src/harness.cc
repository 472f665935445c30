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

#include "gdbr/harness.h"

#include <cmath>
#include <numeric>
#include <variant>

#include "gdbr/attack.h"
#include "gdbr/error.h"
#include "gdbr/flsim.h"
#include "gdbr/metrics.h"
#include "gdbr/random.h"

namespace gdbr {
namespace {

std::size_t HoldoutPerClass(const ExperimentConfig& config, std::size_t classes) {
  return (config.aux_samples + classes - 1) / classes;
}

template <class E>
[[noreturn]] void Rethrow(const E& e, const std::string& context) {
  throw E(context + e.what());
}

std::size_t ParseSizeValue(const std::string& text, const std::string& axis) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-') {
    throw ConfigError(axis + ": bad integer value '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

double ParseDoubleValue(const std::string& text, const std::string& axis) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw ConfigError(axis + ": bad numeric value '" + text + "'");
  }
  return v;
}

}  // namespace

PreparedData PrepareData(const ExperimentConfig& config) {
  PreparedData out;
  if (const auto* s = std::get_if<SyntheticSource>(&config.dataset)) {
    const Dataset all = GenerateSynthetic(s->spec);
    DatasetSplit split = SplitHoldout(all, HoldoutPerClass(config, all.class_count));
    out.victim = std::move(split.train);
    out.auxiliary = std::move(split.holdout);
  } else {
    const auto& f = std::get<IdxSource>(config.dataset);
    Dataset all = LoadIdxDataset(f.images, f.labels);
    if (!f.aux_images.empty()) {
      out.auxiliary = LoadIdxDataset(f.aux_images, f.aux_labels);
      const std::size_t classes = std::max(all.class_count, out.auxiliary.class_count);
      all.class_count = classes;
      out.auxiliary.class_count = classes;
      out.victim = std::move(all);
    } else {
      DatasetSplit split = SplitHoldout(all, HoldoutPerClass(config, all.class_count));
      out.victim = std::move(split.train);
      out.auxiliary = std::move(split.holdout);
    }
  }
  if (out.victim.size() == 0) throw SamplingError("victim pool is empty after holdout");
  if (out.auxiliary.size() == 0 && config.estimator == EstimatorSource::kAuxiliary) {
    throw SamplingError("auxiliary pool is empty");
  }
  ValidateDataset(out.victim);
  return out;
}

std::uint64_t StreamSeed(std::uint64_t trial_seed, TrialStream stream) {
  return DeriveSeed(trial_seed, static_cast<std::uint64_t>(stream));
}

TrialReport RunTrial(const ExperimentConfig& config, const PreparedData& data,
                     std::uint64_t trial_seed) {
  try {
    const std::size_t classes = data.victim.class_count;
    const Shape input_shape = data.victim.sample_shape();
    const Model model =
        Model::Build(BuildModelSpec(config.model, input_shape, classes), config.init,
                     StreamSeed(trial_seed, TrialStream::kModel));
    const std::size_t stack = SharedStack(config, model.stack_count());

    const Batch batch = SampleBatch(data.victim, config.distribution, config.batch_size,
                                    StreamSeed(trial_seed, TrialStream::kBatch));
    const GradientShare share =
        ApplyDefense(ClientStep(model, batch, stack), config.defense,
                     StreamSeed(trial_seed, TrialStream::kDefense));

    const std::uint64_t aux_seed = StreamSeed(trial_seed, TrialStream::kAuxiliary);
    const std::vector<Tensor> aux =
        config.estimator == EstimatorSource::kAuxiliary
            ? SelectAuxiliary(data.auxiliary, config.aux_samples, aux_seed)
            : Unstack(MakeDummyData(input_shape, config.aux_samples, aux_seed));
    const AuxEstimates est = Estimate(model, aux, stack, config.estimator);
    const AttackResult attack = RunGdbr(model, share, est);

    TrialReport r;
    r.seed = trial_seed;
    r.true_counts = batch.true_counts;
    r.raw = attack.labels.raw.values();
    r.counts = attack.labels.counts;
    const RecoveryScore score = Score(r.counts, r.true_counts);
    r.ins_acc = score.ins_acc;
    r.cls_acc = score.cls_acc;
    r.ill_conditioned = attack.bridge.ill_conditioned;
    r.max_condition_number = attack.bridge.max_condition_number;
    r.replaced_zeros = est.replaced_zeros;
    return r;
  } catch (const Error& e) {
    const std::string ctx = "trial seed " + std::to_string(trial_seed) + ": ";
    // Keep the concrete type so callers can still dispatch on it.
    try {
      throw;
    } catch (const DimensionError& x) {
      Rethrow(x, ctx);
    } catch (const IndexError& x) {
      Rethrow(x, ctx);
    } catch (const SpecError& x) {
      Rethrow(x, ctx);
    } catch (const PolicyError& x) {
      Rethrow(x, ctx);
    } catch (const SamplingError& x) {
      Rethrow(x, ctx);
    } catch (const EstimationError& x) {
      Rethrow(x, ctx);
    } catch (const DivisionGuardError& x) {
      Rethrow(x, ctx);
    } catch (const FormatError& x) {
      Rethrow(x, ctx);
    } catch (const ContractError& x) {
      Rethrow(x, ctx);
    } catch (const ConfigError& x) {
      Rethrow(x, ctx);
    }
    Rethrow(e, ctx);
  }
}

std::string SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNone:
      return "none";
    case SweepAxis::kBatchSize:
      return "batch_size";
    case SweepAxis::kDistribution:
      return "distribution";
    case SweepAxis::kLayer:
      return "layer";
    case SweepAxis::kPruneRatio:
      return "prune_ratio";
    case SweepAxis::kNoiseSigma:
      return "noise_sigma";
    case SweepAxis::kEstimator:
      return "estimator";
    case SweepAxis::kInit:
      return "init";
  }
  return "none";
}

SweepAxis ParseSweepAxis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::kNone, SweepAxis::kBatchSize, SweepAxis::kDistribution,
                      SweepAxis::kLayer, SweepAxis::kPruneRatio, SweepAxis::kNoiseSigma,
                      SweepAxis::kEstimator, SweepAxis::kInit}) {
    if (SweepAxisName(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected batch_size, distribution, layer, prune_ratio, "
                    "noise_sigma, estimator or init)");
}

ExperimentConfig WithAxisValue(const ExperimentConfig& config, SweepAxis axis,
                               const std::string& value) {
  ExperimentConfig c = config;
  const std::string name = SweepAxisName(axis);
  switch (axis) {
    case SweepAxis::kNone:
      break;
    case SweepAxis::kBatchSize:
      c.batch_size = ParseSizeValue(value, name);
      if (c.batch_size == 0) throw ConfigError("batch_size: must be at least 1");
      break;
    case SweepAxis::kDistribution:
      c.distribution = ParseDistribution(value);
      break;
    case SweepAxis::kLayer:
      c.shared_layer = ParseSizeValue(value, name);
      break;
    case SweepAxis::kPruneRatio:
      c.defense = PruneDefense{ParseDoubleValue(value, name)};
      ValidateDefense(c.defense);
      break;
    case SweepAxis::kNoiseSigma:
      c.defense = NoiseDefense{ParseDoubleValue(value, name)};
      ValidateDefense(c.defense);
      break;
    case SweepAxis::kEstimator:
      c.estimator = ParseEstimatorSource(value);
      break;
    case SweepAxis::kInit:
      c.init = ParseInitScheme(value);
      break;
  }
  return c;
}

std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t axis_index,
                        std::size_t trial) {
  return DeriveSeed(master_seed, axis_index, trial);
}

SweepRow Aggregate(std::string axis_value, std::vector<TrialReport> trials) {
  SweepRow row;
  row.axis_value = std::move(axis_value);
  const double n = static_cast<double>(trials.size());
  if (!trials.empty()) {
    double ins = 0.0;
    double cls = 0.0;
    for (const TrialReport& t : trials) {
      ins += t.ins_acc;
      cls += t.cls_acc;
      if (t.ill_conditioned) ++row.ill_conditioned_trials;
    }
    row.ins_acc_mean = ins / n;
    row.cls_acc_mean = cls / n;
    if (trials.size() > 1) {
      double vi = 0.0;
      double vc = 0.0;
      for (const TrialReport& t : trials) {
        vi += (t.ins_acc - row.ins_acc_mean) * (t.ins_acc - row.ins_acc_mean);
        vc += (t.cls_acc - row.cls_acc_mean) * (t.cls_acc - row.cls_acc_mean);
      }
      row.ins_acc_std = std::sqrt(vi / (n - 1.0));
      row.cls_acc_std = std::sqrt(vc / (n - 1.0));
    }
  }
  row.trials = std::move(trials);
  return row;
}

SweepReport RunSweep(const ExperimentConfig& config, const PreparedData& data,
                     SweepAxis axis, const std::vector<std::string>& values) {
  if (axis != SweepAxis::kNone && values.empty()) {
    throw ConfigError("sweep over " + SweepAxisName(axis) + " needs at least one value");
  }
  // Validate every value before spending time on trials.
  std::vector<ExperimentConfig> configs;
  const std::vector<std::string> keys =
      axis == SweepAxis::kNone ? std::vector<std::string>{""} : values;
  for (const std::string& v : keys) configs.push_back(WithAxisValue(config, axis, v));

  SweepReport report;
  report.config = config;
  report.axis = axis;
  for (std::size_t j = 0; j < keys.size(); ++j) {
    std::vector<TrialReport> trials;
    for (std::size_t i = 0; i < config.repetitions; ++i) {
      TrialReport t = RunTrial(configs[j], data, TrialSeed(config.seed, j, i));
      t.axis_value = keys[j];
      t.trial = i;
      trials.push_back(std::move(t));
    }
    report.rows.push_back(Aggregate(keys[j], std::move(trials)));
  }
  return report;
}

SweepReport RunSweep(const ExperimentConfig& config, SweepAxis axis,
                     const std::vector<std::string>& values) {
  return RunSweep(config, PrepareData(config), axis, values);
}

SweepReport RunExperiment(const ExperimentConfig& config, const PreparedData& data) {
  return RunSweep(config, data, SweepAxis::kNone, {});
}

SweepReport RunExperiment(const ExperimentConfig& config) {
  return RunExperiment(config, PrepareData(config));
}

}  // namespace gdbr
