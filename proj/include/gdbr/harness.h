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

#ifndef GDBR_HARNESS_H_
#define GDBR_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gdbr/config.h"
#include "gdbr/dataset.h"

namespace gdbr {

// Victim pool and auxiliary pool. For synthetic data and for IDX sources
// without aux files, ceil(aux_samples / C) samples per class are held out of
// the victim pool for the attacker.
struct PreparedData {
  Dataset victim;
  Dataset auxiliary;
};

PreparedData PrepareData(const ExperimentConfig& config);

// Sub-seeds of one trial. Frozen: changing them changes every report.
enum class TrialStream : std::uint64_t {
  kModel = 1,
  kBatch = 2,
  kDefense = 3,
  kAuxiliary = 4,
};

std::uint64_t StreamSeed(std::uint64_t trial_seed, TrialStream stream);

struct TrialReport {
  std::string axis_value;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> true_counts;
  std::vector<double> raw;
  std::vector<std::size_t> counts;
  double ins_acc = 0.0;
  double cls_acc = 0.0;
  bool ill_conditioned = false;
  double max_condition_number = 0.0;
  std::size_t replaced_zeros = 0;

  bool operator==(const TrialReport&) const = default;
};

// One FL round and one attack, fully determined by (config, trial_seed).
TrialReport RunTrial(const ExperimentConfig& config, const PreparedData& data,
                     std::uint64_t trial_seed);

enum class SweepAxis {
  kNone,
  kBatchSize,
  kDistribution,
  kLayer,
  kPruneRatio,
  kNoiseSigma,
  kEstimator,
  kInit,
};

std::string SweepAxisName(SweepAxis axis);
SweepAxis ParseSweepAxis(const std::string& name);
// Copy of `config` with the axis field set from its text value.
ExperimentConfig WithAxisValue(const ExperimentConfig& config, SweepAxis axis,
                               const std::string& value);

struct SweepRow {
  std::string axis_value;
  std::vector<TrialReport> trials;
  double ins_acc_mean = 0.0;
  double ins_acc_std = 0.0;
  double cls_acc_mean = 0.0;
  double cls_acc_std = 0.0;
  std::size_t ill_conditioned_trials = 0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
  ExperimentConfig config;
  SweepAxis axis = SweepAxis::kNone;
  std::vector<SweepRow> rows;

  bool operator==(const SweepReport&) const = default;
};

// Trial i of axis value j runs with seed DeriveSeed(config.seed, j, i).
std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t axis_index,
                        std::size_t trial);

// Mean and sample standard deviation of the trials' metrics.
SweepRow Aggregate(std::string axis_value, std::vector<TrialReport> trials);

// R trials of the config as-is: one row with an empty axis value.
SweepReport RunExperiment(const ExperimentConfig& config);
SweepReport RunExperiment(const ExperimentConfig& config, const PreparedData& data);
SweepReport RunSweep(const ExperimentConfig& config, SweepAxis axis,
                     const std::vector<std::string>& values);
SweepReport RunSweep(const ExperimentConfig& config, const PreparedData& data,
                     SweepAxis axis, const std::vector<std::string>& values);

}  // namespace gdbr

#endif  // GDBR_HARNESS_H_
