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

#ifndef GDBR_DATASET_H_
#define GDBR_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "gdbr/tensor.h"

namespace gdbr {

struct Dataset {
  Tensor inputs;  // [num_samples, ...sample shape]
  std::vector<std::size_t> labels;
  std::size_t class_count = 0;

  std::size_t size() const { return labels.size(); }
  Shape sample_shape() const;
  Tensor sample(std::size_t i) const;
  // Sample indices per class, in dataset order.
  std::vector<std::vector<std::size_t>> ClassPools() const;
};

// Throws SamplingError unless labels are in range and match the inputs.
void ValidateDataset(const Dataset& data);

Dataset Subset(const Dataset& data, std::span<const std::size_t> indices);

struct DatasetSplit {
  Dataset train;
  Dataset holdout;
};

// Moves the last `holdout_per_class` samples of every class (or all of them,
// for smaller classes) into the holdout set.
DatasetSplit SplitHoldout(const Dataset& data, std::size_t holdout_per_class);

struct SyntheticSpec {
  std::size_t classes = 10;
  std::size_t per_class = 100;
  Shape input_shape{784};
  double separation = 3.0;
  std::uint64_t seed = 0;
};

// Class c is N(mu_c, I) with mu_c = separation * u_c, u_c a random unit
// direction. Samples are stored class by class.
Dataset GenerateSynthetic(const SyntheticSpec& spec);

// Big-endian IDX pair: images (magic 0x00000803, count, rows, cols, bytes)
// and labels (magic 0x00000801, count, bytes). Pixels are scaled to [0, 1]
// and samples are shaped [1, rows, cols]. Throws FormatError.
Dataset LoadIdxDataset(const std::filesystem::path& image_path,
                       const std::filesystem::path& label_path);
Dataset ParseIdx(std::span<const std::uint8_t> image_bytes,
                 std::span<const std::uint8_t> label_bytes);

// One row per sample: label followed by the flattened features.
void WriteDatasetCsv(const Dataset& data, std::ostream& out);

}  // namespace gdbr

#endif  // GDBR_DATASET_H_
