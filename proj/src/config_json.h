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

#ifndef GDBR_SRC_CONFIG_JSON_H_
#define GDBR_SRC_CONFIG_JSON_H_

#include <filesystem>

#include "gdbr/config.h"
#include "json.hpp"

namespace gdbr {

nlohmann::json ConfigToJson(const ExperimentConfig& config);
ExperimentConfig ConfigFromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);

}  // namespace gdbr

#endif  // GDBR_SRC_CONFIG_JSON_H_
