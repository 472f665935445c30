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

#ifndef GDBR_REPORT_H_
#define GDBR_REPORT_H_

#include <iosfwd>
#include <string>

#include "gdbr/harness.h"

namespace gdbr {

std::string SerializeReport(const SweepReport& report);
// Throws FormatError on malformed input.
SweepReport ParseReport(const std::string& json_text);

// Columns: axis_value, trial, seed, ins_acc, cls_acc, ill_conditioned.
void WriteTrialsCsv(const SweepReport& report, std::ostream& out);

// Human-readable per-row summary.
void WriteSummary(const SweepReport& report, std::ostream& out);

}  // namespace gdbr

#endif  // GDBR_REPORT_H_
