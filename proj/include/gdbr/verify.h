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

#ifndef GDBR_VERIFY_H_
#define GDBR_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace gdbr {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t instances = 100;
  std::uint64_t seed = 20260101;
};

// Each check draws its own random instances and reports the worst error.
CheckResult CheckFcIdentities(const VerifyOptions& options);
CheckResult CheckClassifierInversion(const VerifyOptions& options);
CheckResult CheckConvInnerProduct(const VerifyOptions& options);
CheckResult CheckReluIdentity(const VerifyOptions& options);
CheckResult CheckFcInversionFromInputGrad(const VerifyOptions& options);
CheckResult CheckFcInversionFromWeightGrad(const VerifyOptions& options);
CheckResult CheckConvInversion(const VerifyOptions& options);
CheckResult CheckFiniteDifferences(const VerifyOptions& options);
CheckResult CheckEndToEnd(const VerifyOptions& options);
CheckResult CheckConservation(const VerifyOptions& options);

std::vector<CheckResult> RunVerifySuite(const VerifyOptions& options = {});

}  // namespace gdbr

#endif  // GDBR_VERIFY_H_
