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

#include "gdbr/report.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "config_json.h"
#include "gdbr/error.h"

namespace gdbr {
namespace {

using nlohmann::json;

// JSON has no infinity; a singular bridge is written as null.
json ConditionToJson(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double ConditionFromJson(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json TrialToJson(const TrialReport& t) {
  return {{"axis_value", t.axis_value},
          {"trial", t.trial},
          {"seed", t.seed},
          {"true_counts", t.true_counts},
          {"raw", t.raw},
          {"counts", t.counts},
          {"ins_acc", t.ins_acc},
          {"cls_acc", t.cls_acc},
          {"ill_conditioned", t.ill_conditioned},
          {"max_condition_number", ConditionToJson(t.max_condition_number)},
          {"replaced_zeros", t.replaced_zeros}};
}

TrialReport TrialFromJson(const json& j) {
  TrialReport t;
  j.at("axis_value").get_to(t.axis_value);
  j.at("trial").get_to(t.trial);
  j.at("seed").get_to(t.seed);
  j.at("true_counts").get_to(t.true_counts);
  j.at("raw").get_to(t.raw);
  j.at("counts").get_to(t.counts);
  j.at("ins_acc").get_to(t.ins_acc);
  j.at("cls_acc").get_to(t.cls_acc);
  j.at("ill_conditioned").get_to(t.ill_conditioned);
  t.max_condition_number = ConditionFromJson(j.at("max_condition_number"));
  j.at("replaced_zeros").get_to(t.replaced_zeros);
  return t;
}

}  // namespace

std::string SerializeReport(const SweepReport& report) {
  json rows = json::array();
  for (const SweepRow& row : report.rows) {
    json trials = json::array();
    for (const TrialReport& t : row.trials) trials.push_back(TrialToJson(t));
    rows.push_back({{"axis_value", row.axis_value},
                    {"ins_acc_mean", row.ins_acc_mean},
                    {"ins_acc_std", row.ins_acc_std},
                    {"cls_acc_mean", row.cls_acc_mean},
                    {"cls_acc_std", row.cls_acc_std},
                    {"ill_conditioned_trials", row.ill_conditioned_trials},
                    {"trials", trials}});
  }
  json j = {{"config", ConfigToJson(report.config)},
            {"axis", SweepAxisName(report.axis)},
            {"rows", rows}};
  return j.dump(2);
}

SweepReport ParseReport(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    SweepReport report;
    report.config = ConfigFromJson(j.at("config"), {});
    report.axis = ParseSweepAxis(j.at("axis").get<std::string>());
    for (const json& r : j.at("rows")) {
      SweepRow row;
      r.at("axis_value").get_to(row.axis_value);
      r.at("ins_acc_mean").get_to(row.ins_acc_mean);
      r.at("ins_acc_std").get_to(row.ins_acc_std);
      r.at("cls_acc_mean").get_to(row.cls_acc_mean);
      r.at("cls_acc_std").get_to(row.cls_acc_std);
      r.at("ill_conditioned_trials").get_to(row.ill_conditioned_trials);
      for (const json& t : r.at("trials")) row.trials.push_back(TrialFromJson(t));
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed report config: ") + e.what());
  }
}

void WriteTrialsCsv(const SweepReport& report, std::ostream& out) {
  out << "axis_value,trial,seed,ins_acc,cls_acc,ill_conditioned\n";
  out << std::setprecision(17);
  for (const SweepRow& row : report.rows) {
    for (const TrialReport& t : row.trials) {
      out << t.axis_value << ',' << t.trial << ',' << t.seed << ',' << t.ins_acc << ','
          << t.cls_acc << ',' << (t.ill_conditioned ? 1 : 0) << '\n';
    }
  }
}

void WriteSummary(const SweepReport& report, std::ostream& out) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(4);
  for (const SweepRow& row : report.rows) {
    if (report.axis != SweepAxis::kNone) {
      out << SweepAxisName(report.axis) << '=' << row.axis_value << "  ";
    }
    out << "trials=" << row.trials.size() << "  ins_acc=" << row.ins_acc_mean << " +- "
        << row.ins_acc_std << "  cls_acc=" << row.cls_acc_mean << " +- "
        << row.cls_acc_std;
    if (row.ill_conditioned_trials > 0) {
      out << "  ill_conditioned=" << row.ill_conditioned_trials;
    }
    out << '\n';
  }
  out.flags(flags);
}

}  // namespace gdbr
