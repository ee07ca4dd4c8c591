// Copyright 2026 The reckga Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "reckga/analytic.hpp"
#include "reckga/forward_model.hpp"
#include "reckga/ga.hpp"
#include "reckga/metrics.hpp"
#include "reckga/reck.hpp"

namespace reckga::io {

using nlohmann::json;
namespace fs = std::filesystem;

// Shortest text that parses back to the same double.
std::string format_double(double v);
// Rounded to `digits` significant digits.
double round_significant(double v, int digits = 6);

// {"m": int, "re": [[...]], "im": [[...]]}
json unitary_to_json(const UnitaryMatrix& u);
UnitaryMatrix unitary_from_json(const json& j, double tol = kParsedUnitaryTol);
void write_unitary(const fs::path& path, const UnitaryMatrix& u);
UnitaryMatrix read_unitary(const fs::path& path);

// {"m": int, "schedule_version": int, "genes": [{"t","alpha","beta"}, ...]}
json dna_to_json(const Dna& d);
Dna dna_from_json(const json& j);
void write_dna(const fs::path& path, const Dna& d);
Dna read_dna(const fs::path& path);

// Binds the two measurement CSVs. Paths are relative to the manifest.
struct MeasurementManifest {
  int m = 0;
  std::string single_csv = "single.csv";
  std::string visibility_csv = "visibilities.csv";
  json noise = json::object();
  std::optional<std::string> ground_truth;
};

json manifest_to_json(const MeasurementManifest& mf);
MeasurementManifest manifest_from_json(const json& j);

// Header `i,j,p,dp`.
std::string single_csv(const MeasurementSet& data);
// Header `i,j,p,q,v,dv`.
std::string visibility_csv(const MeasurementSet& data);

// Parses both tables; ParseError carries the failing line.
MeasurementSet parse_measurements(int m, const std::string& single_text, const std::string& visibility_text);

struct LoadedMeasurements {
  MeasurementManifest manifest;
  MeasurementSet data;
  fs::path directory;
};

// Writes manifest + CSVs into `dir`. Returns the manifest path.
fs::path write_measurements(const fs::path& dir, const MeasurementSet& data, MeasurementManifest mf);
LoadedMeasurements read_measurements(const fs::path& manifest_path);

// `iteration,best_chi2,mean_chi2,mutations,elapsed_ms`
std::string trace_csv(const RunTrace& trace);
RunTrace parse_trace_csv(const std::string& text);
// Plot-ready series {"series": [{"name", "x", "y"}], "events": [...]}.
json trace_series_json(const RunTrace& trace);

json gaconfig_to_json(const GaConfig& c);
// Keys missing from `j` keep their value from `base`; unknown keys are rejected.
GaConfig gaconfig_from_json(const json& j, const GaConfig& base = {});

json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const json& j);

// Numbers rounded to 6 significant digits.
json report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const json& j);

// `anchor_i,anchor_j,chi2,flags`
std::string candidates_csv(const SeedPool& pool);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

}  // namespace reckga::io
