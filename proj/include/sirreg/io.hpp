// Copyright 2026 The sirreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIRREG_IO_HPP_
#define SIRREG_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sirreg/moments.hpp"
#include "sirreg/ridge_als.hpp"
#include "sirreg/rsir.hpp"

namespace sirreg {

struct LabeledDataset {
  Dataset data;
  std::vector<std::string> predictor_names;
  std::string response_name;
};

/// Reads a comma-separated file with a header row. The response column is
/// chosen by header name or, failing that, by 0-based column index; every
/// other column is a predictor. Errors carry the 1-based line number.
LabeledDataset read_dataset_csv(std::istream& in, const std::string& response,
                                const std::string& source = "<stream>");
LabeledDataset read_dataset_csv(const std::filesystem::path& path,
                                const std::string& response);

/// Writes predictors x1..xp followed by the response column y.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// One row per coordinate, one column per basis vector.
void write_basis_csv(std::ostream& out, const Basis& basis);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ExistenceReport& report);
nlohmann::json to_json(const TauSelection& selection);
nlohmann::json to_json(const AlsRecord& record);
nlohmann::json to_json(const Counterexample& example);

/// Column-major flattening, matching vec().
nlohmann::json matrix_to_json(const Matrix& m);

/// Trace summary (stop reason, counts, final norm) without the records.
nlohmann::json trace_summary_json(const AlsTrace& trace);

/// One JSON object per line: iter, objective, a_norm, c_norm, product_norm.
std::string trace_to_jsonl(const AlsTrace& trace);
std::string trace_to_csv(const AlsTrace& trace);

/// Writes to a sibling temporary file and renames it over path.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace sirreg

#endif  // SIRREG_IO_HPP_
