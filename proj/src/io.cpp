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

#include "sirreg/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

namespace sirreg {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

[[noreturn]] void csv_error(const std::string& source, std::size_t line,
                            const std::string& what) {
  throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// nlohmann serializes non-finite doubles as null; keep that explicit.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

LabeledDataset read_dataset_csv(std::istream& in, const std::string& response,
                                const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) csv_error(source, line_no, "missing header row");
  if (header.size() < 2) {
    csv_error(source, line_no, "need a response and at least one predictor");
  }

  std::size_t response_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response) {
      response_col = j;
      break;
    }
  }
  if (response_col == header.size()) {
    std::size_t idx = 0;
    const auto [ptr, ec] =
        std::from_chars(response.data(), response.data() + response.size(), idx);
    if (ec != std::errc() || ptr != response.data() + response.size() ||
        idx >= header.size()) {
      throw InputError(source + ": response column '" + response +
                       "' is neither a header name nor a valid column index");
    }
    response_col = idx;
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      csv_error(source, line_no,
                "expected " + std::to_string(header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      if (f.empty()) csv_error(source, line_no, "missing value in column '" + header[j] + "'");
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[j]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        csv_error(source, line_no, "cannot parse '" + f + "' as a number");
      }
      if (!std::isfinite(values[j])) {
        csv_error(source, line_no, "non-finite value in column '" + header[j] + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) {
    throw InputError(source + ": need at least 2 data rows");
  }

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(header.size()) - 1;
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      const double v = rows[static_cast<std::size_t>(i)][j];
      if (j == response_col) {
        y(i) = v;
      } else {
        x(i, col++) = v;
      }
    }
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != response_col) names.push_back(header[j]);
  }
  return {Dataset(std::move(x), std::move(y)), std::move(names),
          header[response_col]};
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path,
                                const std::string& response) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_dataset_csv(in, response, path.string());
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << format_double(data.x()(i, j)) << ',';
    out << format_double(data.y()(i)) << '\n';
  }
}

void write_basis_csv(std::ostream& out, const Basis& basis) {
  for (Index j = 0; j < basis.cols(); ++j) {
    out << (j ? "," : "") << "v" << (j + 1);
  }
  out << '\n';
  for (Index i = 0; i < basis.rows(); ++i) {
    for (Index j = 0; j < basis.cols(); ++j) {
      out << (j ? "," : "") << format_double(basis(i, j));
    }
    out << '\n';
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  return nlohmann::json(std::vector<double>(m.data(), m.data() + m.size()));
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json diagnostics = {
      {"condition_number", number_or_null(fit.diagnostics.condition_number)},
      {"numerical_rank", fit.diagnostics.numerical_rank},
      {"uninformative", fit.diagnostics.uninformative},
      {"eigenvalue_tie", fit.diagnostics.eigenvalue_tie}};
  return {{"method", to_string(fit.method)},
          {"tau", fit.tau},
          {"d", fit.basis.cols()},
          {"p", fit.basis.rows()},
          {"eigenvalues", std::vector<double>(fit.eigenvalues.data(),
                                              fit.eigenvalues.data() +
                                                  fit.eigenvalues.size())},
          {"basis", matrix_to_json(fit.basis)},
          {"diagnostics", diagnostics}};
}

nlohmann::json to_json(const ExistenceReport& report) {
  return {{"exists", report.exists},
          {"witnesses", report.witnesses},
          {"threshold", report.threshold},
          {"witness_norms", report.witness_norms},
          {"minimum", report.minimum}};
}

nlohmann::json to_json(const TauSelection& selection) {
  nlohmann::json scores = nlohmann::json::array();
  for (double s : selection.scores) scores.push_back(number_or_null(s));
  return {{"grid", selection.grid},
          {"scores", scores},
          {"chosen", selection.chosen},
          {"folds", selection.folds},
          {"rng_seed", selection.rng_seed}};
}

nlohmann::json to_json(const AlsRecord& r) {
  return {{"iter", r.iter},
          {"objective", r.objective},
          {"a_norm", r.a_norm},
          {"c_norm", r.c_norm},
          {"product_norm", r.product_norm}};
}

nlohmann::json to_json(const Counterexample& ex) {
  return {{"slice", ex.slice},
          {"epsilon", ex.epsilon},
          {"leading_eigenvalue", ex.leading_eigenvalue},
          {"p", ex.a.rows()},
          {"d", ex.a.cols()},
          {"h", ex.c.cols()},
          {"A", matrix_to_json(ex.a)},
          {"C", matrix_to_json(ex.c)},
          {"analytic_gap", ex.gap}};
}

nlohmann::json trace_summary_json(const AlsTrace& trace) {
  return {{"stop_reason", to_string(trace.stop_reason)},
          {"iterations", trace.iterations},
          {"records", trace.records.size()},
          {"initial_a_norm", trace.initial_basis.norm()},
          {"final_a_norm", trace.final_a_norm},
          {"rank_warning", trace.rank_warning}};
}

std::string trace_to_jsonl(const AlsTrace& trace) {
  std::string out;
  for (const auto& r : trace.records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const AlsTrace& trace) {
  std::ostringstream os;
  os << "iter,objective,a_norm,c_norm,product_norm\n";
  for (const auto& r : trace.records) {
    os << r.iter << ',' << format_double(r.objective) << ','
       << format_double(r.a_norm) << ',' << format_double(r.c_norm) << ','
       << format_double(r.product_norm) << '\n';
  }
  return os.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buffer[1 << 15];
  while (in) {
    in.read(buffer, sizeof(buffer));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buffer, static_cast<std::size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

}  // namespace sirreg
