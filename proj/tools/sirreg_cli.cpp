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

// sirreg: command-line front end for sliced inverse regression with
// regularization.
//
// Exit codes: 0 ok, 1 input/usage error, 2 numerical failure, 3 infeasible
// request.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sirreg/criteria.hpp"
#include "sirreg/evalsim.hpp"
#include "sirreg/io.hpp"
#include "sirreg/moments.hpp"
#include "sirreg/ridge_als.hpp"
#include "sirreg/rsir.hpp"

#ifndef SIRREG_VERSION
#define SIRREG_VERSION "0.0.0"
#endif

namespace {

using namespace sirreg;
using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kInput = 1, kNumerical = 2, kInfeasible = 3 };

// Values resolved at run time (e.g. fixture slice counts), merged into the
// manifest.
json g_effective = json::object();

// Where the data for a run comes from: a CSV file, a built-in fixture or
// the simulator.
struct DataSource {
  std::string input;
  std::string response = "y";
  std::string fixture;
  bool simulate = false;
  int slices = 5;

  // Simulator parameters (also used by the simulate subcommand).
  long n = 200;
  long p = 5;
  std::string link = "cubic";
  double noise = 0.1;
  double rho = 0.0;
  std::uint64_t sim_seed = 0;
  long index_size = 2;
};

struct LoadedData {
  Dataset data;
  int slices;
  // Fixtures can pin the ALS start so traces are reproducible by hand.
  std::optional<Basis> preferred_start;
};

void add_sim_options(CLI::App* cmd, DataSource& src) {
  cmd->add_option("--n", src.n, "Number of simulated observations")->check(CLI::PositiveNumber);
  cmd->add_option("--p", src.p, "Number of simulated predictors")->check(CLI::PositiveNumber);
  cmd->add_option("--link", src.link, "Link function")
      ->check(CLI::IsMember({"linear", "cubic", "sinh", "quadratic"}));
  cmd->add_option("--noise", src.noise, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rho", src.rho, "AR(1) predictor correlation in [0, 1)");
  cmd->add_option("--sim-seed", src.sim_seed, "Simulator seed");
  cmd->add_option("--index-size", src.index_size,
                  "True direction is (e_1 + ... + e_k)/sqrt(k) for this k")
      ->check(CLI::PositiveNumber);
}

void add_data_options(CLI::App* cmd, DataSource& src, bool allow_simulate) {
  auto* input = cmd->add_option("--input", src.input, "CSV file with a header row");
  cmd->add_option("--response", src.response, "Response column: header name or 0-based index");
  auto* fixture = cmd->add_option("--fixture", src.fixture, "Built-in dataset: toy or constant")
                      ->check(CLI::IsMember({"toy", "constant"}));
  cmd->add_option("--slices", src.slices, "Number of slices h")->check(CLI::PositiveNumber);
  input->excludes(fixture);
  if (allow_simulate) {
    auto* sim = cmd->add_flag("--simulate", src.simulate, "Draw data from the simulator");
    sim->excludes(input)->excludes(fixture);
    add_sim_options(cmd, src);
  }
}

SimSpec sim_spec(const DataSource& src) {
  SimSpec spec;
  spec.n = src.n;
  spec.p = src.p;
  spec.true_basis = leading_direction(src.p, src.index_size);
  spec.link = parse_link(src.link);
  spec.noise_sd = src.noise;
  spec.predictor_correlation = src.rho;
  spec.rng_seed = src.sim_seed;
  return spec;
}

LoadedData load_data(const DataSource& src, const CLI::App* cmd);

LoadedData load(const DataSource& src, const CLI::App* cmd) {
  LoadedData loaded = load_data(src, cmd);
  g_effective["n"] = loaded.data.n();
  g_effective["p"] = loaded.data.p();
  g_effective["slices"] = loaded.slices;
  return loaded;
}

LoadedData load_data(const DataSource& src, const CLI::App* cmd) {
  const bool slices_given = cmd->count("--slices") > 0;
  if (src.fixture == "toy") {
    Matrix x(4, 2);
    x << 0, 0, 2, 0, 0, 2, 2, 2;
    Vector y(4);
    y << 1, 2, 3, 4;
    return {Dataset(x, y), slices_given ? src.slices : 2,
            (Basis(2, 1) << 0.0, 1.0).finished()};
  }
  if (src.fixture == "constant") {
    Vector y(6);
    y << 1, 2, 3, 4, 5, 6;
    return {Dataset(Matrix::Constant(6, 2, 1.5), y), slices_given ? src.slices : 2, {}};
  }
  if (src.simulate) return {simulate(sim_spec(src)), src.slices, {}};
  if (src.input.empty()) {
    throw InputError("no data: pass --input, --fixture" +
                     std::string(cmd->get_option_no_throw("--simulate") ? " or --simulate" : ""));
  }
  return {read_dataset_csv(fs::path(src.input), src.response).data, src.slices, {}};
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void write_json(const std::string& path, const json& value) {
  if (path.empty() || path == "-") {
    std::cout << value.dump(2) << '\n';
  } else {
    atomic_write(path, value.dump(2) + "\n");
  }
}

// Every resolved option of the subcommand, keyed by its long name.
json resolved_parameters(const CLI::App* cmd) {
  json params = json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_max() == 0) {
      params[name] = opt->count() > 0;
      continue;
    }
    const auto results = opt->results();
    if (results.empty()) {
      const std::string def = opt->get_default_str();
      params[name] = def.empty() ? json(nullptr) : json(def);
    } else if (results.size() == 1) {
      params[name] = results.front();
    } else {
      params[name] = results;
    }
  }
  return params;
}

// --- subcommands ---------------------------------------------------------

struct SummarizeArgs {
  DataSource src;
  std::string output;
};

int cmd_summarize(const SummarizeArgs& args, const CLI::App* cmd) {
  const LoadedData loaded = load(args.src, cmd);
  const SlicedMoments m = compute_sliced_moments(loaded.data, loaded.slices);
  const Matrix centered = m.centered_means();
  const Index rank = numerical_rank(m.sigma);
  const double cond = condition_number(m.sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> gamma_eig(m.gamma, Eigen::EigenvaluesOnly);
  const Vector gamma_ev = gamma_eig.eigenvalues().reverse();
  const Index top = std::min<Index>(5, gamma_ev.size());

  std::cout << "n = " << m.n << ", p = " << m.p() << ", h = " << m.h() << '\n';
  std::cout << "slice  f_y       ||xbar_y - xbar||\n";
  for (Index y = 0; y < m.h(); ++y) {
    std::cout << std::setw(5) << y << "  " << std::setw(8) << fmt(m.f(y), 4) << "  "
              << fmt(centered.col(y).norm()) << '\n';
  }
  std::cout << "rank(Sigma_x) = " << rank << ", condition = "
            << (std::isfinite(cond) ? fmt(cond) : std::string("inf")) << '\n';
  std::cout << "top eigenvalues of Gamma:";
  for (Index j = 0; j < top; ++j) std::cout << ' ' << fmt(gamma_ev(j));
  std::cout << '\n';

  if (!args.output.empty()) {
    std::vector<double> norms;
    for (Index y = 0; y < m.h(); ++y) norms.push_back(centered.col(y).norm());
    write_json(args.output,
               {{"n", m.n},
                {"p", m.p()},
                {"h", m.h()},
                {"f", std::vector<double>(m.f.data(), m.f.data() + m.h())},
                {"slice_mean_norms", norms},
                {"sigma_rank", rank},
                {"sigma_condition", std::isfinite(cond) ? json(cond) : json(nullptr)},
                {"gamma_top_eigenvalues",
                 std::vector<double>(gamma_ev.data(), gamma_ev.data() + top)}});
  }
  return kOk;
}

struct FitArgs {
  DataSource src;
  int dim = 1;
  std::string method = "sir";
  std::optional<double> tau;
  std::string output;
  std::string basis_csv;
};

int cmd_fit(const FitArgs& args, const CLI::App* cmd) {
  const LoadedData loaded = load(args.src, cmd);
  const SlicedMoments m = compute_sliced_moments(loaded.data, loaded.slices);
  FitResult fit;
  if (args.method == "sir") {
    if (args.tau) throw InputError("--tau only applies to --method rsir");
    fit = fit_sir(m, args.dim);
  } else {
    if (!args.tau) throw InputError("--method rsir requires --tau");
    fit = fit_rsir(m, args.dim, *args.tau);
  }
  write_json(args.output, to_json(fit));
  if (!args.basis_csv.empty()) {
    std::ostringstream os;
    write_basis_csv(os, fit.basis);
    atomic_write(args.basis_csv, os.str());
  }
  return kOk;
}

struct DegeneracyArgs {
  DataSource src;
  double tau = 1.0;
  int dim = 1;
  int iters = 1000;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  double a_tol = 1e-8;
  std::string trace;
  std::string report;
};

int cmd_degeneracy(const DegeneracyArgs& args, const CLI::App* cmd) {
  if (!(args.tau > 0.0)) {
    throw InputError("--tau must be > 0: the ridge criterion is only analysed for tau > 0");
  }
  const LoadedData loaded = load(args.src, cmd);
  const SlicedMoments m = compute_sliced_moments(loaded.data, loaded.slices);
  const ExistenceReport existence = check_existence(m);

  AlsConfig config;
  config.tau = args.tau;
  config.d = args.dim;
  config.max_iters = args.iters;
  config.rng_seed = args.seed;
  config.init_scale = args.init_scale;
  config.a_norm_tolerance = args.a_tol;
  if (loaded.preferred_start && loaded.preferred_start->cols() == args.dim &&
      cmd->count("--seed") == 0 && cmd->count("--init-scale") == 0) {
    config.initial_basis = loaded.preferred_start;
  }
  const AlsTrace trace = run_als(m, config);

  if (!args.trace.empty()) {
    const bool csv = fs::path(args.trace).extension() == ".csv";
    atomic_write(args.trace, csv ? trace_to_csv(trace) : trace_to_jsonl(trace));
  }
  if (!args.report.empty()) {
    write_json(args.report, {{"existence", to_json(existence)}, {"als", trace_summary_json(trace)}});
  }

  const double initial = trace.initial_basis.norm();
  if (existence.exists) {
    std::cout << "minimizer exists; minimum = sum_y f_y ||xbar_y - xbar||^2 = "
              << fmt(existence.minimum) << ", A_hat = 0\n";
  } else {
    std::cout << "minimizer absent; iterates collapsing: ||A|| ratio "
              << fmt(initial > 0.0 ? trace.final_a_norm / initial : 0.0) << " after "
              << trace.iterations << " iterations (" << to_string(trace.stop_reason) << ")\n";
  }
  if (trace.rank_warning) {
    std::cerr << "warning: d exceeds rank(Sigma_x)\n";
  }
  return kOk;
}

struct CounterexampleArgs {
  DataSource src;
  double tau = 1.0;
  int dim = 1;
  double epsilon_fraction = 0.5;
  std::string output;
};

int cmd_counterexample(const CounterexampleArgs& args, const CLI::App* cmd) {
  const LoadedData loaded = load(args.src, cmd);
  const SlicedMoments m = compute_sliced_moments(loaded.data, loaded.slices);
  Counterexample ex;
  try {
    ex = construct_counterexample(m, args.tau, args.dim, args.epsilon_fraction);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("no counterexample possible: ") + e.what());
  }
  const double direct = eval_G_tau(m, ex.a, ex.c, args.tau) -
                        eval_G_tau(m, Basis::Zero(m.p(), args.dim), ex.c, args.tau);
  const double rel = std::abs(direct - ex.gap) / std::max(std::abs(ex.gap), 1e-300);
  json out = to_json(ex);
  out["tau"] = args.tau;
  out["direct_gap"] = direct;
  out["relative_disagreement"] = rel;
  out["verified"] = rel <= 1e-10;
  write_json(args.output, out);
  std::cout << "gap = " << fmt(ex.gap, 12) << " (direct " << fmt(direct, 12) << ")\n";
  if (rel > 1e-10) {
    std::cerr << "error: analytic and re-evaluated gaps disagree (relative " << rel << ")\n";
    return kNumerical;
  }
  return kOk;
}

struct CvArgs {
  DataSource src;
  int dim = 1;
  std::vector<double> grid;
  int folds = 5;
  std::uint64_t seed = 0;
  std::string output;
  std::string scores_csv;
};

int cmd_cv(const CvArgs& args, const CLI::App* cmd) {
  const LoadedData loaded = load(args.src, cmd);
  const TauSelection sel =
      select_tau_cv(loaded.data, loaded.slices, args.dim, args.grid, args.folds, args.seed);
  write_json(args.output, to_json(sel));
  if (!args.scores_csv.empty()) {
    std::ostringstream os;
    os << "tau,score\n" << std::setprecision(17);
    for (std::size_t i = 0; i < sel.grid.size(); ++i) {
      os << sel.grid[i] << ',' << (std::isfinite(sel.scores[i]) ? fmt(sel.scores[i], 17) : "inf")
         << '\n';
    }
    atomic_write(args.scores_csv, os.str());
  }
  std::cerr << "chosen tau = " << sel.chosen << '\n';
  return kOk;
}

struct SimulateArgs {
  DataSource src;
  std::string output;
  std::string basis_out;
};

int cmd_simulate(const SimulateArgs& args) {
  const SimSpec spec = sim_spec(args.src);
  const Dataset data = simulate(spec);
  std::ostringstream os;
  write_dataset_csv(os, data);
  atomic_write(args.output, os.str());
  if (!args.basis_out.empty()) {
    std::ostringstream bs;
    write_basis_csv(bs, spec.true_basis);
    atomic_write(args.basis_out, bs.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliced inverse regression with regularization"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", SIRREG_VERSION);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path,
                 "Run manifest path (default: <output>.manifest.json, else stderr)");

  std::function<int()> run;
  const CLI::App* active = nullptr;
  std::string primary_output;
  std::vector<std::string> inputs;

  SummarizeArgs summarize;
  auto* sum_cmd = app.add_subcommand("summarize", "Print sliced-moment diagnostics");
  add_data_options(sum_cmd, summarize.src, true);
  sum_cmd->add_option("--output", summarize.output, "Also write the summary as JSON");
  sum_cmd->callback([&] {
    active = sum_cmd;
    primary_output = summarize.output;
    inputs = {summarize.src.input};
    run = [&] { return cmd_summarize(summarize, sum_cmd); };
  });

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the central subspace (SIR or RSIR)");
  add_data_options(fit_cmd, fit.src, true);
  fit_cmd->add_option("--dim", fit.dim, "Subspace dimension d")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--method", fit.method, "sir or rsir")->check(CLI::IsMember({"sir", "rsir"}));
  fit_cmd->add_option("--tau", fit.tau, "Ridge parameter (rsir only)");
  fit_cmd->add_option("--output", fit.output, "FitResult JSON path (default: stdout)");
  fit_cmd->add_option("--basis-csv", fit.basis_csv, "Also write the basis as CSV");
  fit_cmd->callback([&] {
    active = fit_cmd;
    primary_output = fit.output;
    inputs = {fit.src.input};
    run = [&] { return cmd_fit(fit, fit_cmd); };
  });

  DegeneracyArgs deg;
  auto* deg_cmd = app.add_subcommand("degeneracy", "Existence check and ridge ALS trace");
  add_data_options(deg_cmd, deg.src, true);
  deg_cmd->add_option("--tau", deg.tau, "Ridge parameter, must be > 0");
  deg_cmd->add_option("--dim", deg.dim, "Subspace dimension d")->check(CLI::PositiveNumber);
  deg_cmd->add_option("--iters", deg.iters, "Maximum ALS iterations")->check(CLI::PositiveNumber);
  deg_cmd->add_option("--seed", deg.seed, "Seed of the random start");
  deg_cmd->add_option("--init-scale", deg.init_scale, "Scale of the random start");
  deg_cmd->add_option("--a-tol", deg.a_tol, "Stop once ||A||_F falls below this")
      ->check(CLI::PositiveNumber);
  deg_cmd->add_option("--trace", deg.trace, "Trace output (.csv for CSV, otherwise JSON lines)");
  deg_cmd->add_option("--report", deg.report, "Existence report + trace summary JSON");
  deg_cmd->callback([&] {
    active = deg_cmd;
    primary_output = deg.report;
    inputs = {deg.src.input};
    run = [&] { return cmd_degeneracy(deg, deg_cmd); };
  });

  CounterexampleArgs cex;
  auto* cex_cmd = app.add_subcommand("counterexample", "Build (A, C) with G_tau(A,C) < G_tau(0,C)");
  add_data_options(cex_cmd, cex.src, true);
  cex_cmd->add_option("--tau", cex.tau, "Ridge parameter, must be > 0");
  cex_cmd->add_option("--dim", cex.dim, "Subspace dimension d")->check(CLI::PositiveNumber);
  cex_cmd->add_option("--epsilon-fraction", cex.epsilon_fraction, "Position of epsilon in (0, 1)");
  cex_cmd->add_option("--output", cex.output, "Counterexample JSON path (default: stdout)");
  cex_cmd->callback([&] {
    active = cex_cmd;
    primary_output = cex.output;
    inputs = {cex.src.input};
    run = [&] { return cmd_counterexample(cex, cex_cmd); };
  });

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "Select tau for RSIR by cross-validation");
  add_data_options(cv_cmd, cv.src, true);
  cv_cmd->add_option("--dim", cv.dim, "Subspace dimension d")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--grid", cv.grid, "Strictly increasing tau values, comma separated")
      ->required()
      ->delimiter(',');
  cv_cmd->add_option("--folds", cv.folds, "Number of folds (>= 2)");
  cv_cmd->add_option("--seed", cv.seed, "Fold assignment seed");
  cv_cmd->add_option("--output", cv.output, "TauSelection JSON path (default: stdout)");
  cv_cmd->add_option("--scores-csv", cv.scores_csv, "Score-vs-tau CSV path");
  cv_cmd->callback([&] {
    active = cv_cmd;
    primary_output = cv.output;
    inputs = {cv.src.input};
    run = [&] { return cmd_cv(cv, cv_cmd); };
  });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated dataset as CSV");
  add_sim_options(sim_cmd, sim.src);
  sim_cmd->add_option("--seed", sim.src.sim_seed, "Simulator seed");
  sim_cmd->add_option("--output", sim.output, "Dataset CSV path")->required();
  sim_cmd->add_option("--basis-out", sim.basis_out, "Write the true basis as CSV");
  sim_cmd->callback([&] {
    active = sim_cmd;
    primary_output = sim.output;
    run = [&] { return cmd_simulate(sim); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  const auto start = std::chrono::steady_clock::now();
  int rc = kOk;
  std::string error;
  try {
    rc = run();
  } catch (const InputError& e) {
    rc = kInput;
    error = e.what();
  } catch (const NumericalError& e) {
    rc = kNumerical;
    error = e.what();
  } catch (const InfeasibleError& e) {
    rc = kInfeasible;
    error = e.what();
  } catch (const std::exception& e) {
    rc = kInput;
    error = e.what();
  }
  if (!error.empty()) std::cerr << "error: " << error << '\n';

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json digests = json::object();
  for (const auto& path : inputs) {
    if (path.empty()) continue;
    try {
      digests[path] = file_sha256(path);
    } catch (const std::exception&) {
      digests[path] = nullptr;
    }
  }
  const json manifest = {{"subcommand", active->get_name()},
                         {"parameters", resolved_parameters(active)},
                         {"effective", g_effective},
                         {"input_digests", digests},
                         {"tool_version", SIRREG_VERSION},
                         {"exit_code", rc},
                         {"duration_seconds", seconds}};
  std::string target = manifest_path;
  if (target.empty() && !primary_output.empty() && primary_output != "-") {
    target = primary_output + ".manifest.json";
  }
  try {
    if (target.empty()) {
      std::cerr << manifest.dump() << '\n';
    } else {
      atomic_write(target, manifest.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (rc == kOk) rc = kInput;
  }
  return rc;
}
