// Apache License, Version 2.0, refer to LICENSE.txt

// Batch driver: CSV ingestion, chain execution with reproducible seeding,
// structured outputs, the verification suite and prior simulation.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nggp/dataset.hh"
#include "nggp/diagnostics.hh"
#include "nggp/geweke.hh"
#include "nggp/hyper.hh"
#include "nggp/samplers.hh"

namespace nggp {

// One observation per row, comma separated; a first row that does not parse
// as numbers is a header. Throws std::runtime_error naming the line on
// parse errors and ragged rows, and on empty input.
Dataset parse_csv(std::istream& in);
Dataset load_csv(const std::string& path);

// Shortest round-trip decimal representation.
std::string format_double(double x);

enum class ModelKind { kConjugate1d, kNonconjugate };
// "conjugate-1d", "nonconjugate" or "nonconjugate-<D>d".
ModelKind parse_model(const std::string& name);
const char* model_name(ModelKind m);

struct RunConfig {
  std::string data_path;
  ModelKind model = ModelKind::kNonconjugate;
  SamplerKind sampler = SamplerKind::kSlice;
  std::size_t C = 1;
  std::size_t iters = 200000;   // after burn-in
  std::size_t burnin = 10000;
  std::size_t thin = 20;
  std::uint64_t seed = 1;
  HyperPrior prior;
  double tau = 1.0;             // fixed value, or initial value if inferred
  double a_init = 1.0;
  double sigma_init = 0.3;
  std::string out_dir = "out";
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t grid_points = 200;
  bool compute_density = true;

  // Throws std::invalid_argument on an invalid or incompatible setting.
  void validate() const;
};

struct SampleRecord {
  std::size_t iteration = 0;
  std::size_t num_clusters = 0;
  double a = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double log_u = 0.0;
};

struct RunResult {
  std::vector<SampleRecord> samples;
  std::vector<std::vector<int>> labels;
  std::vector<double> coclust;                 // n x n
  Dataset grid;                                // density grid points
  DensitySummary density;
  double runtime_seconds = 0.0;                // sweeps only
  double ess_num_clusters = 0.0;
  double mean_num_clusters = 0.0;
  std::size_t truncation_events = 0;
  double mean_random_atoms = 0.0;

  std::vector<double> num_clusters_series() const;
};

RunResult run_chain(const RunConfig& config, const Dataset& data);
void write_outputs(const RunConfig& config, const Dataset& data, const RunResult& result);
// load, run, write; returns a process exit status.
int run_command(const RunConfig& config);

// ---------------------------------------------------------------------------
// Verification.

// The Geweke setup used for each sampler: n = 5 one-dimensional
// observations; collapsed sampler on the conjugate model, the others on the
// nonconjugate one. With `broken` the U update is skipped.
GewekeResult sampler_geweke(SamplerKind kind, std::size_t samples,
                            std::uint64_t seed, bool broken = false);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class VerifyLevel { kQuick, kDefault };

std::vector<VerifyCheck> verify_suite(VerifyLevel level, std::uint64_t seed);
// Prints the JSON report; returns nonzero if any check failed.
int verify_command(VerifyLevel level, std::uint64_t seed, std::ostream& out);

// ---------------------------------------------------------------------------
// Prior simulation of cluster counts.

struct PriorSimConfig {
  NggpParams params{1.0, 0.5, 1.0};
  std::vector<std::size_t> ns{100, 1000, 10000};
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  std::string out_dir = "prior_sim";
};

struct PriorSimSummary {
  std::vector<std::size_t> ns;
  // counts[j][r]: clusters after ns[j] observations in replicate r.
  std::vector<std::vector<std::size_t>> counts;
  std::size_t threshold_raised = 0;

  std::vector<double> means() const;
  // Least-squares slope of log mean count on log n.
  double power_law_slope() const;
};

PriorSimSummary prior_sim(const PriorSimConfig& config);
int prior_sim_command(const PriorSimConfig& config);

}  // namespace nggp
