// Apache License, Version 2.0, refer to LICENSE.txt

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "nggp/cli.hh"
#include "nggp/kernels.hh"

namespace nggp {

ModelKind parse_model(const std::string& name) {
  if (name == "conjugate-1d" || name == "conjugate") return ModelKind::kConjugate1d;
  if (name.starts_with("nonconjugate")) return ModelKind::kNonconjugate;
  throw std::invalid_argument("unknown model '" + name + "'");
}

const char* model_name(ModelKind m) {
  return m == ModelKind::kConjugate1d ? "conjugate-1d" : "nonconjugate";
}

void RunConfig::validate() const {
  if (burnin + iters < 1) throw std::invalid_argument("burnin + iters must be >= 1");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (C < 1) throw std::invalid_argument("C must be >= 1");
  if (sampler == SamplerKind::kMarginalConjugate && model != ModelKind::kConjugate1d) {
    throw std::invalid_argument("sampler marg-conj requires model conjugate-1d");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(a_init > 0.0)) throw std::invalid_argument("initial a must be positive");
  if (!(sigma_init >= 0.0 && sigma_init < 1.0)) {
    throw std::invalid_argument("initial sigma must lie in [0, 1)");
  }
  if (prior.infer_sigma && sigma_init == 0.0) {
    throw std::invalid_argument("inferring sigma needs an initial value in (0, 1)");
  }
  if (grid_points < 2) throw std::invalid_argument("grid-points must be >= 2");
  if (grid_min && grid_max && !(*grid_min < *grid_max)) {
    throw std::invalid_argument("grid-min must be below grid-max");
  }
}

std::vector<double> RunResult::num_clusters_series() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(static_cast<double>(s.num_clusters));
  return out;
}

namespace {

// Per-dimension grid over the data range padded by 10%, or over
// [grid_min, grid_max] when given. Products of axes for D = 2.
Dataset build_grid(const RunConfig& config, const Dataset& data) {
  const std::size_t d = data.dim();
  if (d > 2) return Dataset(0, d);
  std::vector<std::vector<double>> axes(d);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = data(0, j), hi = data(0, j);
    for (std::size_t i = 1; i < data.size(); ++i) {
      lo = std::min(lo, data(i, j));
      hi = std::max(hi, data(i, j));
    }
    double pad = 0.1 * (hi - lo);
    lo = config.grid_min.value_or(lo - pad);
    hi = config.grid_max.value_or(hi + pad);
    for (std::size_t g = 0; g < config.grid_points; ++g) {
      axes[j].push_back(lo + (hi - lo) * static_cast<double>(g) /
                                 static_cast<double>(config.grid_points - 1));
    }
  }
  if (d == 1) return Dataset::column(axes[0]);
  std::vector<double> values;
  for (double x : axes[0]) {
    for (double y : axes[1]) {
      values.push_back(x);
      values.push_back(y);
    }
  }
  return Dataset(axes[0].size() * axes[1].size(), 2, std::move(values));
}

template <typename Kernel>
RunResult run_with(const RunConfig& config, const Dataset& data, Kernel kernel) {
  using Clock = std::chrono::steady_clock;
  ChainState<Kernel> s(data, std::move(kernel),
                       NggpParams(config.a_init, config.sigma_init, config.tau));
  SamplerOptions opts;
  opts.C = config.C;
  opts.prior = config.prior;
  Rng rng(config.seed, 0);

  RunResult result;
  if (config.compute_density) result.grid = build_grid(config, data);
  const bool density = config.compute_density && result.grid.size() > 0;
  std::vector<std::vector<double>> densities;
  Coclustering cocluster(data.size());
  double atoms = 0.0;

  auto start = Clock::now();
  initialize_chain(s, config.sampler, opts, rng);
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

  const std::size_t total = config.burnin + config.iters;
  for (std::size_t it = 1; it <= total; ++it) {
    auto t0 = Clock::now();
    sweep(s, config.sampler, opts, rng);
    elapsed += std::chrono::duration<double>(Clock::now() - t0).count();
    if (it <= config.burnin || (it - config.burnin) % config.thin != 0) continue;

    SampleRecord rec;
    rec.iteration = it;
    rec.num_clusters = s.partition.num_clusters();
    rec.a = s.params.a;
    rec.sigma = s.params.sigma;
    rec.tau = s.params.tau;
    rec.log_u = s.u.log_u;
    result.samples.push_back(rec);
    auto labels = s.partition.labels();
    cocluster.add(labels);
    result.labels.push_back(std::move(labels));
    atoms += static_cast<double>(s.num_random_atoms);
    if (density) densities.push_back(predictive_density(s, config.sampler, result.grid));
  }
  result.runtime_seconds = elapsed;
  result.truncation_events = s.truncation_events;
  if (!result.samples.empty()) {
    auto series = result.num_clusters_series();
    result.mean_num_clusters = sample_mean(series);
    result.ess_num_clusters = series.size() >= 10 ? ess(series) : static_cast<double>(series.size());
    result.mean_random_atoms = atoms / static_cast<double>(result.samples.size());
  }
  result.coclust = cocluster.matrix();
  if (density) result.density = summarize_densities(densities);
  return result;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (j) out << ',';
    const std::string& f = fields[j];
    if (f.find_first_of(",\"\n\r") != std::string::npos) {
      out << '"';
      for (char ch : f) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  out << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

RunResult run_chain(const RunConfig& config, const Dataset& data) {
  config.validate();
  if (config.model == ModelKind::kConjugate1d) {
    if (data.dim() != 1) throw std::invalid_argument("conjugate-1d needs one-dimensional data");
    return run_with(config, data, ConjugateNormalKernel(build_weakly_informative_conjugate(data)));
  }
  return run_with(config, data, GaussianKernel(build_weakly_informative(data)));
}

void write_outputs(const RunConfig& config, const Dataset& data, const RunResult& result) {
  namespace fs = std::filesystem;
  fs::path dir(config.out_dir);
  fs::create_directories(dir);

  {
    auto out = open_output(dir / "samples.csv");
    write_csv_row(out, {"iteration", "num_clusters", "a", "sigma", "tau", "log_u"});
    for (const auto& s : result.samples) {
      write_csv_row(out, {std::to_string(s.iteration), std::to_string(s.num_clusters),
                          format_double(s.a), format_double(s.sigma), format_double(s.tau),
                          format_double(s.log_u)});
    }
  }
  {
    auto out = open_output(dir / "labels.csv");
    for (const auto& labels : result.labels) {
      std::vector<std::string> row;
      row.reserve(labels.size());
      for (int l : labels) row.push_back(std::to_string(l));
      write_csv_row(out, row);
    }
  }
  {
    auto out = open_output(dir / "coclust.csv");
    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> row;
      row.reserve(n);
      for (std::size_t j = 0; j < n; ++j) row.push_back(format_double(result.coclust[i * n + j]));
      write_csv_row(out, row);
    }
  }
  if (!result.density.mean.empty()) {
    auto out = open_output(dir / "density_grid.csv");
    std::vector<std::string> header;
    if (result.grid.dim() == 1) {
      header = {"x"};
    } else {
      header = {"x1", "x2"};
    }
    for (const char* h : {"mean", "lower", "upper"}) header.emplace_back(h);
    write_csv_row(out, header);
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
      std::vector<std::string> row;
      for (double x : result.grid.row(g)) row.push_back(format_double(x));
      row.push_back(format_double(result.density.mean[g]));
      row.push_back(format_double(result.density.lower[g]));
      row.push_back(format_double(result.density.upper[g]));
      write_csv_row(out, row);
    }
  }
  {
    nlohmann::ordered_json j;
    j["runtime_seconds"] = result.runtime_seconds;
    j["ess_num_clusters"] = result.ess_num_clusters;
    j["mean_num_clusters"] = result.mean_num_clusters;
    j["num_samples"] = result.samples.size();
    j["seed"] = config.seed;
    j["truncation_events"] = result.truncation_events;
    j["mean_random_atoms"] = result.mean_random_atoms;
    nlohmann::ordered_json c;
    c["data"] = config.data_path;
    c["n"] = data.size();
    c["dim"] = data.dim();
    c["model"] = model_name(config.model);
    c["sampler"] = sampler_name(config.sampler);
    c["C"] = config.C;
    c["iters"] = config.iters;
    c["burnin"] = config.burnin;
    c["thin"] = config.thin;
    c["tau"] = config.tau;
    c["infer_tau"] = config.prior.infer_tau;
    c["a_prior"] = {config.prior.a_shape, config.prior.a_rate};
    c["sigma_prior"] = {config.prior.sigma_alpha, config.prior.sigma_beta};
    c["tau_prior"] = {config.prior.tau_shape, config.prior.tau_rate};
    c["infer_a"] = config.prior.infer_a;
    c["infer_sigma"] = config.prior.infer_sigma;
    j["config"] = c;
    auto out = open_output(dir / "summary.json");
    out << j.dump(2) << '\n';
  }
}

int run_command(const RunConfig& config) {
  try {
    config.validate();
    Dataset data = load_csv(config.data_path);
    RunResult result = run_chain(config, data);
    write_outputs(config, data, result);
    std::cout << "samples: " << result.samples.size()
              << "  mean clusters: " << result.mean_num_clusters
              << "  ESS(num_clusters): " << result.ess_num_clusters
              << "  runtime: " << result.runtime_seconds << " s\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nggp
