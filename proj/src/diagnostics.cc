// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/diagnostics.hh"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nggp {

double sample_mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double m = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double ess(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 10) throw std::invalid_argument("ess: need at least 10 values");
  const double nd = static_cast<double>(n);
  const double m = sample_mean(x);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - m;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / nd;
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) return nd;

  // Sum of pairs Gamma_m = gamma_2m + gamma_2m+1 while positive.
  double tau = -gamma0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = (lag == 0 ? gamma0 : autocov(lag)) + autocov(lag + 1);
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  double out = nd * gamma0 / tau;
  return std::clamp(out, 1.0, nd);
}

void Coclustering::add(std::span<const int> labels) {
  if (labels.size() != n_) throw std::invalid_argument("Coclustering: label length");
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      if (labels[i] == labels[j]) ++counts_[i * n_ + j];
    }
  }
  ++samples_;
}

std::vector<double> Coclustering::matrix() const {
  std::vector<double> out(n_ * n_, 0.0);
  if (samples_ == 0) return out;
  const double s = static_cast<double>(samples_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      double v = counts_[i * n_ + j] / s;
      out[i * n_ + j] = v;
      out[j * n_ + i] = v;
    }
  }
  return out;
}

std::vector<double> coclustering(const std::vector<std::vector<int>>& labels) {
  if (labels.empty()) throw std::invalid_argument("coclustering: no samples");
  Coclustering acc(labels.front().size());
  for (const auto& l : labels) acc.add(l);
  return acc.matrix();
}

namespace {

// Linear interpolation between order statistics (type 7).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  double h = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

DensitySummary summarize_densities(const std::vector<std::vector<double>>& per_sample) {
  DensitySummary out;
  if (per_sample.empty()) return out;
  const std::size_t g = per_sample.front().size();
  out.mean.assign(g, 0.0);
  out.lower.assign(g, 0.0);
  out.upper.assign(g, 0.0);
  std::vector<double> column(per_sample.size());
  for (std::size_t j = 0; j < g; ++j) {
    for (std::size_t s = 0; s < per_sample.size(); ++s) column[s] = per_sample[s][j];
    out.mean[j] = sample_mean(column);
    std::sort(column.begin(), column.end());
    out.lower[j] = quantile_sorted(column, 0.025);
    out.upper[j] = quantile_sorted(column, 0.975);
  }
  return out;
}

}  // namespace nggp
