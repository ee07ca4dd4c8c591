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

#include "reckga/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "reckga/analytic.hpp"

namespace reckga {

double similarity(const MeasurementSet& data, const UnitaryMatrix& u) {
  if (data.modes() != u.dim()) throw ShapeError("similarity: data and unitary have different m");
  double sum = 0.0;
  int used = 0;
  for (const VisibilityEntry& e : data.visibilities()) {
    const TwoPhotonPrediction t = predict_two_photon(u.matrix(), e.i, e.j, e.p, e.q);
    if (!t.defined) continue;
    sum += std::abs(e.value - t.visibility);
    ++used;
  }
  if (used == 0) throw UndefinedMetricError("similarity needs at least one visibility entry");
  return 1.0 - sum / (2.0 * used);
}

GateFidelity gate_fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) throw ShapeError("gate_fidelity: dimension mismatch");
  GateFidelity out;
  out.raw = std::min(1.0, trace_fidelity(a.matrix(), b.matrix()));
  const GaugeAlignment g = align_gauge(a, b);
  out.aligned = std::max(g.fidelity, out.raw);
  out.conjugated = g.conjugated;
  return out;
}

std::string to_string(McMethod m) { return m == McMethod::kAnalytic ? "analytic" : "ga-short"; }

McMethod mc_method_from_string(const std::string& s) {
  if (s == "analytic") return McMethod::kAnalytic;
  if (s == "ga-short") return McMethod::kGaShort;
  throw ConfigError("unknown Monte Carlo method '" + s + "'");
}

MeasurementSet resample(const MeasurementSet& data, Rng& rng, long* clipped) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int m = data.modes();
  long clips = 0;
  Eigen::MatrixXd p = data.probabilities();
  const Eigen::MatrixXd& dp = data.probability_errors();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double draw = p(i, j) + dp(i, j) * gauss(rng);
      const double kept = std::clamp(draw, 0.0, 1.0);
      if (kept != draw) ++clips;
      p(i, j) = kept;
    }
  std::vector<VisibilityEntry> v = data.visibilities();
  for (VisibilityEntry& e : v) {
    const double draw = e.value + e.error * gauss(rng);
    if (draw > 1.0) ++clips;
    e.value = std::min(draw, 1.0);
  }
  if (clipped) *clipped += clips;
  return MeasurementSet(m, std::move(p), dp, std::move(v));
}

namespace {

std::optional<UnitaryMatrix> reconstruct(const MeasurementSet& data, const MonteCarloOptions& opts,
                                         std::uint64_t seed) {
  const int s1 = opts.method == McMethod::kAnalytic ? 1 : opts.ga_short.analytic_seeds;
  const SeedPool pool = seed_pool(data, std::min(s1, data.modes() * data.modes()), opts.weight);
  if (opts.method == McMethod::kAnalytic) {
    if (pool.unitaries.empty()) return std::nullopt;
    return pool.unitaries.front();
  }
  GaConfig cfg = opts.ga_short;
  cfg.weight = opts.weight;
  cfg.seed = seed;
  cfg.threads = 1;
  cfg.record_timing = false;
  return dna_to_unitary(evolve(data, cfg, pool.seeds).best);
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double std_of(const std::vector<double>& x, double mean) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

}  // namespace

MonteCarloResult monte_carlo_uncertainty(const MeasurementSet& data, const UnitaryMatrix& reference, int n,
                                         Rng& rng, const MonteCarloOptions& opts) {
  if (n < 2) throw ConfigError("Monte Carlo needs n >= 2");
  if (reference.dim() != data.modes()) throw ShapeError("reference and data have different m");
  const std::uint64_t master = rng();

  std::vector<double> fid(static_cast<std::size_t>(n), 0.0);
  std::vector<double> sim(static_cast<std::size_t>(n), 0.0);
  std::vector<char> ok(static_cast<std::size_t>(n), 0);
  std::vector<long> clips(static_cast<std::size_t>(n), 0);
  const int threads = opts.threads > 0 ? opts.threads : std::max(1, omp_get_num_procs());

#pragma omp parallel for num_threads(threads) schedule(dynamic, 8)
  for (int k = 0; k < n; ++k) {
    const auto slot = static_cast<std::size_t>(k);
    Rng stream = derive_stream(master, static_cast<std::uint64_t>(k));
    const MeasurementSet draw = resample(data, stream, &clips[slot]);
    try {
      const std::optional<UnitaryMatrix> u = reconstruct(draw, opts, stream());
      if (!u) continue;
      fid[slot] = gate_fidelity(*u, reference).aligned;
      if (opts.evaluated) sim[slot] = similarity(draw, *opts.evaluated);
      ok[slot] = 1;
    } catch (const std::exception&) {
      ok[slot] = 0;
    }
  }

  MonteCarloResult out;
  std::vector<double> f, s;
  for (int k = 0; k < n; ++k) {
    const auto slot = static_cast<std::size_t>(k);
    out.clipped += clips[slot];
    if (!ok[slot]) {
      ++out.failures;
      continue;
    }
    f.push_back(fid[slot]);
    s.push_back(sim[slot]);
  }
  out.samples = static_cast<int>(f.size());
  if (out.failures * 5 > n || out.samples < 2)
    throw MonteCarloError(std::to_string(out.failures) + " of " + std::to_string(n) +
                          " resamples failed to reconstruct");
  out.mean_fidelity = mean_of(f);
  out.std_fidelity = std_of(f, out.mean_fidelity);
  if (opts.evaluated) {
    out.mean_similarity = mean_of(s);
    out.std_similarity = std_of(s, *out.mean_similarity);
  }
  return out;
}

EvaluationReport evaluate(const MeasurementSet& data, const UnitaryMatrix& u, const EvaluateOptions& opts) {
  EvaluationReport r;
  r.m = data.modes();
  r.weight = opts.weight;
  const FitnessValue fit = fitness(u, data, opts.weight);
  r.chi2_p = fit.chi2_p;
  r.chi2_v = fit.chi2_v;
  r.chi2 = fit.chi2;
  r.similarity = similarity(data, u);
  r.visibility_entries = data.visibility_count();
  r.excluded_entries = fit.excluded;
  if (fit.excluded > 0) r.flags.push_back("excluded_undefined_visibilities");

  if (opts.reference) {
    const GateFidelity g = gate_fidelity(*opts.reference, u);
    r.raw_fidelity = g.raw;
    r.aligned_fidelity = g.aligned;
    r.conjugated = g.conjugated;
  }
  if (opts.mc_samples > 0) {
    if (!opts.reference) throw ConfigError("Monte Carlo fidelity needs a reference unitary");
    MonteCarloOptions mc = opts.mc;
    mc.weight = opts.weight;
    mc.evaluated = u;
    Rng rng(opts.mc_seed);
    const MonteCarloResult res = monte_carlo_uncertainty(data, *opts.reference, opts.mc_samples, rng, mc);
    r.mc_mean_fidelity = res.mean_fidelity;
    r.mc_std_fidelity = res.std_fidelity;
    r.similarity_std = res.std_similarity;
    r.mc_samples = res.samples;
    r.mc_failures = res.failures;
    r.mc_clipped = res.clipped;
    r.mc_method = to_string(mc.method);
    if (res.clipped > 0) r.flags.push_back("mc_clipped_draws");
    if (res.failures > 0) r.flags.push_back("mc_failed_resamples");
  }
  return r;
}

}  // namespace reckga
