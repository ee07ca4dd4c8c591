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

#include "reckga/ga.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace reckga {

namespace {

// Stream tags keep initialization draws apart from per-generation draws.
constexpr std::uint64_t kInitTag = 0xffffffffffff0001ULL;

int thread_count(int requested) {
  return requested > 0 ? requested : std::max(1, omp_get_num_procs());
}

}  // namespace

FitnessValue fitness(const UnitaryMatrix& u, const MeasurementSet& data, double w) {
  if (u.dim() != data.modes()) throw ShapeError("fitness: unitary and data have different m");
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("fitness weight must be in [0, 1]");
  const ComplexMatrix& mat = u.matrix();
  const int m = u.dim();
  const Eigen::MatrixXd& p = data.probabilities();
  const Eigen::MatrixXd& dp = data.probability_errors();

  FitnessValue out;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double r = (p(i, j) - std::norm(mat(j, i))) / dp(i, j);
      out.chi2_p += r * r;
    }
  for (const VisibilityEntry& e : data.visibilities()) {
    const TwoPhotonPrediction t = predict_two_photon(mat, e.i, e.j, e.p, e.q);
    if (!t.defined) {
      ++out.excluded;
      continue;
    }
    const double r = (e.value - t.visibility) / e.error;
    out.chi2_v += r * r;
  }
  out.chi2 = 2.0 * (w * out.chi2_p + (1.0 - w) * out.chi2_v);
  out.fitness = 1.0 / std::max(out.chi2, kChi2Floor);
  return out;
}

FitnessValue fitness(const Dna& e, const MeasurementSet& data, double w) {
  if (e.modes() != data.modes()) throw ShapeError("fitness: DNA and data have different m");
  return fitness(dna_to_unitary(e), data, w);
}

Dna crossover(const Dna& a, const Dna& b, Rng& rng) {
  if (a.modes() != b.modes()) throw ShapeError("crossover: parents have different m");
  const int count = a.size();
  std::vector<int> slots(static_cast<std::size_t>(count));
  std::iota(slots.begin(), slots.end(), 0);
  std::shuffle(slots.begin(), slots.end(), rng);
  // Which parent contributes the larger half when M is odd.
  const bool a_major = std::bernoulli_distribution(0.5)(rng);
  const int from_a = a_major ? (count + 1) / 2 : count / 2;

  std::vector<Gene> genes = b.genes();
  for (int k = 0; k < from_a; ++k) {
    const auto slot = static_cast<std::size_t>(slots[static_cast<std::size_t>(k)]);
    genes[slot] = a.genes()[slot];
  }
  return Dna(a.modes(), std::move(genes));
}

Mutation mutate(const Dna& d, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("mutation rate must be in [0, 1]");
  std::vector<Gene> genes = d.genes();
  std::bernoulli_distribution hit(rate);
  int count = 0;
  for (Gene& g : genes) {
    if (hit(rng)) {
      g = random_gene(rng);
      ++count;
    }
  }
  return {Dna(d.modes(), std::move(genes)), count};
}

void GaConfig::validate() const {
  if (population < 2) throw ConfigError("population must be >= 2");
  if (analytic_seeds < 0 || random_seeds < 0 || analytic_seeds + random_seeds != population)
    throw ConfigError("population must equal analytic_seeds + random_seeds");
  if (elite_count < 1 || elite_count >= population)
    throw ConfigError("elite_count must be in [1, population)");
  if (!(mutation_rate > 0.0 && mutation_rate < 1.0))
    throw ConfigError("mutation_rate must be in (0, 1)");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("weight must be in [0, 1]");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (stall_window < 1) throw ConfigError("stall_window must be >= 1");
  if (!(stall_relative_improvement >= 0.0)) throw ConfigError("stall tolerance must be >= 0");
  if (selection == Selection::kTournament && (tournament_size < 1 || tournament_size > population))
    throw ConfigError("tournament_size must be in [1, population]");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

std::string to_string(Selection s) {
  return s == Selection::kRoulette ? "roulette" : "tournament";
}

Selection selection_from_string(const std::string& s) {
  if (s == "roulette") return Selection::kRoulette;
  if (s == "tournament") return Selection::kTournament;
  throw ConfigError("unknown selection scheme '" + s + "'");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kStalled: return "stalled";
    case StopReason::kPerfectFit: return "perfect_fit";
  }
  return "unknown";
}

std::size_t RunTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const TraceEvent& e) { return e.kind == kind; }));
}

namespace {

class Engine {
 public:
  Engine(const MeasurementSet& data, Checkpoint state, const EvolveHooks& hooks)
      : data_(data), state_(std::move(state)), hooks_(hooks), threads_(thread_count(state_.config.threads)) {}

  EvolveResult run() {
    const GaConfig& cfg = state_.config;
    Population& pop = state_.population;
    const auto start = std::chrono::steady_clock::now();
    RunTrace trace;
    FitnessValue best_fit = fitness(state_.best, data_, cfg.weight);

    for (;;) {
      evaluate(pop);
      const long gen = pop.generation;
      const int s = static_cast<int>(pop.individuals.size());

      int leader = 0;
      double mean = 0.0;
      int mutations = 0;
      for (int k = 0; k < s; ++k) {
        const double c = pop.cache[static_cast<std::size_t>(k)]->chi2;
        mean += c / s;
        mutations += pop.mutations[static_cast<std::size_t>(k)];
        if (c < pop.cache[static_cast<std::size_t>(leader)]->chi2) leader = k;
      }
      const FitnessValue& lead = *pop.cache[static_cast<std::size_t>(leader)];
      if (lead.chi2 < state_.best_chi2) {
        if (!trace.records.empty() || gen > 0) {
          trace.events.push_back({gen, state_.best_chi2, lead.chi2,
                                  pop.mutations[static_cast<std::size_t>(leader)] > 0
                                      ? EventKind::kMutationJump
                                      : EventKind::kCrossoverStep});
        }
        state_.best = pop.individuals[static_cast<std::size_t>(leader)];
        state_.best_chi2 = lead.chi2;
        best_fit = lead;
      }

      double elapsed = 0.0;
      if (cfg.record_timing)
        elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      trace.records.push_back({gen, state_.best_chi2, mean, mutations, elapsed});

      auto& history = state_.best_history;
      history.push_back(state_.best_chi2);
      if (history.size() > static_cast<std::size_t>(cfg.stall_window) + 1) history.erase(history.begin());

      if (state_.best_chi2 <= 0.0) {
        trace.stop = StopReason::kPerfectFit;
        break;
      }
      if (gen + 1 >= cfg.max_iterations) {
        trace.stop = StopReason::kMaxIterations;
        break;
      }
      if (history.size() == static_cast<std::size_t>(cfg.stall_window) + 1) {
        const double old = history.front();
        if (old - state_.best_chi2 <= cfg.stall_relative_improvement * old) {
          trace.stop = StopReason::kStalled;
          break;
        }
      }

      breed(pop);
      if (hooks_.checkpoint_every > 0 && hooks_.on_checkpoint && pop.generation % hooks_.checkpoint_every == 0)
        hooks_.on_checkpoint(state_);
    }
    // The returned checkpoint resumes with the next generation.
    Checkpoint out = state_;
    breed(out.population);
    return {state_.best, best_fit, std::move(trace), std::move(out)};
  }

 private:
  void evaluate(Population& pop) const {
    const int s = static_cast<int>(pop.individuals.size());
    const double w = state_.config.weight;
#pragma omp parallel for num_threads(threads_) schedule(dynamic, 4)
    for (int k = 0; k < s; ++k) {
      auto& slot = pop.cache[static_cast<std::size_t>(k)];
      if (!slot) slot = fitness(pop.individuals[static_cast<std::size_t>(k)], data_, w);
    }
  }

  int select(const std::vector<double>& cumulative, const std::vector<int>& order, const Population& pop,
             Rng& rng) const {
    const GaConfig& cfg = state_.config;
    const int s = static_cast<int>(pop.individuals.size());
    if (cfg.selection == Selection::kTournament) {
      std::uniform_int_distribution<int> pick(0, s - 1);
      int winner = pick(rng);
      for (int r = 1; r < cfg.tournament_size; ++r) {
        const int c = pick(rng);
        if (pop.cache[static_cast<std::size_t>(c)]->chi2 < pop.cache[static_cast<std::size_t>(winner)]->chi2)
          winner = c;
      }
      return winner;
    }
    const double total = cumulative.back();
    if (!(total > 0.0) || !std::isfinite(total)) return std::uniform_int_distribution<int>(0, s - 1)(rng);
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cumulative.begin(), s - 1);
    return order[static_cast<std::size_t>(idx)];
  }

  // Replaces `pop` with the next generation.
  void breed(Population& pop) const {
    const GaConfig& cfg = state_.config;
    const int s = static_cast<int>(pop.individuals.size());
    std::vector<int> order(static_cast<std::size_t>(s));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return pop.cache[static_cast<std::size_t>(x)]->chi2 < pop.cache[static_cast<std::size_t>(y)]->chi2;
    });
    std::vector<double> cumulative(static_cast<std::size_t>(s));
    double acc = 0.0;
    for (int k = 0; k < s; ++k) {
      acc += pop.cache[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]->fitness;
      cumulative[static_cast<std::size_t>(k)] = acc;
    }

    Population next;
    next.generation = pop.generation + 1;
    next.individuals.reserve(static_cast<std::size_t>(s));
    for (int k = 0; k < cfg.elite_count; ++k) next.individuals.push_back(pop.individuals[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    for (int k = cfg.elite_count; k < s; ++k) next.individuals.push_back(pop.individuals[0]);
    next.cache.assign(static_cast<std::size_t>(s), std::nullopt);
    next.mutations.assign(static_cast<std::size_t>(s), 0);
    for (int k = 0; k < cfg.elite_count; ++k)
      next.cache[static_cast<std::size_t>(k)] = pop.cache[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];

#pragma omp parallel for num_threads(threads_) schedule(static)
    for (int k = cfg.elite_count; k < s; ++k) {
      Rng rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(pop.generation), static_cast<std::uint64_t>(k));
      const int a = select(cumulative, order, pop, rng);
      const int b = select(cumulative, order, pop, rng);
      Dna child = crossover(pop.individuals[static_cast<std::size_t>(a)], pop.individuals[static_cast<std::size_t>(b)], rng);
      Mutation mutated = mutate(child, cfg.mutation_rate, rng);
      next.individuals[static_cast<std::size_t>(k)] = std::move(mutated.dna);
      next.mutations[static_cast<std::size_t>(k)] = mutated.count;
    }
    pop = std::move(next);
  }

  const MeasurementSet& data_;
  Checkpoint state_;
  const EvolveHooks& hooks_;
  int threads_;
};

void check_data(const MeasurementSet& data) {
  if (data.visibility_count() == 0) throw ConfigError("visibility table is empty");
}

}  // namespace

EvolveResult evolve(const MeasurementSet& data, const GaConfig& cfg, const std::vector<Dna>& seeds,
                    const EvolveHooks& hooks) {
  cfg.validate();
  check_data(data);
  if (static_cast<int>(seeds.size()) > cfg.analytic_seeds)
    throw ConfigError("got " + std::to_string(seeds.size()) + " seeds but analytic_seeds is " +
                      std::to_string(cfg.analytic_seeds));
  const int m = data.modes();
  for (const Dna& d : seeds)
    if (d.modes() != m) throw ShapeError("seed DNA has a different m than the data");

  Population pop;
  pop.individuals = seeds;
  for (int k = static_cast<int>(seeds.size()); k < cfg.population; ++k) {
    Rng rng = derive_stream(cfg.seed, kInitTag, static_cast<std::uint64_t>(k));
    pop.individuals.push_back(unitary_to_dna(haar_random_unitary(m, rng)));
  }
  pop.cache.assign(pop.individuals.size(), std::nullopt);
  pop.mutations.assign(pop.individuals.size(), 0);

  Dna first = pop.individuals.front();
  Checkpoint state{cfg, std::move(pop), std::move(first), std::numeric_limits<double>::infinity(), {}};
  return Engine(data, std::move(state), hooks).run();
}

EvolveResult resume(const MeasurementSet& data, const Checkpoint& from, std::optional<long> max_iterations,
                    const EvolveHooks& hooks) {
  Checkpoint state = from;
  if (max_iterations) state.config.max_iterations = *max_iterations;
  state.config.validate();
  check_data(data);
  const auto s = static_cast<std::size_t>(state.config.population);
  if (state.population.individuals.size() != s) throw ConfigError("checkpoint population size mismatch");
  if (state.best.modes() != data.modes()) throw ShapeError("checkpoint m differs from data");
  state.population.cache.assign(s, std::nullopt);
  if (state.population.mutations.size() != s) state.population.mutations.assign(s, 0);
  return Engine(data, std::move(state), hooks).run();
}

}  // namespace reckga
