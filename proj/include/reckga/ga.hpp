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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reckga/forward_model.hpp"
#include "reckga/reck.hpp"

namespace reckga {

// chi^2 below this is treated as a perfect fit when forming 1/chi^2.
inline constexpr double kChi2Floor = 1e-30;

struct FitnessValue {
  double chi2_p = 0.0;
  double chi2_v = 0.0;
  double chi2 = 0.0;     // 2 [w chi2_p + (1 - w) chi2_v]
  double fitness = 0.0;  // 1 / max(chi2, kChi2Floor)
  int excluded = 0;      // data visibilities skipped because the prediction is undefined
};

// With w = 0.5 this is the plain sum chi2_p + chi2_v.
FitnessValue fitness(const UnitaryMatrix& u, const MeasurementSet& data, double w);
FitnessValue fitness(const Dna& e, const MeasurementSet& data, double w);

// Child takes ceil(M/2) genes from one parent and floor(M/2) from the other,
// at uniformly chosen slots. Genes keep their slot.
Dna crossover(const Dna& a, const Dna& b, Rng& rng);

struct Mutation {
  Dna dna;
  int count = 0;
};

// Every gene is independently replaced by a fresh random gene with probability `rate`.
Mutation mutate(const Dna& d, double rate, Rng& rng);

enum class Selection { kRoulette, kTournament };

struct GaConfig {
  int population = 100;
  int analytic_seeds = 20;
  int random_seeds = 80;
  double mutation_rate = 0.02;
  double weight = 0.5;
  long max_iterations = 100000;
  int stall_window = 2000;
  double stall_relative_improvement = 1e-4;
  int elite_count = 2;
  Selection selection = Selection::kRoulette;
  int tournament_size = 3;
  std::uint64_t seed = 0;
  int threads = 0;            // 0: every available core
  bool record_timing = true;  // false writes elapsed_ms = 0 for byte-stable traces

  void validate() const;
};

std::string to_string(Selection s);
Selection selection_from_string(const std::string& s);

struct Population {
  std::vector<Dna> individuals;
  std::vector<std::optional<FitnessValue>> cache;  // empty until evaluated
  std::vector<int> mutations;                      // genes mutated when the slot was produced
  long generation = 0;
};

struct TraceRecord {
  long iteration = 0;
  double best_chi2 = 0.0;  // best ever, so non-increasing
  double mean_chi2 = 0.0;  // over the current population
  int mutations = 0;       // genes mutated while producing this generation
  double elapsed_ms = 0.0;
};

enum class EventKind { kMutationJump, kCrossoverStep };

// An improvement of the best chi^2, attributed to the operator that produced
// the new best individual.
struct TraceEvent {
  long iteration = 0;
  double before = 0.0;
  double after = 0.0;
  EventKind kind = EventKind::kCrossoverStep;
};

enum class StopReason { kMaxIterations, kStalled, kPerfectFit };

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<TraceEvent> events;
  StopReason stop = StopReason::kMaxIterations;

  std::size_t count(EventKind kind) const;
};

std::string to_string(StopReason r);

// Everything needed to continue a run bit-exactly: per-slot random streams
// are derived from (seed, generation, slot), so the generator state is the
// pair (seed, generation).
struct Checkpoint {
  GaConfig config;
  Population population;  // state at the start of `population.generation`
  Dna best;
  double best_chi2 = 0.0;
  std::vector<double> best_history;  // trailing best chi^2 values for the stall test
};

struct EvolveResult {
  Dna best;
  FitnessValue best_fitness;
  RunTrace trace;
  Checkpoint checkpoint;  // resumable state after the last generation
};

struct EvolveHooks {
  long checkpoint_every = 0;  // generations; 0 disables
  std::function<void(const Checkpoint&)> on_checkpoint;
};

// Generational GA with elitism. Initial population: `seeds` followed by
// Haar-random individuals up to cfg.population.
EvolveResult evolve(const MeasurementSet& data, const GaConfig& cfg,
                    const std::vector<Dna>& seeds = {}, const EvolveHooks& hooks = {});

// Continues from a checkpoint; `max_iterations` in the checkpoint config (or
// the override) is the absolute generation count.
EvolveResult resume(const MeasurementSet& data, const Checkpoint& from,
                    std::optional<long> max_iterations = std::nullopt,
                    const EvolveHooks& hooks = {});

}  // namespace reckga
