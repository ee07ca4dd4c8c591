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

#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>

#include <CLI11.hpp>

#include "reckga/analytic.hpp"
#include "reckga/errors.hpp"
#include "reckga/forward_model.hpp"
#include "reckga/ga.hpp"
#include "reckga/io.hpp"
#include "reckga/linalg.hpp"
#include "reckga/metrics.hpp"
#include "reckga/reck.hpp"

namespace reckga::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

// Bad flag combination or value.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or invalid input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

template <typename F>
auto load(const fs::path& path, F&& f) {
  try {
    return f(path);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// One manifest per run: what was asked, with which effective settings, on
// which exact inputs, producing which outputs.
class RunManifest {
 public:
  RunManifest(std::string command, const std::vector<std::string>& args)
      : j_{{"tool", "reckga"}, {"version", kVersion}, {"command", std::move(command)}, {"argv", args},
           {"started_at", utc_now()}, {"inputs", json::array()}, {"outputs", json::array()}} {}

  void set(const std::string& key, json value) { j_[key] = std::move(value); }
  void input(const fs::path& p) { j_["inputs"].push_back(file_entry(p)); }
  void output(const fs::path& p) { j_["outputs"].push_back(file_entry(p)); }

  // Argument list that replays the run with the seed pinned.
  void replay(std::vector<std::string> args, std::optional<std::uint64_t> seed, bool seed_flag_given) {
    if (seed && !seed_flag_given) {
      args.push_back("--seed");
      args.push_back(std::to_string(*seed));
    }
    j_["replay_argv"] = args;
  }

  void write(const fs::path& p) {
    j_["finished_at"] = utc_now();
    io::write_json(p, j_);
  }

 private:
  static json file_entry(const fs::path& p) {
    return {{"path", p.string()}, {"git_sha1", git_blob_sha1(io::read_text(p))}};
  }
  json j_;
};

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

fs::path sidecar_manifest(const fs::path& output) {
  fs::path p = output;
  p.replace_extension(".run.json");
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::optional<int> haar;
  std::optional<std::string> unitary;
  long shots = NoiseConfig{}.shots;
  double sigma_v = NoiseConfig{}.sigma_v;
  bool noiseless = false;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* src = app.add_option_group("source", "ground truth");
  auto* haar = src->add_option("--haar", a.haar, "Haar-random ground truth with m modes")->check(CLI::Range(2, 64));
  auto* uni = src->add_option("--unitary", a.unitary, "ground-truth unitary JSON");
  haar->excludes(uni);
  src->require_option(1);
  app.add_option("--shots", a.shots, "photon pairs per input pair for the single-photon counts");
  app.add_option("--sigma-v", a.sigma_v, "Gaussian noise on visibilities");
  app.add_flag("--noiseless", a.noiseless, "exact predictions with floor errors");
  app.add_option("--seed", a.seed, "random seed (default: system entropy)");
  app.add_option("-o,--out", a.out, "output directory")->required();
}

int run_simulate(const SimulateArgs& a, const Context& ctx) {
  RunManifest manifest("simulate", ctx.args);
  const std::uint64_t seed = a.seed.value_or(entropy_seed());
  NoiseConfig nc;
  nc.noiseless = a.noiseless;
  nc.shots = a.shots;
  nc.sigma_v = a.sigma_v;
  try {
    nc.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  std::optional<UnitaryMatrix> truth;
  if (a.unitary) {
    truth = load(*a.unitary, [](const fs::path& p) { return io::read_unitary(p); });
    manifest.input(*a.unitary);
  } else {
    Rng rng = derive_stream(seed, 1);
    truth = haar_random_unitary(*a.haar, rng);
  }
  Rng noise = derive_stream(seed, 2);
  const MeasurementSet data = simulate_measurements(*truth, nc, noise);

  const fs::path dir = a.out;
  ensure_dir(dir);
  io::MeasurementManifest mf;
  mf.noise = {{"noiseless", nc.noiseless},
              {"shots", nc.shots},
              {"sigma_v", nc.sigma_v},
              {"p_error_floor", nc.p_error_floor},
              {"v_error_floor", nc.v_error_floor}};
  mf.ground_truth = "ground_truth.json";
  io::write_unitary(dir / *mf.ground_truth, *truth);
  const fs::path data_manifest = io::write_measurements(dir, data, mf);

  manifest.set("seed", seed);
  manifest.set("config", {{"m", truth->dim()}, {"noise", mf.noise}, {"source", a.unitary ? "file" : "haar"}});
  manifest.replay(ctx.args, seed, a.seed.has_value());
  for (const fs::path& p : {data_manifest, dir / mf.single_csv, dir / mf.visibility_csv, dir / *mf.ground_truth})
    manifest.output(p);
  manifest.write(dir / "run.json");

  ctx.out << "m " << truth->dim() << "\n"
          << "single_entries " << data.single_count() << "\n"
          << "visibility_entries " << data.visibility_count() << "\n"
          << "manifest " << data_manifest.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string data;
  std::string out;
  std::optional<std::string> config;
  std::optional<std::string> resume;
  bool no_analytic = false;
  bool no_timing = false;
  std::optional<int> population;
  std::optional<int> analytic_seeds;
  std::optional<long> max_iterations;
  std::optional<double> mutation_rate;
  std::optional<double> weight;
  std::optional<int> stall_window;
  std::optional<int> elite_count;
  std::optional<std::string> selection;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  long checkpoint_every = 0;
};

void add_reconstruct(CLI::App& app, ReconstructArgs& a) {
  app.add_option("--data", a.data, "measurement manifest (measurements.json)")->required();
  app.add_option("-o,--out", a.out, "output directory")->required();
  app.add_option("--config", a.config, "GA config JSON; flags take precedence");
  app.add_option("--resume", a.resume, "continue from a checkpoint JSON");
  app.add_flag("--no-analytic", a.no_analytic, "skip analytic seeding");
  app.add_flag("--no-timing", a.no_timing, "write elapsed_ms = 0 so traces are byte-stable");
  app.add_option("--pop", a.population, "population size s");
  app.add_option("--analytic-seeds", a.analytic_seeds, "analytic seeds s1");
  app.add_option("--max-iter", a.max_iterations, "generation limit");
  app.add_option("--mutation-rate", a.mutation_rate, "per-gene mutation probability");
  app.add_option("--weight", a.weight, "chi^2 weight w");
  app.add_option("--stall-window", a.stall_window, "generations for the stall test");
  app.add_option("--elite", a.elite_count, "elite count");
  app.add_option("--selection", a.selection, "roulette or tournament");
  app.add_option("--threads", a.threads, "evaluation threads (0: all cores)");
  app.add_option("--seed", a.seed, "random seed (default: config file, else system entropy)");
  app.add_option("--checkpoint-every", a.checkpoint_every, "write checkpoint.json every N generations");
}

GaConfig effective_config(const ReconstructArgs& a, RunManifest& manifest, bool& seed_from_config) {
  GaConfig cfg;
  json file = json::object();
  if (a.config) {
    file = load(*a.config, [](const fs::path& p) { return io::read_json(p); });
    cfg = load(*a.config, [&](const fs::path&) { return io::gaconfig_from_json(file); });
    manifest.input(*a.config);
  }
  seed_from_config = file.contains("seed");
  const bool explicit_s1 = a.analytic_seeds.has_value() || file.contains("analytic_seeds");
  if (a.population) cfg.population = *a.population;
  if (a.analytic_seeds) cfg.analytic_seeds = *a.analytic_seeds;
  else if (a.population && !explicit_s1) cfg.analytic_seeds = static_cast<int>(std::lround(0.2 * cfg.population));
  if (a.no_analytic) cfg.analytic_seeds = 0;
  cfg.random_seeds = cfg.population - cfg.analytic_seeds;
  if (a.max_iterations) cfg.max_iterations = *a.max_iterations;
  if (a.mutation_rate) cfg.mutation_rate = *a.mutation_rate;
  if (a.weight) cfg.weight = *a.weight;
  if (a.stall_window) cfg.stall_window = *a.stall_window;
  if (a.elite_count) cfg.elite_count = *a.elite_count;
  if (a.threads) cfg.threads = *a.threads;
  if (a.no_timing) cfg.record_timing = false;
  try {
    if (a.selection) cfg.selection = selection_from_string(*a.selection);
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// Thread count never changes results, so it is not part of the saved state.
json portable_checkpoint(Checkpoint c) {
  c.config.threads = 0;
  return io::checkpoint_to_json(c);
}

void check_trace_file(const fs::path& path) {
  const RunTrace t = io::parse_trace_csv(io::read_text(path));
  for (std::size_t k = 1; k < t.records.size(); ++k)
    if (t.records[k].best_chi2 > t.records[k - 1].best_chi2)
      throw std::runtime_error(path.string() + ": best_chi2 increases at iteration " +
                               std::to_string(t.records[k].iteration));
}

int run_reconstruct(const ReconstructArgs& a, const Context& ctx) {
  RunManifest manifest("reconstruct", ctx.args);
  const io::LoadedMeasurements loaded = load(a.data, [](const fs::path& p) { return io::read_measurements(p); });
  manifest.input(a.data);
  manifest.input(loaded.directory / loaded.manifest.single_csv);
  manifest.input(loaded.directory / loaded.manifest.visibility_csv);
  const MeasurementSet& data = loaded.data;
  if (data.visibility_count() == 0) throw InputError(a.data + ": visibility table is empty");

  const fs::path dir = a.out;
  ensure_dir(dir);
  const fs::path checkpoint_path = dir / "checkpoint.json";
  EvolveHooks hooks;
  hooks.checkpoint_every = a.checkpoint_every;
  hooks.on_checkpoint = [&](const Checkpoint& c) { io::write_json(checkpoint_path, portable_checkpoint(c)); };

  EvolveResult result = [&] {
    if (a.resume) {
      Checkpoint from = load(*a.resume, [](const fs::path& p) { return io::checkpoint_from_json(io::read_json(p)); });
      manifest.input(*a.resume);
      if (from.best.modes() != data.modes()) throw InputError(*a.resume + ": checkpoint m differs from the data");
      if (a.threads) from.config.threads = *a.threads;
      if (a.no_timing) from.config.record_timing = false;
      manifest.set("config", io::gaconfig_to_json(from.config));
      manifest.set("seed", from.config.seed);
      manifest.replay(ctx.args, std::nullopt, true);
      return resume(data, from, a.max_iterations, hooks);
    }
    bool seed_from_config = false;
    GaConfig cfg = effective_config(a, manifest, seed_from_config);
    if (a.seed) cfg.seed = *a.seed;
    else if (!seed_from_config) cfg.seed = entropy_seed();
    std::vector<Dna> seeds;
    if (cfg.analytic_seeds > 0) {
      const SeedPool pool = seed_pool(data, std::min(cfg.analytic_seeds, data.modes() * data.modes()), cfg.weight);
      if (pool.status == SeedStatus::kNoUsableAnchors) ctx.err << "warning: no usable anchors, seeding randomly\n";
      seeds = pool.seeds;
      io::write_text(dir / "candidates.csv", io::candidates_csv(pool));
      manifest.output(dir / "candidates.csv");
      manifest.set("seed_pool_status", to_string(pool.status));
    }
    manifest.set("config", io::gaconfig_to_json(cfg));
    manifest.set("seed", cfg.seed);
    manifest.replay(ctx.args, cfg.seed, a.seed.has_value() || seed_from_config);
    return evolve(data, cfg, seeds, hooks);
  }();

  const UnitaryMatrix best = dna_to_unitary(result.best);
  io::write_unitary(dir / "best_unitary.json", best);
  io::write_dna(dir / "best_dna.json", result.best);
  io::write_text(dir / "trace.csv", io::trace_csv(result.trace));
  io::write_json(dir / "trace_series.json", io::trace_series_json(result.trace));
  io::write_json(checkpoint_path, portable_checkpoint(result.checkpoint));
  check_trace_file(dir / "trace.csv");
  for (const char* f : {"best_unitary.json", "best_dna.json", "trace.csv", "trace_series.json", "checkpoint.json"})
    manifest.output(dir / f);
  const long iterations = result.trace.records.empty() ? 0 : result.trace.records.back().iteration + 1;
  manifest.set("result", {{"chi2", result.best_fitness.chi2},
                          {"iterations", iterations},
                          {"stop", to_string(result.trace.stop)},
                          {"mutation_jumps", result.trace.count(EventKind::kMutationJump)},
                          {"crossover_steps", result.trace.count(EventKind::kCrossoverStep)}});
  manifest.write(dir / "run.json");

  ctx.out << "chi2 " << io::format_double(result.best_fitness.chi2) << "\n"
          << "similarity " << io::format_double(similarity(data, best)) << "\n"
          << "iterations " << iterations << "\n"
          << "stop " << to_string(result.trace.stop) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string unitary;
  std::string data;
  std::optional<std::string> reference;
  bool fidelity = false;
  int mc = 0;
  std::string method = "analytic";
  std::optional<std::uint64_t> seed;
  double weight = 0.5;
  int threads = 0;
  std::string out;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  app.add_option("--unitary", a.unitary, "unitary to evaluate")->required();
  app.add_option("--data", a.data, "measurement manifest")->required();
  app.add_option("--reference", a.reference, "reference unitary for gate fidelity");
  app.add_flag("--fidelity", a.fidelity, "require gate fidelity (needs --reference)");
  app.add_option("--mc", a.mc, "Monte Carlo resamples (0: off)")->check(CLI::NonNegativeNumber);
  app.add_option("--method", a.method, "Monte Carlo reconstruction: analytic or ga-short");
  app.add_option("--seed", a.seed, "Monte Carlo seed (default: system entropy)");
  app.add_option("--weight", a.weight, "chi^2 weight w");
  app.add_option("--threads", a.threads, "Monte Carlo threads (0: all cores)");
  app.add_option("-o,--out", a.out, "report JSON")->required();
}

int run_evaluate(const EvaluateArgs& a, const Context& ctx) {
  RunManifest manifest("evaluate", ctx.args);
  if ((a.fidelity || a.mc > 0) && !a.reference) throw UsageError("fidelity requested but no --reference given");
  if (a.mc == 1) throw UsageError("--mc needs at least 2 samples");
  if (!(a.weight >= 0.0 && a.weight <= 1.0)) throw UsageError("--weight must be in [0, 1]");
  EvaluateOptions opts;
  opts.weight = a.weight;
  try {
    opts.mc.method = mc_method_from_string(a.method);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  const UnitaryMatrix u = load(a.unitary, [](const fs::path& p) { return io::read_unitary(p); });
  manifest.input(a.unitary);
  const io::LoadedMeasurements loaded = load(a.data, [](const fs::path& p) { return io::read_measurements(p); });
  manifest.input(a.data);
  manifest.input(loaded.directory / loaded.manifest.single_csv);
  manifest.input(loaded.directory / loaded.manifest.visibility_csv);
  if (u.dim() != loaded.data.modes()) throw InputError("m differs between " + a.unitary + " and " + a.data);
  if (loaded.data.visibility_count() == 0) throw InputError(a.data + ": visibility table is empty");
  if (a.reference) {
    opts.reference = load(*a.reference, [](const fs::path& p) { return io::read_unitary(p); });
    manifest.input(*a.reference);
    if (opts.reference->dim() != u.dim()) throw InputError("m differs between " + a.unitary + " and " + *a.reference);
  }
  std::optional<std::uint64_t> seed;
  if (a.mc > 0) {
    seed = a.seed.value_or(entropy_seed());
    opts.mc_samples = a.mc;
    opts.mc_seed = *seed;
    opts.mc.threads = a.threads;
    opts.mc.ga_short.threads = 1;
  }

  const EvaluationReport report = evaluate(loaded.data, u, opts);
  const fs::path out = a.out;
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  io::write_json(out, io::report_to_json(report));
  manifest.output(out);
  manifest.set("config", {{"weight", a.weight}, {"mc", a.mc}, {"method", a.method}, {"threads", a.threads}});
  if (seed) manifest.set("seed", *seed);
  manifest.replay(ctx.args, seed, a.seed.has_value());
  manifest.write(sidecar_manifest(out));

  ctx.out << "chi2 " << io::format_double(report.chi2) << "\n"
          << "similarity " << io::format_double(report.similarity) << "\n";
  if (report.aligned_fidelity) ctx.out << "fidelity " << io::format_double(*report.aligned_fidelity) << "\n";
  if (report.mc_std_fidelity) ctx.out << "fidelity_std " << io::format_double(*report.mc_std_fidelity) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------- seed-analytic

struct SeedArgs {
  std::string data;
  int s1 = GaConfig{}.analytic_seeds;
  double weight = 0.5;
  std::string out;
};

void add_seed(CLI::App& app, SeedArgs& a) {
  app.add_option("--data", a.data, "measurement manifest")->required();
  app.add_option("--s1", a.s1, "seeds to keep")->check(CLI::NonNegativeNumber);
  app.add_option("--weight", a.weight, "chi^2 weight w");
  app.add_option("-o,--out", a.out, "candidates CSV")->required();
}

int run_seed(const SeedArgs& a, const Context& ctx) {
  RunManifest manifest("seed-analytic", ctx.args);
  if (!(a.weight >= 0.0 && a.weight <= 1.0)) throw UsageError("--weight must be in [0, 1]");
  const io::LoadedMeasurements loaded = load(a.data, [](const fs::path& p) { return io::read_measurements(p); });
  manifest.input(a.data);
  manifest.input(loaded.directory / loaded.manifest.single_csv);
  manifest.input(loaded.directory / loaded.manifest.visibility_csv);
  const int m = loaded.data.modes();
  if (a.s1 > m * m) throw UsageError("--s1 exceeds the " + std::to_string(m * m) + " available anchors");
  const SeedPool pool = seed_pool(loaded.data, a.s1, a.weight);

  const fs::path out = a.out;
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  io::write_text(out, io::candidates_csv(pool));
  manifest.output(out);
  manifest.set("config", {{"s1", a.s1}, {"weight", a.weight}});
  manifest.set("status", to_string(pool.status));
  manifest.replay(ctx.args, std::nullopt, true);
  manifest.write(sidecar_manifest(out));

  int usable = 0;
  for (const SeedCandidate& c : pool.candidates) usable += c.usable;
  ctx.out << "status " << to_string(pool.status) << "\n"
          << "usable_anchors " << usable << "\n"
          << "seeds " << pool.seeds.size() << "\n";
  if (!pool.seeds.empty()) ctx.out << "best_chi2 " << io::format_double(pool.candidates.front().fit.chi2) << "\n";
  return kExitOk;
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* c = EVP_MD_CTX_new();
  if (!c || EVP_DigestInit_ex(c, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(c, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(c, content.data(), content.size()) != 1 || EVP_DigestFinal_ex(c, md, &len) != 1) {
    EVP_MD_CTX_free(c);
    throw std::runtime_error("SHA-1 digest failed");
  }
  EVP_MD_CTX_free(c);
  static const char* const kHex = "0123456789abcdef";
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex += kHex[md[k] >> 4];
    hex += kHex[md[k] & 15];
  }
  return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reconstruct linear-optical unitaries from one- and two-photon data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  ReconstructArgs rec;
  EvaluateArgs eva;
  SeedArgs see;
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic measurement data");
  add_simulate(*sim_cmd, sim);
  auto* rec_cmd = app.add_subcommand("reconstruct", "analytic seeding followed by the genetic algorithm");
  add_reconstruct(*rec_cmd, rec);
  auto* eva_cmd = app.add_subcommand("evaluate", "chi^2, similarity, gate fidelity and Monte Carlo errors");
  add_evaluate(*eva_cmd, eva);
  auto* see_cmd = app.add_subcommand("seed-analytic", "rank the analytic reconstructions of every anchor");
  add_seed(*see_cmd, see);

  std::vector<const char*> argv{"reckga"};
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Context ctx{args, out, err};
  try {
    if (*sim_cmd) return run_simulate(sim, ctx);
    if (*rec_cmd) return run_reconstruct(rec, ctx);
    if (*eva_cmd) return run_evaluate(eva, ctx);
    return run_seed(see, ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace reckga::cli
