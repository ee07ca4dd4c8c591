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

#include "reckga/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

namespace reckga::io {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

namespace {

int get_int(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number_integer())
    throw ParseError(std::string("expected integer field '") + key + "'");
  return j.at(key).get<int>();
}

double get_double(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
    throw ParseError(std::string("expected numeric field '") + key + "'");
  return j.at(key).get<double>();
}

Eigen::MatrixXd real_rows(const json& j, const char* key, int m) {
  if (!j.contains(key) || !j.at(key).is_array() || static_cast<int>(j.at(key).size()) != m)
    throw ParseError(std::string("'") + key + "' must hold " + std::to_string(m) + " rows");
  Eigen::MatrixXd out(m, m);
  for (int r = 0; r < m; ++r) {
    const json& row = j.at(key)[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      throw ParseError(std::string("ragged row ") + std::to_string(r) + " in '" + key + "'");
    for (int c = 0; c < m; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ParseError(std::string("non-numeric entry in '") + key + "'");
      out(r, c) = v.get<double>();
    }
  }
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

int parse_index(const std::string& s, std::size_t line) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("bad integer '" + s + "'", line);
  return v;
}

double parse_real(const std::string& s, std::size_t line) {
  if (s.empty()) throw ParseError("empty numeric field", line);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ParseError("bad number '" + s + "'", line);
  return v;
}

}  // namespace

json unitary_to_json(const UnitaryMatrix& u) {
  const int m = u.dim();
  json re = json::array(), im = json::array();
  for (int r = 0; r < m; ++r) {
    json rr = json::array(), ir = json::array();
    for (int c = 0; c < m; ++c) {
      rr.push_back(u(r, c).real());
      ir.push_back(u(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"m", m}, {"re", std::move(re)}, {"im", std::move(im)}};
}

UnitaryMatrix unitary_from_json(const json& j, double tol) {
  const int m = get_int(j, "m");
  if (m < 1) throw ParseError("unitary 'm' must be >= 1");
  const Eigen::MatrixXd re = real_rows(j, "re", m);
  const Eigen::MatrixXd im = real_rows(j, "im", m);
  ComplexMatrix u(m, m);
  u.real() = re;
  u.imag() = im;
  try {
    return UnitaryMatrix(std::move(u), tol);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

void write_unitary(const fs::path& path, const UnitaryMatrix& u) { write_json(path, unitary_to_json(u)); }

UnitaryMatrix read_unitary(const fs::path& path) {
  const json j = read_json(path);
  try {
    return unitary_from_json(j);
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

json dna_to_json(const Dna& d) {
  json genes = json::array();
  for (const Gene& g : d.genes()) genes.push_back({{"t", g.t}, {"alpha", g.alpha}, {"beta", g.beta}});
  return json{{"m", d.modes()}, {"schedule_version", kScheduleVersion}, {"genes", std::move(genes)}};
}

Dna dna_from_json(const json& j) {
  const int m = get_int(j, "m");
  const int version = get_int(j, "schedule_version");
  if (version != kScheduleVersion)
    throw ParseError("unsupported schedule_version " + std::to_string(version));
  if (!j.contains("genes") || !j.at("genes").is_array()) throw ParseError("missing 'genes' array");
  std::vector<Gene> genes;
  for (const json& g : j.at("genes")) genes.push_back({get_double(g, "t"), get_double(g, "alpha"), get_double(g, "beta")});
  try {
    return Dna(m, std::move(genes));
  } catch (const std::logic_error& e) {
    throw ParseError(e.what());
  }
}

void write_dna(const fs::path& path, const Dna& d) { write_json(path, dna_to_json(d)); }
Dna read_dna(const fs::path& path) {
  const json j = read_json(path);
  try {
    return dna_from_json(j);
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

json manifest_to_json(const MeasurementManifest& mf) {
  json j{{"m", mf.m}, {"single", mf.single_csv}, {"visibilities", mf.visibility_csv}, {"noise", mf.noise}};
  if (mf.ground_truth) j["ground_truth"] = *mf.ground_truth;
  return j;
}

MeasurementManifest manifest_from_json(const json& j) {
  MeasurementManifest mf;
  mf.m = get_int(j, "m");
  if (!j.contains("single") || !j.at("single").is_string() || !j.contains("visibilities") ||
      !j.at("visibilities").is_string())
    throw ParseError("measurement manifest needs 'single' and 'visibilities' paths");
  mf.single_csv = j.at("single").get<std::string>();
  mf.visibility_csv = j.at("visibilities").get<std::string>();
  if (j.contains("noise")) mf.noise = j.at("noise");
  if (j.contains("ground_truth") && j.at("ground_truth").is_string())
    mf.ground_truth = j.at("ground_truth").get<std::string>();
  return mf;
}

std::string single_csv(const MeasurementSet& data) {
  std::string out = "i,j,p,dp\n";
  const int m = data.modes();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(data.probabilities()(i, j)) + "," +
             format_double(data.probability_errors()(i, j)) + "\n";
  return out;
}

std::string visibility_csv(const MeasurementSet& data) {
  std::string out = "i,j,p,q,v,dv\n";
  for (const VisibilityEntry& e : data.visibilities())
    out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + std::to_string(e.p) + "," + std::to_string(e.q) +
           "," + format_double(e.value) + "," + format_double(e.error) + "\n";
  return out;
}

namespace {

struct SingleTable {
  Eigen::MatrixXd p, dp;
};

SingleTable parse_single_table(int m, const std::string& text) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(m, m, -1.0);
  Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(m, m);
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "i,j,p,dp")
    throw ParseError("single-photon CSV must start with header 'i,j,p,dp'", 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    const std::size_t ln = n + 1;
    const auto f = split_fields(line);
    if (f.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(f.size()), ln);
    const int i = parse_index(f[0], ln), j = parse_index(f[1], ln);
    if (i < 0 || i >= m || j < 0 || j >= m) throw ParseError("mode index outside [0, m)", ln);
    const double v = parse_real(f[2], ln), e = parse_real(f[3], ln);
    if (v < 0.0 || v > 1.0) throw ParseError("probability outside [0, 1]", ln);
    if (e <= 0.0) throw ParseError("error must be positive", ln);
    if (p(i, j) >= 0.0) throw ParseError("duplicate entry", ln);
    p(i, j) = v;
    dp(i, j) = e;
  }
  if ((p.array() < 0.0).any())
    throw ParseError("single-photon CSV must contain all " + std::to_string(m * m) + " (i, j) entries");
  return {std::move(p), std::move(dp)};
}

std::vector<VisibilityEntry> parse_visibility_table(int m, const std::string& text) {
  std::vector<VisibilityEntry> v;
  std::vector<char> seen(static_cast<std::size_t>(pair_count(m) * pair_count(m)), 0);
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "i,j,p,q,v,dv")
    throw ParseError("visibility CSV must start with header 'i,j,p,q,v,dv'", 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (line.empty()) continue;
    const std::size_t ln = n + 1;
    const auto f = split_fields(line);
    if (f.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(f.size()), ln);
    VisibilityEntry e;
    e.i = parse_index(f[0], ln);
    e.j = parse_index(f[1], ln);
    e.p = parse_index(f[2], ln);
    e.q = parse_index(f[3], ln);
    if (e.i < 0 || e.i >= e.j || e.j >= m || e.p < 0 || e.p >= e.q || e.q >= m)
      throw ParseError("need 0 <= i < j < m and 0 <= p < q < m", ln);
    e.value = parse_real(f[4], ln);
    e.error = parse_real(f[5], ln);
    if (e.value > 1.0) throw ParseError("visibility above 1", ln);
    if (e.error <= 0.0) throw ParseError("error must be positive", ln);
    auto& flag = seen[static_cast<std::size_t>(pair_index(e.i, e.j, m) * pair_count(m) + pair_index(e.p, e.q, m))];
    if (flag) throw ParseError("duplicate entry", ln);
    flag = 1;
    v.push_back(e);
  }
  return v;
}

}  // namespace

MeasurementSet parse_measurements(int m, const std::string& single_text, const std::string& visibility_text) {
  if (m < 2) throw ParseError("m must be >= 2");
  SingleTable single = parse_single_table(m, single_text);
  return MeasurementSet(m, std::move(single.p), std::move(single.dp), parse_visibility_table(m, visibility_text));
}

fs::path write_measurements(const fs::path& dir, const MeasurementSet& data, MeasurementManifest mf) {
  fs::create_directories(dir);
  mf.m = data.modes();
  write_text(dir / mf.single_csv, single_csv(data));
  write_text(dir / mf.visibility_csv, visibility_csv(data));
  const fs::path path = dir / "measurements.json";
  write_json(path, manifest_to_json(mf));
  return path;
}

LoadedMeasurements read_measurements(const fs::path& manifest_path) {
  const MeasurementManifest mf = manifest_from_json(read_json(manifest_path));
  if (mf.m < 2) throw ParseError(manifest_path.string() + ": m must be >= 2");
  const fs::path dir = manifest_path.parent_path();
  const fs::path single_path = dir / mf.single_csv;
  const fs::path vis_path = dir / mf.visibility_csv;
  auto attributed = [](const fs::path& path, auto&& parse) {
    try {
      return parse(read_text(path));
    } catch (const ParseError& e) {
      throw e.in(path.string());
    }
  };
  SingleTable single = attributed(single_path, [&](const std::string& t) { return parse_single_table(mf.m, t); });
  auto vis = attributed(vis_path, [&](const std::string& t) { return parse_visibility_table(mf.m, t); });
  return {mf, MeasurementSet(mf.m, std::move(single.p), std::move(single.dp), std::move(vis)), dir};
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "iteration,best_chi2,mean_chi2,mutations,elapsed_ms\n";
  for (const TraceRecord& r : trace.records)
    out += std::to_string(r.iteration) + "," + format_double(r.best_chi2) + "," + format_double(r.mean_chi2) + "," +
           std::to_string(r.mutations) + "," + format_double(r.elapsed_ms) + "\n";
  return out;
}

RunTrace parse_trace_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "iteration,best_chi2,mean_chi2,mutations,elapsed_ms")
    throw ParseError("trace CSV header mismatch", 1);
  RunTrace t;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = split_fields(lines[n]);
    if (f.size() != 5) throw ParseError("expected 5 fields", n + 1);
    TraceRecord r;
    r.iteration = parse_index(f[0], n + 1);
    r.best_chi2 = parse_real(f[1], n + 1);
    r.mean_chi2 = parse_real(f[2], n + 1);
    r.mutations = parse_index(f[3], n + 1);
    r.elapsed_ms = parse_real(f[4], n + 1);
    t.records.push_back(r);
  }
  return t;
}

json trace_series_json(const RunTrace& trace) {
  json x = json::array(), best = json::array(), mean = json::array(), mut = json::array();
  for (const TraceRecord& r : trace.records) {
    x.push_back(r.iteration);
    best.push_back(r.best_chi2);
    mean.push_back(r.mean_chi2);
    mut.push_back(r.mutations);
  }
  json events = json::array();
  for (const TraceEvent& e : trace.events)
    events.push_back({{"iteration", e.iteration},
                      {"before", e.before},
                      {"after", e.after},
                      {"kind", e.kind == EventKind::kMutationJump ? "mutation_jump" : "crossover_step"}});
  return json{{"x_label", "iteration"},
              {"series", json::array({json{{"name", "best_chi2"}, {"x", x}, {"y", best}},
                                      json{{"name", "mean_chi2"}, {"x", x}, {"y", mean}},
                                      json{{"name", "mutations"}, {"x", x}, {"y", mut}}})},
              {"events", std::move(events)},
              {"stop", to_string(trace.stop)}};
}

json gaconfig_to_json(const GaConfig& c) {
  return json{{"population", c.population},
              {"analytic_seeds", c.analytic_seeds},
              {"random_seeds", c.random_seeds},
              {"mutation_rate", c.mutation_rate},
              {"weight", c.weight},
              {"max_iterations", c.max_iterations},
              {"stall_window", c.stall_window},
              {"stall_relative_improvement", c.stall_relative_improvement},
              {"elite_count", c.elite_count},
              {"selection", to_string(c.selection)},
              {"tournament_size", c.tournament_size},
              {"seed", c.seed},
              {"threads", c.threads},
              {"record_timing", c.record_timing}};
}

GaConfig gaconfig_from_json(const json& j, const GaConfig& base) {
  static const char* const kKeys[] = {"population", "analytic_seeds", "random_seeds", "mutation_rate",
                                      "weight", "max_iterations", "stall_window",
                                      "stall_relative_improvement", "elite_count", "selection",
                                      "tournament_size", "seed", "threads", "record_timing"};
  if (!j.is_object()) throw ParseError("GA config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ParseError("GA config: unknown key '" + key + "'");
  GaConfig c = base;
  auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  try {
    take("population", c.population);
    take("analytic_seeds", c.analytic_seeds);
    take("random_seeds", c.random_seeds);
    take("mutation_rate", c.mutation_rate);
    take("weight", c.weight);
    take("max_iterations", c.max_iterations);
    take("stall_window", c.stall_window);
    take("stall_relative_improvement", c.stall_relative_improvement);
    take("elite_count", c.elite_count);
    if (j.contains("selection")) c.selection = selection_from_string(j.at("selection").get<std::string>());
    take("tournament_size", c.tournament_size);
    take("seed", c.seed);
    take("threads", c.threads);
    take("record_timing", c.record_timing);
  } catch (const json::exception& e) {
    throw ParseError(std::string("GA config: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("GA config: ") + e.what());
  }
  return c;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double from_nullable(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

json checkpoint_to_json(const Checkpoint& c) {
  json pop = json::array();
  for (const Dna& d : c.population.individuals) pop.push_back(dna_to_json(d));
  json history = json::array();
  for (double h : c.best_history) history.push_back(finite_or_null(h));
  return json{{"config", gaconfig_to_json(c.config)},
              {"generation", c.population.generation},
              {"population", std::move(pop)},
              {"mutations", c.population.mutations},
              {"best", dna_to_json(c.best)},
              {"best_chi2", finite_or_null(c.best_chi2)},
              {"best_history", std::move(history)},
              {"rng", {{"scheme", "splitmix64(seed, generation, slot) -> mt19937_64"},
                       {"seed", c.config.seed},
                       {"generation", c.population.generation}}}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    Checkpoint c{gaconfig_from_json(j.at("config")), {}, dna_from_json(j.at("best")),
                 from_nullable(j.at("best_chi2")), {}};
    c.population.generation = j.at("generation").get<long>();
    for (const json& d : j.at("population")) c.population.individuals.push_back(dna_from_json(d));
    c.population.mutations = j.at("mutations").get<std::vector<int>>();
    c.population.cache.assign(c.population.individuals.size(), std::nullopt);
    for (const json& h : j.at("best_history")) c.best_history.push_back(from_nullable(h));
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

json report_to_json(const EvaluationReport& r) {
  auto num = [](double v) { return round_significant(v, 6); };
  json j{{"m", r.m},
         {"weight", num(r.weight)},
         {"chi2_p", num(r.chi2_p)},
         {"chi2_v", num(r.chi2_v)},
         {"chi2", num(r.chi2)},
         {"similarity", num(r.similarity)},
         {"visibility_entries", r.visibility_entries},
         {"excluded_entries", r.excluded_entries},
         {"flags", r.flags}};
  if (r.similarity_std) j["similarity_std"] = num(*r.similarity_std);
  if (r.raw_fidelity) j["raw_fidelity"] = num(*r.raw_fidelity);
  if (r.aligned_fidelity) j["aligned_fidelity"] = num(*r.aligned_fidelity);
  if (r.conjugated) j["conjugated"] = *r.conjugated;
  if (r.mc_mean_fidelity) j["mc_mean_fidelity"] = num(*r.mc_mean_fidelity);
  if (r.mc_std_fidelity) j["mc_std_fidelity"] = num(*r.mc_std_fidelity);
  if (r.mc_samples) j["mc_samples"] = *r.mc_samples;
  if (r.mc_failures) j["mc_failures"] = *r.mc_failures;
  if (r.mc_clipped) j["mc_clipped"] = *r.mc_clipped;
  if (r.mc_method) j["mc_method"] = *r.mc_method;
  return j;
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport r;
  try {
    r.m = j.at("m").get<int>();
    r.weight = j.at("weight").get<double>();
    r.chi2_p = j.at("chi2_p").get<double>();
    r.chi2_v = j.at("chi2_v").get<double>();
    r.chi2 = j.at("chi2").get<double>();
    r.similarity = j.at("similarity").get<double>();
    r.visibility_entries = j.at("visibility_entries").get<int>();
    r.excluded_entries = j.at("excluded_entries").get<int>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    if (j.contains("similarity_std")) r.similarity_std = j.at("similarity_std").get<double>();
    if (j.contains("raw_fidelity")) r.raw_fidelity = j.at("raw_fidelity").get<double>();
    if (j.contains("aligned_fidelity")) r.aligned_fidelity = j.at("aligned_fidelity").get<double>();
    if (j.contains("conjugated")) r.conjugated = j.at("conjugated").get<bool>();
    if (j.contains("mc_mean_fidelity")) r.mc_mean_fidelity = j.at("mc_mean_fidelity").get<double>();
    if (j.contains("mc_std_fidelity")) r.mc_std_fidelity = j.at("mc_std_fidelity").get<double>();
    if (j.contains("mc_samples")) r.mc_samples = j.at("mc_samples").get<int>();
    if (j.contains("mc_failures")) r.mc_failures = j.at("mc_failures").get<int>();
    if (j.contains("mc_clipped")) r.mc_clipped = j.at("mc_clipped").get<long>();
    if (j.contains("mc_method")) r.mc_method = j.at("mc_method").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("evaluation report: ") + e.what());
  }
  return r;
}

std::string candidates_csv(const SeedPool& pool) {
  std::string out = "anchor_i,anchor_j,chi2,flags\n";
  for (const SeedCandidate& c : pool.candidates) {
    std::string flags = c.usable ? (c.clamped ? "clamped=" + std::to_string(c.clamped) : "ok") : "unusable";
    out += std::to_string(c.anchor.input) + "," + std::to_string(c.anchor.output) + "," +
           (c.usable ? format_double(c.fit.chi2) : std::string("nan")) + "," + flags + "\n";
  }
  return out;
}

}  // namespace reckga::io
