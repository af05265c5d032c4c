#include "iqa/ensemble.hpp"

#include "iqa/error.hpp"
#include "iqa/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace iqa {

using nlohmann::json;

namespace {

constexpr std::size_t kBatch = 64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <class Fn>
void run_indexed(std::size_t count, WorkerPool* pool, Fn&& fn) {
  if (pool)
    pool->parallel_for(count, fn);
  else
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
}

json path_json(const AnnealPath& p) {
  return {{"s0", p.s0}, {"tau0", p.tau0}, {"s1", p.s1}, {"tau1", p.tau1}, {"dt", p.dt}};
}

} // namespace

void EnsembleConfig::validate() const {
  if (n_values.empty())
    throw ConfigError("n_values", "at least one N is required");
  for (int n : n_values)
    if (n < 2 || n > kMaxEnumerationSpins)
      throw ConfigError("n_values", "N must lie in [2, " + std::to_string(kMaxEnumerationSpins) + "]");
  if (realizations < 1)
    throw ConfigError("realizations", "must be >= 1");
  if (max_instances < 0)
    throw ConfigError("max_instances", "must be >= 0");
  if (first_realization < 0 || first_realization >= realizations)
    throw ConfigError("first_realization", "must lie in [0, realizations)");
  if (last_realization >= realizations ||
      (last_realization >= 0 && last_realization < first_realization))
    throw ConfigError("last_realization", "must lie in [first_realization, realizations)");
  try {
    path.validate();
  } catch (const DomainError& e) {
    throw ConfigError("path", e.what());
  }
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] >= path.dt))
      throw ConfigError("t_values", "every T must be >= dt");
    if (i > 0 && !(t_values[i] > t_values[i - 1]))
      throw ConfigError("t_values", "must be strictly ascending");
  }
}

int EnsembleConfig::range_begin() const { return first_realization; }
int EnsembleConfig::range_end() const {
  return last_realization < 0 ? realizations : last_realization + 1;
}

std::uint64_t instance_seed(std::uint64_t base_seed, int n_spins, int realization) {
  std::uint64_t z = splitmix64(base_seed);
  z = splitmix64(z ^ static_cast<std::uint64_t>(n_spins));
  return splitmix64(z ^ (static_cast<std::uint64_t>(realization) << 20));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const EnsembleConfig& c, std::string_view mode) {
  json j;
  j["mode"] = std::string(mode);
  j["n_values"] = c.n_values;
  j["realizations"] = c.realizations;
  j["base_seed"] = c.base_seed;
  j["path"] = path_json(c.path);
  j["spectrum"] = {{"k_levels", c.spectrum.k_levels},
                   {"n_grid", c.spectrum.n_grid},
                   {"dense_max_dim", c.spectrum.eigen.dense_max_dim},
                   {"tolerance", c.spectrum.eigen.tolerance},
                   {"bisection_tol", c.spectrum.bisection_tol},
                   {"degeneracy_tol", c.spectrum.degeneracy_tol}};
  if (mode == "compare") {
    j["t_values"] = c.t_values;
    j["max_instances"] = c.max_instances;
    j["truncation_tol"] = c.exact.truncation_tol;
  }
  return fnv1a(j.dump());
}

std::string to_json_line(const CrossingRecord& r, std::uint64_t hash) {
  json j;
  j["kind"] = "crossing";
  j["config_hash"] = hex(hash);
  j["n"] = r.n_spins;
  j["realization"] = r.realization;
  j["seed"] = r.seed;
  j["ok"] = r.ok;
  if (!r.ok)
    j["error"] = r.error;
  j["events"] = r.events;
  j["ground_events"] = r.ground_events;
  j["ground_tau"] = r.ground_tau;
  j["event_tau"] = r.event_tau;
  j["wall_time"] = r.wall_time;
  return j.dump();
}

std::string to_json_line(const EnergyRecord& r, std::uint64_t hash) {
  json j;
  j["kind"] = "energy";
  j["config_hash"] = hex(hash);
  j["n"] = r.n_spins;
  j["realization"] = r.realization;
  j["seed"] = r.seed;
  j["T"] = r.total_time;
  j["iqa_energy"] = r.iqa_energy;
  j["iqa_fraction"] = r.iqa_fraction;
  j["conventional_energy"] = r.conventional_energy;
  j["conventional_fraction"] = r.conventional_fraction;
  j["wall_time"] = r.wall_time;
  return j.dump();
}

namespace {

CrossingRecord crossing_from_json(const json& j) {
  CrossingRecord r;
  r.n_spins = j.at("n").get<int>();
  r.realization = j.at("realization").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.ok = j.at("ok").get<bool>();
  if (j.contains("error"))
    r.error = j.at("error").get<std::string>();
  r.events = j.at("events").get<int>();
  r.ground_events = j.at("ground_events").get<int>();
  r.ground_tau = j.at("ground_tau").get<std::vector<double>>();
  r.event_tau = j.at("event_tau").get<std::vector<double>>();
  r.wall_time = j.at("wall_time").get<double>();
  return r;
}

EnergyRecord energy_from_json(const json& j) {
  EnergyRecord r;
  r.n_spins = j.at("n").get<int>();
  r.realization = j.at("realization").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.total_time = j.at("T").get<double>();
  r.iqa_energy = j.at("iqa_energy").get<double>();
  r.iqa_fraction = j.at("iqa_fraction").get<double>();
  r.conventional_energy = j.at("conventional_energy").get<double>();
  r.conventional_fraction = j.at("conventional_fraction").get<double>();
  r.wall_time = j.at("wall_time").get<double>();
  return r;
}

} // namespace

RecordStore::RecordStore(const std::filesystem::path& dir, std::uint64_t config_hash)
    : hash_(config_hash) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  file_ = dir / "records.jsonl";
  if (!std::filesystem::exists(file_))
    return;

  std::ifstream in(file_, std::ios::binary);
  if (!in)
    throw IoError("cannot read " + file_.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::size_t pos = 0;
  std::size_t good_end = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = content.substr(pos, complete ? nl - pos : std::string::npos);
    json j = json::parse(line, nullptr, false);
    const bool last = !complete || nl + 1 == content.size();
    if (!complete || j.is_discarded() || !j.is_object()) {
      if (last) {
        emit_warning("discarding a partial trailing record in " + file_.string());
        break;
      }
      throw IoError("corrupt record in the middle of " + file_.string());
    }
    const std::string stored = j.value("config_hash", std::string{});
    if (stored != hex(hash_))
      throw ConfigError("output_dir", file_.string() + " holds records of a different configuration (hash " +
                                          stored + ", expected " + hex(hash_) +
                                          "); use a new output directory");
    const std::string kind = j.value("kind", std::string{});
    try {
      if (kind == "crossing")
        crossings_.push_back(crossing_from_json(j));
      else if (kind == "energy")
        energies_.push_back(energy_from_json(j));
      else
        throw IoError("unknown record kind '" + kind + "'");
    } catch (const json::exception& e) {
      throw IoError("malformed record in " + file_.string() + ": " + e.what());
    }
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end != content.size())
    std::filesystem::resize_file(file_, good_end);
}

std::optional<CrossingRecord> RecordStore::find_crossing(int n, std::uint64_t seed) const {
  for (const auto& r : crossings_)
    if (r.n_spins == n && r.seed == seed)
      return r;
  return std::nullopt;
}

std::optional<EnergyRecord> RecordStore::find_energy(int n, std::uint64_t seed, double T) const {
  for (const auto& r : energies_)
    if (r.n_spins == n && r.seed == seed && r.total_time == T)
      return r;
  return std::nullopt;
}

void RecordStore::write_line(const std::string& line) {
  if (file_.empty())
    return;
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out)
    throw IoError("cannot append to " + file_.string());
}

void RecordStore::append(const CrossingRecord& record) {
  write_line(to_json_line(record, hash_));
  crossings_.push_back(record);
  ++computed_;
}

void RecordStore::append(const EnergyRecord& record) {
  write_line(to_json_line(record, hash_));
  energies_.push_back(record);
  ++computed_;
}

Interval wilson_interval(int k, int n, double z) {
  if (n <= 0)
    return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

CrossingRecord crossing_record(int n_spins, int realization, std::uint64_t seed,
                               const AnnealPath& path, const SpectrumOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CrossingRecord r;
  r.n_spins = n_spins;
  r.realization = realization;
  r.seed = seed;
  try {
    const ProblemModel model = sample_sk(n_spins, seed);
    const auto events = detect_crossings(model, path, FieldProfile{ProfileKind::Ramp, n_spins},
                                         options);
    r.events = static_cast<int>(events.size());
    for (const auto& e : events) {
      r.event_tau.push_back(e.refined_tau);
      if (e.involves_ground) {
        ++r.ground_events;
        r.ground_tau.push_back(e.refined_tau);
      }
    }
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
    r.events = r.ground_events = 0;
    r.event_tau.clear();
    r.ground_tau.clear();
  }
  r.wall_time = seconds_since(start);
  return r;
}

namespace {

struct Job {
  int n;
  int r;
  std::uint64_t seed;
};

// Crossing records for the given jobs, reusing stored ones, computing the
// rest in fixed-size batches and appending them in job order.
std::vector<CrossingRecord> screen(const std::vector<Job>& jobs, const EnsembleConfig& config,
                                   WorkerPool* pool, RecordStore& store) {
  std::vector<CrossingRecord> out(jobs.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (auto found = store.find_crossing(jobs[i].n, jobs[i].seed))
      out[i] = *found;
    else
      todo.push_back(i);
  }
  for (std::size_t b = 0; b < todo.size(); b += kBatch) {
    const std::size_t len = std::min(kBatch, todo.size() - b);
    run_indexed(len, pool, [&](std::size_t k) {
      const Job& job = jobs[todo[b + k]];
      out[todo[b + k]] = crossing_record(job.n, job.r, job.seed, config.path, config.spectrum);
    });
    for (std::size_t k = 0; k < len; ++k) {
      const auto& rec = out[todo[b + k]];
      if (!rec.ok)
        emit_warning("instance N=" + std::to_string(rec.n_spins) + " seed=" +
                     std::to_string(rec.seed) + " failed and is excluded: " + rec.error);
      store.append(rec);
    }
  }
  return out;
}

} // namespace

FractionResult crossing_fraction(const EnsembleConfig& config, WorkerPool* pool,
                                 RecordStore* store) {
  config.validate();
  RecordStore local;
  RecordStore& st = store ? *store : local;
  std::vector<Job> jobs;
  for (int n : config.n_values)
    for (int r = config.range_begin(); r < config.range_end(); ++r)
      jobs.push_back({n, r, instance_seed(config.base_seed, n, r)});
  FractionResult out;
  out.records = screen(jobs, config, pool, st);
  for (int n : config.n_values) {
    FractionPoint p;
    p.n_spins = n;
    for (const auto& rec : out.records) {
      if (rec.n_spins != n)
        continue;
      if (!rec.ok) {
        ++p.n_failed;
        continue;
      }
      ++p.n_ok;
      if (rec.ground_events > 0)
        ++p.n_crossing;
    }
    p.fraction = p.n_ok > 0 ? static_cast<double>(p.n_crossing) / p.n_ok : 0.0;
    p.ci = wilson_interval(p.n_crossing, p.n_ok);
    out.points.push_back(p);
  }
  return out;
}

EnergyRecord energy_record(const SkInstance& instance, int realization, const AnnealPath& path,
                           double total_time, const ExactOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AnnealPath p = path;
  p.total_time = total_time;
  const int n = instance.n_spins();
  const ProblemModel model = instance;
  const auto energies = diagonal_energies(model);
  ExactOptions opts = options;
  opts.sample_stride = std::numeric_limits<int>::max();
  EnergyRecord r;
  r.n_spins = n;
  r.realization = realization;
  r.seed = instance.seed().value_or(0);
  r.total_time = total_time;
  for (ProfileKind kind : {ProfileKind::Ramp, ProfileKind::Homogeneous}) {
    const FieldProfile profile{kind, n};
    const auto traj = propagate(initial_state(p, profile, model, opts.eigen), p, profile, model, opts);
    const double e = expected_h0(traj.final_state, energies);
    const double f = energy_fraction(traj.final_state, energies);
    if (kind == ProfileKind::Ramp) {
      r.iqa_energy = e;
      r.iqa_fraction = f;
    } else {
      r.conventional_energy = e;
      r.conventional_fraction = f;
    }
  }
  r.wall_time = seconds_since(start);
  return r;
}

CompareResult final_energy_comparison(const EnsembleConfig& config, WorkerPool* pool,
                                      RecordStore* store) {
  config.validate();
  if (config.n_values.size() != 1)
    throw ConfigError("n_values", "compare mode takes exactly one N");
  if (config.t_values.empty())
    throw ConfigError("t_values", "compare mode needs at least one T");
  RecordStore local;
  RecordStore& st = store ? *store : local;
  const int n = config.n_values.front();

  std::vector<Job> jobs;
  for (int r = config.range_begin(); r < config.range_end(); ++r)
    jobs.push_back({n, r, instance_seed(config.base_seed, n, r)});
  CompareResult out;
  out.screened = screen(jobs, config, pool, st);

  std::vector<Job> chosen;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!out.screened[i].has_ground_crossing())
      continue;
    if (config.max_instances > 0 && static_cast<int>(chosen.size()) >= config.max_instances)
      break;
    chosen.push_back(jobs[i]);
  }
  out.n_qualifying = static_cast<int>(chosen.size());
  if (chosen.empty())
    throw NumericError("no instance with a ground-level crossing among " +
                       std::to_string(jobs.size()) +
                       " realizations; increase realizations");

  struct Item {
    std::size_t instance;
    double T;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < chosen.size(); ++i)
    for (double T : config.t_values)
      items.push_back({i, T});
  std::vector<EnergyRecord> results(items.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Job& job = chosen[items[i].instance];
    if (auto found = st.find_energy(job.n, job.seed, items[i].T))
      results[i] = *found;
    else
      todo.push_back(i);
  }
  for (std::size_t b = 0; b < todo.size(); b += kBatch) {
    const std::size_t len = std::min(kBatch, todo.size() - b);
    run_indexed(len, pool, [&](std::size_t k) {
      const Item& item = items[todo[b + k]];
      const Job& job = chosen[item.instance];
      results[todo[b + k]] =
          energy_record(sample_sk(job.n, job.seed), job.r, config.path, item.T, config.exact);
    });
    for (std::size_t k = 0; k < len; ++k)
      st.append(results[todo[b + k]]);
  }
  out.records = results;

  for (double T : config.t_values) {
    double iqa = 0.0, conv = 0.0;
    int count = 0;
    for (const auto& r : results)
      if (r.total_time == T) {
        iqa += r.iqa_fraction;
        conv += r.conventional_fraction;
        ++count;
      }
    out.points.push_back({T, "iqa", iqa / count, count});
    out.points.push_back({T, "conventional", conv / count, count});
  }
  const std::size_t m = config.t_values.size();
  for (std::size_t k = 0; k < 2; ++k) {
    Plateau p;
    p.protocol = out.points[2 * (m - 1) + k].protocol;
    p.value = out.points[2 * (m - 1) + k].mean_fraction;
    p.change = m > 1 ? std::abs(p.value - out.points[2 * (m - 2) + k].mean_fraction) : 0.0;
    out.plateaus.push_back(p);
  }
  return out;
}

} // namespace iqa
