#ifndef IQA_ENSEMBLE_HPP
#define IQA_ENSEMBLE_HPP

#include "iqa/exact.hpp"
#include "iqa/schedules.hpp"
#include "iqa/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iqa {

class WorkerPool;

struct EnsembleConfig {
  std::vector<int> n_values{4, 6, 8, 10};
  int realizations = 200;
  std::uint64_t base_seed = 1;
  // Path shape; compare mode replaces total_time by each entry of t_values.
  AnnealPath path = AnnealPath::linear(1.0, 0.01);
  std::vector<double> t_values{1.0, 10.0, 100.0, 1000.0, 5000.0, 10000.0};
  SpectrumOptions spectrum{};
  ExactOptions exact{};
  // Compare mode: keep at most this many crossing instances (0 = all).
  int max_instances = 0;
  // Realization range handled by this worker, inclusive; last < 0 means all.
  int first_realization = 0;
  int last_realization = -1;
  // Empty: keep records in memory only.
  std::filesystem::path output_dir;

  void validate() const;
  int range_begin() const;
  int range_end() const; // exclusive
};

// Seed of realization r at size N; a pure function of its arguments.
std::uint64_t instance_seed(std::uint64_t base_seed, int n_spins, int realization);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

// Hash of every field that affects record contents. The realization range
// and output_dir are excluded so disjoint workers share one store.
std::uint64_t config_hash(const EnsembleConfig& config, std::string_view mode);

struct CrossingRecord {
  int n_spins = 0;
  int realization = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  int events = 0;
  int ground_events = 0;
  std::vector<double> ground_tau; // refined tau of ground crossings
  std::vector<double> event_tau;  // refined tau of every crossing
  double wall_time = 0.0;

  bool has_ground_crossing() const { return ok && ground_events > 0; }
};

struct EnergyRecord {
  int n_spins = 0;
  int realization = 0;
  std::uint64_t seed = 0;
  double total_time = 0.0;
  double iqa_energy = 0.0;
  double iqa_fraction = 0.0;
  double conventional_energy = 0.0;
  double conventional_fraction = 0.0;
  double wall_time = 0.0;
};

// Append-only JSONL store, one record per line, each tagged with the config
// hash. Opening an existing store drops a truncated trailing line and
// refuses records written under a different hash.
class RecordStore {
public:
  RecordStore() = default; // in-memory
  RecordStore(const std::filesystem::path& dir, std::uint64_t config_hash);

  const std::vector<CrossingRecord>& crossings() const noexcept { return crossings_; }
  const std::vector<EnergyRecord>& energies() const noexcept { return energies_; }
  std::optional<CrossingRecord> find_crossing(int n, std::uint64_t seed) const;
  std::optional<EnergyRecord> find_energy(int n, std::uint64_t seed, double total_time) const;

  void append(const CrossingRecord& record);
  void append(const EnergyRecord& record);

  bool persistent() const noexcept { return !file_.empty(); }
  const std::filesystem::path& file() const noexcept { return file_; }
  std::uint64_t hash() const noexcept { return hash_; }
  // Records computed by this process (not loaded from disk).
  std::size_t computed() const noexcept { return computed_; }

private:
  void write_line(const std::string& line);

  std::filesystem::path file_;
  std::uint64_t hash_ = 0;
  std::vector<CrossingRecord> crossings_;
  std::vector<EnergyRecord> energies_;
  std::size_t computed_ = 0;
};

std::string to_json_line(const CrossingRecord& record, std::uint64_t hash);
std::string to_json_line(const EnergyRecord& record, std::uint64_t hash);

struct Interval {
  double low;
  double high;
};

// Wilson score interval for k successes in n trials (z = 1.96 for 95%).
Interval wilson_interval(int successes, int trials, double z = 1.959963984540054);

// Crossing analysis of one instance under the ramp profile.
CrossingRecord crossing_record(int n_spins, int realization, std::uint64_t seed,
                               const AnnealPath& path, const SpectrumOptions& options);

struct FractionPoint {
  int n_spins = 0;
  double fraction = 0.0;
  Interval ci{0.0, 0.0};
  int n_ok = 0;
  int n_crossing = 0;
  int n_failed = 0;
};

struct FractionResult {
  std::vector<FractionPoint> points;
  std::vector<CrossingRecord> records;
};

FractionResult crossing_fraction(const EnsembleConfig& config, WorkerPool* pool = nullptr,
                                 RecordStore* store = nullptr);

struct ComparePoint {
  double total_time = 0.0;
  std::string protocol; // "iqa" or "conventional"
  double mean_fraction = 0.0;
  int n_instances = 0;
};

struct Plateau {
  std::string protocol;
  double value = 0.0;  // mean fraction at the largest T
  double change = 0.0; // |value - mean fraction at the second-largest T|
};

struct CompareResult {
  std::vector<ComparePoint> points; // by T, iqa before conventional
  std::vector<Plateau> plateaus;
  std::vector<CrossingRecord> screened;
  std::vector<EnergyRecord> records;
  int n_qualifying = 0;
};

// Final energy fraction of one instance at one T under IQA (ramp) and
// conventional (homogeneous) annealing.
EnergyRecord energy_record(const SkInstance& instance, int realization, const AnnealPath& path,
                           double total_time, const ExactOptions& options);

CompareResult final_energy_comparison(const EnsembleConfig& config, WorkerPool* pool = nullptr,
                                      RecordStore* store = nullptr);

} // namespace iqa

#endif
