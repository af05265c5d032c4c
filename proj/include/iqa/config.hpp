#ifndef IQA_CONFIG_HPP
#define IQA_CONFIG_HPP

#include "iqa/ensemble.hpp"
#include "iqa/meanfield.hpp"
#include "iqa/models.hpp"
#include "iqa/schedules.hpp"
#include "iqa/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace iqa {

enum class Command { Meanfield, Exact, Spectrum, EnsembleFraction, EnsembleCompare, Saddle };

// "meanfield", "exact", "spectrum", "ensemble-fraction", "ensemble-compare",
// "saddle".
std::string_view to_string(Command command);
Command command_from_string(std::string_view name);

enum class ValueKind { Real, Integer, Text, RealList, IntegerList };

struct KeyInfo {
  std::string_view section;
  std::string_view name;
  ValueKind kind;
  std::string_view help;
};

// Every accepted key, in file order. Names are unique across sections.
const std::vector<KeyInfo>& config_keys();

struct PresetInfo {
  std::string_view name;
  Command command;
  std::string_view description;
};
const std::vector<PresetInfo>& presets();

struct ResolvedConfig {
  Command command = Command::Saddle;
  AnnealPath path;
  FieldProfile profile;
  std::string model_kind;
  int n_spins = 0;
  int p = 3;
  std::uint64_t seed = 1;
  std::string instance_file;
  SaddlePointQuery saddle;
  int sample_stride = 1;
  int reference_points = 0;
  SpectrumOptions spectrum;
  EnsembleConfig ensemble;
  int threads = 0;
  std::filesystem::path output_dir;
  // Canonical value text per "section.key".
  std::map<std::string, std::string> values;
};

// Layered key-value configuration: subcommand defaults, then an optional
// preset, then a file, then individual overrides. Every value is checked
// as it is set; cross-key consistency is checked by resolve().
class RunConfig {
public:
  explicit RunConfig(Command command);

  Command command() const noexcept { return command_; }

  void apply_preset(std::string_view name);
  // INI-style document: [section] headers and key = value lines.
  void load_file(const std::filesystem::path& file);
  void load_string(std::string_view text);
  // key is either "name" or "section.name".
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  ResolvedConfig resolve() const;

  // Canonical INI text of the current values.
  std::string to_ini() const;

private:
  Command command_;
  std::map<std::string, std::string> values_;
};

// {"section": {"key": value, ...}, ...} with numbers as JSON numbers.
std::string values_to_json(const std::map<std::string, std::string>& values, int indent = 2);
std::string values_to_ini(const std::map<std::string, std::string>& values);

// FNV-1a of the canonical values, excluding run.threads and run.output_dir.
std::uint64_t resolved_hash(const ResolvedConfig& config);

ProblemModel build_model(const ResolvedConfig& config);

} // namespace iqa

#endif
