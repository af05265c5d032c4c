#include "iqa/config.hpp"

#include "iqa/error.hpp"
#include "iqa/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

namespace iqa {

namespace {

struct CommandName {
  Command command;
  std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::Meanfield, "meanfield"},
    {Command::Exact, "exact"},
    {Command::Spectrum, "spectrum"},
    {Command::EnsembleFraction, "ensemble-fraction"},
    {Command::EnsembleCompare, "ensemble-compare"},
    {Command::Saddle, "saddle"},
};

using Pairs = std::vector<std::pair<std::string_view, std::string_view>>;

struct Preset {
  PresetInfo info;
  Pairs values;
};

const std::vector<Preset>& preset_table() {
  static const std::vector<Preset> table = {
      {{"fig1", Command::Meanfield, "p-spin sudden quench, N=5000, dt=0.01"},
       {{"s0", "0.1"}, {"tau0", "0.1"}, {"s1", "1"}, {"tau1", "1"}, {"T", "100"}, {"dt", "0.01"},
        {"profile", "quench"}, {"model", "pspin"}, {"n", "5000"}, {"p", "3"},
        {"sample_stride", "100"}, {"reference_points", "101"}}},
      {{"fig2", Command::Meanfield, "p-spin IQA ramp, T=10000, N=5000, dt=0.1"},
       {{"s0", "0.1"}, {"tau0", "0.1"}, {"s1", "1"}, {"tau1", "1"}, {"T", "10000"}, {"dt", "0.1"},
        {"profile", "ramp"}, {"model", "pspin"}, {"n", "5000"}, {"p", "3"},
        {"sample_stride", "100"}, {"reference_points", "101"}}},
      {{"fig3", Command::Meanfield, "p-spin IQA ramp, N=500, T=10N, dt=0.1"},
       {{"s0", "0.1"}, {"tau0", "0.1"}, {"s1", "1"}, {"tau1", "1"}, {"T", "5000"}, {"dt", "0.1"},
        {"profile", "ramp"}, {"model", "pspin"}, {"n", "500"}, {"p", "3"},
        {"sample_stride", "100"}, {"reference_points", "101"}}},
      {{"fig4", Command::Exact, "per-spin magnetizations, cosine instance N=4, T=10"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "10"}, {"dt", "0.1"},
        {"profile", "ramp"}, {"model", "sk-fig4"}, {"n", "4"}, {"sample_stride", "1"}}},
      {{"fig5", Command::Spectrum, "lowest levels, cosine instance N=8"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "1"}, {"dt", "0.01"},
        {"profile", "ramp"}, {"model", "sk-fig5"}, {"n", "8"}, {"k_levels", "10"}, {"n_grid", "0"}}},
      {{"fig6", Command::EnsembleFraction, "crossing fraction, N=4..10, 200 realizations"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "1"}, {"dt", "0.01"},
        {"n_values", "4,6,8,10"}, {"realizations", "200"}, {"base_seed", "1"}}},
      {{"fig6-full", Command::EnsembleFraction, "crossing fraction, N=4..14, 1000 realizations"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "1"}, {"dt", "0.01"},
        {"n_values", "4,6,8,10,12,14"}, {"realizations", "1000"}, {"base_seed", "1"}}},
      {{"fig7", Command::EnsembleCompare, "final energy vs T, N=8, crossing instances of 1000"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "1"}, {"dt", "0.01"},
        {"n_values", "8"}, {"realizations", "1000"}, {"base_seed", "1"}, {"max_instances", "0"},
        {"t_values", "1,2,5,10,20,50,100,200,500,1000,2000,5000,10000"}}},
      {{"fig7-smoke", Command::EnsembleCompare, "final energy vs T, N=8, first 20 crossing instances"},
       {{"s0", "0"}, {"tau0", "0"}, {"s1", "1"}, {"tau1", "1"}, {"T", "1"}, {"dt", "0.01"},
        {"n_values", "8"}, {"realizations", "100"}, {"base_seed", "1"}, {"max_instances", "20"},
        {"t_values", "1,10,100,1000,5000,10000"}}},
  };
  return table;
}

Pairs command_defaults(Command c) {
  switch (c) {
  case Command::Meanfield:
    return {{"s0", "0.1"}, {"tau0", "0.1"}, {"T", "100"}, {"dt", "0.01"}, {"n", "1000"},
            {"sample_stride", "10"}, {"reference_points", "101"}};
  case Command::Exact:
    return {{"T", "10"}, {"dt", "0.1"}, {"model", "sk-fig4"}, {"n", "4"}};
  case Command::Spectrum:
    return {{"T", "1"}, {"dt", "0.01"}, {"model", "sk-fig5"}, {"n", "8"}};
  case Command::EnsembleFraction:
    return {{"T", "1"}, {"dt", "0.01"}};
  case Command::EnsembleCompare:
    return {{"T", "1"}, {"dt", "0.01"}, {"n_values", "8"}};
  case Command::Saddle:
    return {};
  }
  return {};
}

struct KeyDefault {
  KeyInfo info;
  std::string_view value;
};

const std::vector<KeyDefault>& key_table() {
  static const std::vector<KeyDefault> table = {
      {{"path", "s0", ValueKind::Real, "s at t = 0"}, "0"},
      {{"path", "tau0", ValueKind::Real, "tau at t = 0"}, "0"},
      {{"path", "s1", ValueKind::Real, "s at t = T"}, "1"},
      {{"path", "tau1", ValueKind::Real, "tau at t = T"}, "1"},
      {{"path", "T", ValueKind::Real, "total annealing time"}, "10"},
      {{"path", "dt", ValueKind::Real, "integration time step"}, "0.1"},
      {{"profile", "profile", ValueKind::Text, "ramp, quench or homogeneous"}, "ramp"},
      {{"model", "model", ValueKind::Text, "pspin, sk-fig4, sk-fig5, sk-random or sk-file"}, "pspin"},
      {{"model", "n", ValueKind::Integer, "number of spins"}, "4"},
      {{"model", "p", ValueKind::Integer, "p-spin exponent"}, "3"},
      {{"model", "seed", ValueKind::Integer, "seed for sk-random"}, "1"},
      {{"model", "instance_file", ValueKind::Text, "JSON instance for sk-file"}, ""},
      {{"saddle", "s", ValueKind::Real, "s of the saddle-point query"}, "1"},
      {{"saddle", "tau", ValueKind::Real, "tau of the saddle-point query"}, "1"},
      {{"saddle", "beta", ValueKind::Real, "inverse temperature (inf for ground state)"}, "inf"},
      {{"sampling", "sample_stride", ValueKind::Integer, "record every k-th step"}, "1"},
      {{"sampling", "reference_points", ValueKind::Integer, "ground-state reference samples"}, "0"},
      {{"spectrum", "k_levels", ValueKind::Integer, "levels kept per grid point (0: auto)"}, "0"},
      {{"spectrum", "n_grid", ValueKind::Integer, "uniform grid points in t/T (0: 40 N)"}, "0"},
      {{"spectrum", "dense_max_dim", ValueKind::Integer, "largest block solved densely"}, "256"},
      {{"ensemble", "n_values", ValueKind::IntegerList, "system sizes"}, "4,6,8,10"},
      {{"ensemble", "realizations", ValueKind::Integer, "instances per size"}, "200"},
      {{"ensemble", "base_seed", ValueKind::Integer, "root of the instance seeds"}, "1"},
      {{"ensemble", "t_values", ValueKind::RealList, "total times for compare mode"},
       "1,10,100,1000,5000,10000"},
      {{"ensemble", "max_instances", ValueKind::Integer, "crossing instances kept (0: all)"}, "0"},
      {{"ensemble", "first_realization", ValueKind::Integer, "first realization of this worker"}, "0"},
      {{"ensemble", "last_realization", ValueKind::Integer, "last realization (-1: all)"}, "-1"},
      {{"run", "threads", ValueKind::Integer, "worker threads (0: all cores)"}, "0"},
      {{"run", "output_dir", ValueKind::Text, "output directory"}, ""},
  };
  return table;
}

const KeyDefault* find_key(std::string_view key) {
  std::string_view section;
  std::string_view name = key;
  if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    section = key.substr(0, dot);
    name = key.substr(dot + 1);
  }
  for (const auto& k : key_table())
    if (k.info.name == name && (section.empty() || section == k.info.section))
      return &k;
  return nullptr;
}

std::string full_name(const KeyInfo& info) {
  return std::string(info.section) + "." + std::string(info.name);
}

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = v.find_last_not_of(" \t\r\n");
  return std::string(v.substr(b, e - b + 1));
}

std::string format_real(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity")
    return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || std::isnan(v))
    throw ConfigError(std::string(key), "expected a number, got '" + t + "'");
  return v;
}

long long parse_integer(std::string_view key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(std::string(key), "expected an integer, got '" + t + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty())
        out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty())
    out.push_back(item);
  return out;
}

std::string canonical(const KeyInfo& info, std::string_view raw) {
  const std::string key(info.name);
  const std::string text = trim(raw);
  switch (info.kind) {
  case ValueKind::Real:
    return format_real(parse_real(key, text));
  case ValueKind::Integer:
    return std::to_string(parse_integer(key, text));
  case ValueKind::Text:
    return text;
  case ValueKind::RealList:
  case ValueKind::IntegerList: {
    std::string out;
    for (const auto& item : split_list(text)) {
      if (!out.empty())
        out += ',';
      out += info.kind == ValueKind::RealList ? format_real(parse_real(key, item))
                                              : std::to_string(parse_integer(key, item));
    }
    return out;
  }
  }
  return text;
}

std::filesystem::path output_root() {
  if (const char* env = std::getenv("IQA_OUTPUT_ROOT"); env && *env)
    return env;
  return "output";
}

} // namespace

std::string_view to_string(Command command) {
  for (const auto& c : kCommands)
    if (c.command == command)
      return c.name;
  return "unknown";
}

Command command_from_string(std::string_view name) {
  for (const auto& c : kCommands)
    if (c.name == name)
      return c.command;
  throw ConfigError("command", "unknown subcommand '" + std::string(name) + "'");
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> out;
    for (const auto& k : key_table())
      out.push_back(k.info);
    return out;
  }();
  return keys;
}

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const auto& p : preset_table())
      out.push_back(p.info);
    return out;
  }();
  return list;
}

RunConfig::RunConfig(Command command) : command_(command) {
  for (const auto& k : key_table())
    values_[full_name(k.info)] = canonical(k.info, k.value);
  for (const auto& [key, value] : command_defaults(command))
    set(key, value);
}

void RunConfig::apply_preset(std::string_view name) {
  for (const auto& p : preset_table()) {
    if (p.info.name != name)
      continue;
    if (p.info.command != command_)
      throw ConfigError("preset", "preset '" + std::string(name) + "' belongs to the '" +
                                      std::string(to_string(p.info.command)) + "' subcommand");
    for (const auto& [key, value] : p.values)
      set(key, value);
    return;
  }
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

void RunConfig::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw ConfigError("config", "cannot read " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_string(buf.str());
}

void RunConfig::load_string(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("malformed document: ") + e.what());
  }
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      set(name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty())
        throw ConfigError(name + "." + key, "nested sections are not supported");
      const auto* k = find_key(name + "." + key);
      if (!k)
        throw ConfigError(name + "." + key, "unknown key");
      set(name + "." + key, leaf.data());
    }
  }
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto* k = find_key(key);
  if (!k)
    throw ConfigError(std::string(key), "unknown key");
  values_[full_name(k->info)] = canonical(k->info, value);
}

std::string RunConfig::get(std::string_view key) const {
  const auto* k = find_key(key);
  if (!k)
    throw ConfigError(std::string(key), "unknown key");
  return values_.at(full_name(k->info));
}

std::string RunConfig::to_ini() const { return values_to_ini(values_); }

namespace {

class Reader {
public:
  explicit Reader(const std::map<std::string, std::string>& v) : v_(v) {}

  std::string text(std::string_view key) const { return v_.at(full(key)); }
  double real(std::string_view key) const { return parse_real(key, text(key)); }
  long long integer(std::string_view key) const { return parse_integer(key, text(key)); }
  int bounded(std::string_view key, long long lo, long long hi) const {
    const long long v = integer(key);
    if (v < lo || v > hi)
      throw ConfigError(std::string(key), "must lie in [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "], got " + std::to_string(v));
    return static_cast<int>(v);
  }
  double unit(std::string_view key) const {
    const double v = real(key);
    if (!(v >= 0.0 && v <= 1.0))
      throw ConfigError(std::string(key), "must lie in [0, 1]");
    return v;
  }

private:
  std::string full(std::string_view key) const {
    const auto* k = find_key(key);
    return full_name(k->info);
  }
  const std::map<std::string, std::string>& v_;
};

constexpr long long kIntMax = 1'000'000'000;

} // namespace

ResolvedConfig RunConfig::resolve() const {
  const Reader r(values_);
  ResolvedConfig c;
  c.command = command_;
  c.values = values_;

  AnnealPath& path = c.path;
  path.s0 = r.unit("s0");
  path.tau0 = r.unit("tau0");
  path.s1 = r.unit("s1");
  path.tau1 = r.unit("tau1");
  path.total_time = r.real("T");
  path.dt = r.real("dt");
  if (path.s1 < path.s0)
    throw ConfigError("s1", "must be >= s0");
  if (path.tau1 < path.tau0)
    throw ConfigError("tau1", "must be >= tau0");
  if (!(path.total_time > 0.0) || std::isinf(path.total_time))
    throw ConfigError("T", "must be positive and finite");
  if (!(path.dt > 0.0))
    throw ConfigError("dt", "must be positive");
  if (path.dt > path.total_time)
    throw ConfigError("dt", "must not exceed T");

  ProfileKind kind;
  try {
    kind = profile_kind_from_string(r.text("profile"));
  } catch (const Error& e) {
    throw ConfigError("profile", e.what());
  }

  c.model_kind = r.text("model");
  c.n_spins = r.bounded("n", 1, kIntMax);
  c.p = r.bounded("p", 1, 64);
  const long long seed = r.integer("seed");
  if (seed < 0)
    throw ConfigError("seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.instance_file = r.text("instance_file");

  if (c.model_kind == "sk-fig4" && c.n_spins != 4)
    throw ConfigError("n", "model sk-fig4 is defined for n = 4 only");
  if (c.model_kind == "sk-fig5" && c.n_spins != 8)
    throw ConfigError("n", "model sk-fig5 is defined for n = 8 only");
  if (c.model_kind == "sk-random" && c.n_spins < 2)
    throw ConfigError("n", "model sk-random needs n >= 2");
  if (c.model_kind == "sk-file" && c.instance_file.empty())
    throw ConfigError("instance_file", "model sk-file needs an instance_file");
  if (c.model_kind != "pspin" && c.model_kind != "sk-fig4" && c.model_kind != "sk-fig5" &&
      c.model_kind != "sk-random" && c.model_kind != "sk-file")
    throw ConfigError("model", "unknown model '" + c.model_kind + "'");

  c.profile = FieldProfile{kind, c.n_spins};

  c.saddle.s = r.unit("s");
  c.saddle.tau = r.unit("tau");
  c.saddle.beta = r.real("beta");
  c.saddle.p = c.p;
  if (!(c.saddle.beta > 0.0))
    throw ConfigError("beta", "must be positive or inf");

  c.sample_stride = r.bounded("sample_stride", 1, kIntMax);
  c.reference_points = r.bounded("reference_points", 0, kIntMax);
  if (c.reference_points == 1)
    throw ConfigError("reference_points", "must be 0 or >= 2");

  c.spectrum.k_levels = r.bounded("k_levels", 0, kIntMax);
  c.spectrum.n_grid = r.bounded("n_grid", 0, kIntMax);
  if (c.spectrum.n_grid == 1)
    throw ConfigError("n_grid", "must be 0 or >= 2");
  c.spectrum.eigen.dense_max_dim = static_cast<std::size_t>(r.bounded("dense_max_dim", 1, 1 << 16));

  EnsembleConfig& e = c.ensemble;
  e.n_values.clear();
  for (const auto& item : split_list(r.text("n_values")))
    e.n_values.push_back(static_cast<int>(parse_integer("n_values", item)));
  e.realizations = r.bounded("realizations", 1, kIntMax);
  const long long base = r.integer("base_seed");
  if (base < 0)
    throw ConfigError("base_seed", "must be >= 0");
  e.base_seed = static_cast<std::uint64_t>(base);
  e.t_values.clear();
  for (const auto& item : split_list(r.text("t_values")))
    e.t_values.push_back(parse_real("t_values", item));
  e.max_instances = r.bounded("max_instances", 0, kIntMax);
  e.first_realization = r.bounded("first_realization", 0, kIntMax);
  e.last_realization = r.bounded("last_realization", -1, kIntMax);
  e.path = path;
  e.spectrum = c.spectrum;

  c.threads = r.bounded("threads", 0, 4096);

  const std::string out = r.text("output_dir");
  if (out.empty())
    c.output_dir = output_root() / std::string(to_string(command_));
  else if (std::filesystem::path(out).is_absolute())
    c.output_dir = out;
  else
    c.output_dir = output_root() / out;

  switch (command_) {
  case Command::Meanfield:
    if (c.model_kind != "pspin")
      throw ConfigError("model", "meanfield dynamics needs the pspin model");
    break;
  case Command::Exact:
  case Command::Spectrum:
    if (c.n_spins > kMaxEnumerationSpins)
      throw ConfigError("n", "state-vector methods support n <= " +
                                 std::to_string(kMaxEnumerationSpins));
    if (command_ == Command::Spectrum && kind == ProfileKind::Quench)
      throw ConfigError("profile", "spectra need continuous fields; quench is not supported");
    break;
  case Command::EnsembleFraction:
  case Command::EnsembleCompare:
    e.validate();
    if (command_ == Command::EnsembleCompare && e.n_values.size() != 1)
      throw ConfigError("n_values", "compare mode takes exactly one N");
    if (command_ == Command::EnsembleCompare && e.t_values.empty())
      throw ConfigError("t_values", "compare mode needs at least one T");
    break;
  case Command::Saddle:
    break;
  }
  return c;
}

std::string values_to_json(const std::map<std::string, std::string>& values, int indent) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : key_table()) {
    const std::string& text = values.at(full_name(k.info));
    const std::string section(k.info.section);
    const std::string name(k.info.name);
    nlohmann::ordered_json v;
    switch (k.info.kind) {
    case ValueKind::Real: {
      const double d = parse_real(name, text);
      v = std::isinf(d) ? nlohmann::ordered_json(text) : nlohmann::ordered_json(d);
      break;
    }
    case ValueKind::Integer:
      v = parse_integer(name, text);
      break;
    case ValueKind::Text:
      v = text;
      break;
    case ValueKind::RealList:
      v = nlohmann::ordered_json::array();
      for (const auto& item : split_list(text))
        v.push_back(parse_real(name, item));
      break;
    case ValueKind::IntegerList:
      v = nlohmann::ordered_json::array();
      for (const auto& item : split_list(text))
        v.push_back(parse_integer(name, item));
      break;
    }
    j[section][name] = v;
  }
  return j.dump(indent);
}

std::string values_to_ini(const std::map<std::string, std::string>& values) {
  std::string out;
  std::string_view section;
  for (const auto& k : key_table()) {
    if (k.info.section != section) {
      if (!out.empty())
        out += '\n';
      section = k.info.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(k.info.name) + " = " + values.at(full_name(k.info)) + "\n";
  }
  return out;
}

std::uint64_t resolved_hash(const ResolvedConfig& config) {
  std::string text = std::string(to_string(config.command)) + "\n";
  for (const auto& [key, value] : config.values)
    if (key != "run.threads" && key != "run.output_dir")
      text += key + "=" + value + "\n";
  return fnv1a(text);
}

ProblemModel build_model(const ResolvedConfig& c) {
  if (c.model_kind == "pspin")
    return PSpinModel{c.n_spins, c.p};
  if (c.model_kind == "sk-fig4")
    return make_deterministic_sk(DeterministicKind::Fig4, c.n_spins);
  if (c.model_kind == "sk-fig5")
    return make_deterministic_sk(DeterministicKind::Fig5, c.n_spins);
  if (c.model_kind == "sk-random")
    return sample_sk(c.n_spins, c.seed);
  std::ifstream in(c.instance_file);
  if (!in)
    throw ConfigError("instance_file", "cannot read " + c.instance_file);
  std::stringstream buf;
  buf << in.rdbuf();
  SkInstance inst;
  try {
    inst = sk_from_json(buf.str());
  } catch (const Error& e) {
    throw ConfigError("instance_file", e.what());
  }
  if (inst.n_spins() != c.n_spins)
    throw ConfigError("n", "instance file has " + std::to_string(inst.n_spins()) +
                               " spins but n = " + std::to_string(c.n_spins));
  return inst;
}

} // namespace iqa
