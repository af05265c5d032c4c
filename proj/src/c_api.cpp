#include "iqa/iqa.h"

#include "iqa/config.hpp"
#include "iqa/error.hpp"
#include "iqa/meanfield.hpp"
#include "iqa/models.hpp"
#include "iqa/pipeline.hpp"
#include "iqa/schedules.hpp"

#include <cstring>
#include <string>

struct iqa_config {
  iqa::RunConfig config;
};

struct iqa_sk {
  iqa::SkInstance instance;
};

namespace {

thread_local std::string last_message;
thread_local std::string last_key;

iqa_status fail(iqa_status status, std::string message, std::string key = {}) {
  last_message = std::move(message);
  last_key = std::move(key);
  return status;
}

iqa_status translate() {
  try {
    throw;
  } catch (const iqa::ConfigError& e) {
    return fail(IQA_ERR_CONFIG, e.what(), e.key());
  } catch (const iqa::DomainError& e) {
    return fail(IQA_ERR_DOMAIN, e.what());
  } catch (const iqa::CapacityError& e) {
    return fail(IQA_ERR_CAPACITY, e.what());
  } catch (const iqa::UnsupportedProfileError& e) {
    return fail(IQA_ERR_UNSUPPORTED_PROFILE, e.what());
  } catch (const iqa::NumericError& e) {
    return fail(IQA_ERR_NUMERIC, e.what());
  } catch (const iqa::IoError& e) {
    return fail(IQA_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IQA_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(IQA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IQA_ERR_INTERNAL, "unknown error");
  }
}

template <class Fn>
iqa_status guarded(Fn&& fn) {
  try {
    fn();
    last_message.clear();
    last_key.clear();
    return IQA_OK;
  } catch (...) {
    return translate();
  }
}

iqa_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed)
    *needed = text.size() + 1;
  if (!buffer || capacity < text.size() + 1)
    return fail(IQA_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return IQA_OK;
}

} // namespace

extern "C" {

const char* iqa_version(void) {
  static const std::string v(iqa::library_version());
  return v.c_str();
}

const char* iqa_status_name(iqa_status status) {
  switch (status) {
  case IQA_OK: return "ok";
  case IQA_ERR_CONFIG: return "config";
  case IQA_ERR_DOMAIN: return "domain";
  case IQA_ERR_CAPACITY: return "capacity";
  case IQA_ERR_UNSUPPORTED_PROFILE: return "unsupported_profile";
  case IQA_ERR_NUMERIC: return "numeric";
  case IQA_ERR_IO: return "io";
  case IQA_ERR_INVALID_ARGUMENT: return "invalid_argument";
  case IQA_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
  case IQA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* iqa_last_error_message(void) { return last_message.c_str(); }
const char* iqa_last_error_key(void) { return last_key.c_str(); }

iqa_status iqa_config_create(const char* command, iqa_config** out) {
  if (!command || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new iqa_config{iqa::RunConfig(iqa::command_from_string(command))}; });
}

void iqa_config_destroy(iqa_config* config) { delete config; }

iqa_status iqa_config_apply_preset(iqa_config* config, const char* preset) {
  if (!config || !preset)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->config.apply_preset(preset); });
}

iqa_status iqa_config_load_file(iqa_config* config, const char* path) {
  if (!config || !path)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->config.load_file(path); });
}

iqa_status iqa_config_load_string(iqa_config* config, const char* text) {
  if (!config || !text)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->config.load_string(text); });
}

iqa_status iqa_config_set(iqa_config* config, const char* key, const char* value) {
  if (!config || !key || !value)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { config->config.set(key, value); });
}

iqa_status iqa_config_get(const iqa_config* config, const char* key, char* buffer,
                          size_t capacity, size_t* needed) {
  if (!config || !key)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  std::string value;
  const iqa_status st = guarded([&] { value = config->config.get(key); });
  return st == IQA_OK ? copy_out(value, buffer, capacity, needed) : st;
}

iqa_status iqa_config_validate(const iqa_config* config) {
  if (!config)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { (void)config->config.resolve(); });
}

iqa_status iqa_config_to_json(const iqa_config* config, char* buffer, size_t capacity,
                              size_t* needed) {
  if (!config)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  std::string text;
  const iqa_status st = guarded([&] {
    const auto resolved = config->config.resolve();
    text = iqa::values_to_json(resolved.values);
  });
  return st == IQA_OK ? copy_out(text, buffer, capacity, needed) : st;
}

size_t iqa_config_key_count(void) { return iqa::config_keys().size(); }

const char* iqa_config_key_section(size_t index) {
  return index < iqa::config_keys().size() ? iqa::config_keys()[index].section.data() : nullptr;
}

const char* iqa_config_key_name(size_t index) {
  return index < iqa::config_keys().size() ? iqa::config_keys()[index].name.data() : nullptr;
}

const char* iqa_config_key_help(size_t index) {
  return index < iqa::config_keys().size() ? iqa::config_keys()[index].help.data() : nullptr;
}

size_t iqa_preset_count(void) { return iqa::presets().size(); }

const char* iqa_preset_name(size_t index) {
  return index < iqa::presets().size() ? iqa::presets()[index].name.data() : nullptr;
}

const char* iqa_preset_command(size_t index) {
  return index < iqa::presets().size() ? iqa::to_string(iqa::presets()[index].command).data()
                                       : nullptr;
}

const char* iqa_preset_description(size_t index) {
  return index < iqa::presets().size() ? iqa::presets()[index].description.data() : nullptr;
}

iqa_status iqa_config_run(const iqa_config* config, int* exit_code, char* buffer, size_t capacity,
                          size_t* needed) {
  if (!config || !exit_code)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  iqa::RunResult result;
  const iqa_status st = guarded([&] { result = iqa::run_pipeline(config->config); });
  if (st != IQA_OK)
    return st;
  *exit_code = result.exit_code;
  if (result.exit_code != 0)
    fail(IQA_OK, result.message, result.error_key);
  if (buffer || needed) {
    const std::string saved_message = last_message;
    const std::string saved_key = last_key;
    const iqa_status copy = copy_out(result.output_dir.string(), buffer, capacity, needed);
    if (copy != IQA_OK)
      return copy;
    last_message = saved_message;
    last_key = saved_key;
  }
  return IQA_OK;
}

void iqa_config_report_error(const iqa_config* config, int exit_code, const char* kind,
                             const char* key, const char* message) {
  if (!config)
    return;
  iqa::RunResult result;
  result.exit_code = exit_code;
  result.error_kind = kind ? kind : "config";
  result.error_key = key ? key : "";
  result.message = message ? message : "";
  try {
    iqa::RunConfig probe(config->config.command());
    probe.set("output_dir", config->config.get("output_dir"));
    iqa::write_error_file(probe.resolve().output_dir, result);
  } catch (...) {
  }
}

iqa_status iqa_gamma(const char* profile, int n_spins, int spin, double x, double* out) {
  if (!profile || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = iqa::gamma(iqa::FieldProfile{iqa::profile_kind_from_string(profile), n_spins}, spin, x);
  });
}

iqa_status iqa_field_off_tau(const char* profile, int n_spins, int spin, double* out) {
  if (!profile || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = iqa::field_off_tau(iqa::FieldProfile{iqa::profile_kind_from_string(profile), n_spins},
                              spin);
  });
}

iqa_status iqa_saddle_solve(double s, double tau, int p, double beta, double* m, double* h,
                            double* f, double* residual) {
  return guarded([&] {
    iqa::SaddlePointQuery q;
    q.s = s;
    q.tau = tau;
    q.p = p;
    q.beta = beta;
    const auto sol = iqa::solve_saddle(q);
    if (m) *m = sol.m;
    if (h) *h = sol.h;
    if (f) *f = sol.f;
    if (residual) *residual = sol.residual;
  });
}

iqa_status iqa_sk_create_deterministic(const char* kind, int n_spins, iqa_sk** out) {
  if (!kind || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string k(kind);
    iqa::DeterministicKind dk;
    if (k == "fig4")
      dk = iqa::DeterministicKind::Fig4;
    else if (k == "fig5")
      dk = iqa::DeterministicKind::Fig5;
    else
      throw iqa::DomainError("unknown deterministic instance '" + k + "'");
    *out = new iqa_sk{iqa::make_deterministic_sk(dk, n_spins)};
  });
}

iqa_status iqa_sk_sample(int n_spins, uint64_t seed, iqa_sk** out) {
  if (!out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new iqa_sk{iqa::sample_sk(n_spins, seed)}; });
}

iqa_status iqa_sk_from_json(const char* text, iqa_sk** out) {
  if (!text || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new iqa_sk{iqa::sk_from_json(text)}; });
}

iqa_status iqa_sk_to_json(const iqa_sk* sk, char* buffer, size_t capacity, size_t* needed) {
  if (!sk)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return copy_out(iqa::to_json(sk->instance), buffer, capacity, needed);
}

int iqa_sk_n_spins(const iqa_sk* sk) { return sk ? sk->instance.n_spins() : 0; }

iqa_status iqa_sk_energy(const iqa_sk* sk, uint64_t config, double* out) {
  if (!sk || !out)
    return fail(IQA_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const int n = sk->instance.n_spins();
    if (n < 64 && (config >> n) != 0)
      throw iqa::DomainError("configuration has bits beyond spin N");
    *out = iqa::classical_energy(sk->instance, iqa::SpinConfiguration{config, n});
  });
}

void iqa_sk_destroy(iqa_sk* sk) { delete sk; }

} // extern "C"
