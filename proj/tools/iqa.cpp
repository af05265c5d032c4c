// Command-line front end. Everything goes through the C interface.
#include "iqa/iqa.h"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

struct CommandOptions {
  std::string command;
  CLI::App* app = nullptr;
  std::string preset;
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_key_options(CommandOptions& opts) {
  opts.app->add_option("--preset", opts.preset, "named figure preset");
  opts.app->add_option("--config", opts.config_file, "INI configuration file");
  for (size_t i = 0; i < iqa_config_key_count(); ++i) {
    const std::string name = iqa_config_key_name(i);
    const std::string help =
        std::string(iqa_config_key_help(i)) + " [" + iqa_config_key_section(i) + "]";
    opts.app->add_option("--" + name, opts.values[name], help);
  }
}

int report(iqa_config* config, iqa_status status) {
  const std::string key = iqa_last_error_key();
  const std::string message = iqa_last_error_message();
  std::fprintf(stderr, "error: %s\n", message.c_str());
  const int code = status == IQA_ERR_NUMERIC || status == IQA_ERR_IO || status == IQA_ERR_INTERNAL ? 3 : 2;
  if (config)
    iqa_config_report_error(config, code, iqa_status_name(status), key.c_str(), message.c_str());
  return code;
}

using ConfigHandle = std::unique_ptr<iqa_config, decltype(&iqa_config_destroy)>;

int run(CommandOptions& opts) {
  iqa_config* raw = nullptr;
  iqa_status st = iqa_config_create(opts.command.c_str(), &raw);
  if (st != IQA_OK)
    return report(nullptr, st);
  ConfigHandle config(raw, &iqa_config_destroy);
  // Errors from the preset or file layer are reported into the requested directory.
  if (opts.app->get_option("--output_dir")->count() > 0 &&
      (st = iqa_config_set(config.get(), "output_dir", opts.values["output_dir"].c_str())) !=
          IQA_OK)
    return report(config.get(), st);
  if (!opts.preset.empty() &&
      (st = iqa_config_apply_preset(config.get(), opts.preset.c_str())) != IQA_OK)
    return report(config.get(), st);
  if (!opts.config_file.empty() &&
      (st = iqa_config_load_file(config.get(), opts.config_file.c_str())) != IQA_OK)
    return report(config.get(), st);
  for (size_t i = 0; i < iqa_config_key_count(); ++i) {
    const std::string name = iqa_config_key_name(i);
    auto* opt = opts.app->get_option("--" + name);
    if (opt->count() == 0)
      continue;
    if ((st = iqa_config_set(config.get(), name.c_str(), opts.values[name].c_str())) != IQA_OK)
      return report(config.get(), st);
  }
  int exit_code = 0;
  std::vector<char> dir(4096);
  size_t needed = 0;
  st = iqa_config_run(config.get(), &exit_code, dir.data(), dir.size(), &needed);
  if (st != IQA_OK)
    return report(config.get(), st);
  if (exit_code != 0)
    std::fprintf(stderr, "error: %s\n", iqa_last_error_message());
  else
    std::printf("%s\n", dir.data());
  return exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous quantum annealing simulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(iqa_version()));

  std::vector<CommandOptions> commands;
  commands.reserve(6);
  auto make = [&](CLI::App* parent, const std::string& name, const std::string& command,
                  const std::string& help) {
    commands.push_back({command, parent->add_subcommand(name, help), {}, {}, {}});
    add_key_options(commands.back());
  };
  make(&app, "meanfield", "meanfield", "mean-field p-spin dynamics");
  make(&app, "exact", "exact", "state-vector dynamics of a small instance");
  make(&app, "spectrum", "spectrum", "sector-resolved spectrum and exact crossings");
  make(&app, "saddle", "saddle", "static saddle point of the p-spin model");
  auto* ensemble = app.add_subcommand("ensemble", "random-instance statistics");
  ensemble->require_subcommand(1);
  make(ensemble, "fraction", "ensemble-fraction", "fraction of instances with a ground crossing");
  make(ensemble, "compare", "ensemble-compare", "final energy of IQA vs conventional annealing");

  auto* list = app.add_subcommand("presets", "list the figure presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (size_t i = 0; i < iqa_preset_count(); ++i)
      std::printf("%-12s %-18s %s\n", iqa_preset_name(i), iqa_preset_command(i),
                  iqa_preset_description(i));
    return 0;
  }
  for (auto& c : commands)
    if (c.app->parsed())
      return run(c);
  return 2;
}
