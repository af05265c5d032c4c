#ifndef IQA_PIPELINE_HPP
#define IQA_PIPELINE_HPP

#include "iqa/config.hpp"

#include <exception>
#include <filesystem>
#include <string>
#include <string_view>

namespace iqa {

std::string_view library_version();

struct RunResult {
  int exit_code = 0; // 0 success, 2 configuration error, 3 numeric or I/O failure
  std::filesystem::path output_dir;
  std::string error_kind;
  std::string error_key;
  std::string message;
};

// Resolves the configuration, runs the selected pipeline and writes its data
// files plus run.json. Failures are caught, written to error.json in the
// output directory when one can be determined, and mapped to an exit code.
RunResult run_pipeline(const RunConfig& config);

// Exit code and short kind name ("config", "numeric", ...) for an exception.
int exit_code_for(const std::exception& error);
std::string_view error_kind(const std::exception& error);

void write_error_file(const std::filesystem::path& dir, const RunResult& result);

} // namespace iqa

#endif
