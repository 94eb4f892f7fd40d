#pragma once

// Subcommand implementations. Each returns a process exit code; module
// errors propagate as exceptions and are mapped to exit codes by the caller.

#include <iosfwd>
#include <string>
#include <vector>

#include "moscito/app/config.hpp"

namespace moscito::app {

struct SweepRequest {
  std::string axis;
  std::vector<std::string> values;
};

int cmd_featurize(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_cluster(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_score(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const PipelineConfig& cfg, const SweepRequest& sweep, std::ostream& out, std::ostream& err);
int cmd_runtime(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

/// Maps an exception to (exit code, error kind): configuration and usage
/// problems give 2, everything else 1.
struct ErrorInfo {
  int exit_code = 1;
  std::string kind;
  std::string message;
  std::string field;  // config key, when known
  int line = 0;       // parse errors
};
ErrorInfo classify_error(const std::exception& e);
std::string error_json(const ErrorInfo& info);

}  // namespace moscito::app
