#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge_cli/config.hpp"

namespace forge_cli {

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitUsage = 2, kExitStage = 3 };

inline constexpr int kSchemaVersion = 1;

/// An input file no longer matches the hash recorded in a run config.
class InputDrift : public forge::Error {
 public:
  using forge::Error::Error;
};

/// Subcommands that run a module operation (everything except verify).
const std::vector<std::string>& run_subcommands();
const Schema& schema_for(const std::string& subcommand);

struct Outcome {
  nlohmann::json result = nlohmann::json::object();
  int exit_code = kExitOk;
  std::string message;
  std::string graph_text;  // generate: the graph file contents
};

/// Runs a fully resolved config. Input files are hashed into `cfg.inputs`;
/// hashes already present must match (InputDrift otherwise).
Outcome execute(RunConfig& cfg);

/// {"schema": 1, "kind": ..., "run_config": ..., "result": ...}
nlohmann::json make_artifact(const RunConfig& cfg, const Outcome& outcome);
std::string dump_artifact(const nlohmann::json& artifact);

struct VerifyReport {
  bool valid = true;
  std::string summary;
  std::vector<std::string> problems;
};

/// Re-checks an artifact against its recorded inputs: independent checks
/// where the result carries a witness, replay and compare otherwise.
VerifyReport verify_artifact(const nlohmann::json& artifact);

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace forge_cli
