#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/io.hpp"

namespace qdil {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailure = 1,
  kExitInputError = 2,
  kExitNoConvergence = 3,
};

int exit_code_for(ErrorCode code) noexcept;

struct RunConfig {
  ToleranceConfig tol;
  std::size_t k_max = 5;
  int deg = 0;  ///< 0 selects the adaptive cap
  std::string mode = "pure";
  std::optional<std::uint64_t> seed;
  std::filesystem::path in_path;
  std::filesystem::path out_path;  ///< empty writes to stdout
};

/// Report (or instance, for gen) plus the process exit status.
struct CommandResult {
  json document;
  int exit_code = kExitPass;
  std::string summary;
};

CommandResult cmd_gen(GeneratorSpec spec, const RunConfig& rc);
CommandResult cmd_dilate_pair(const QPair& pair, const RunConfig& rc);
CommandResult cmd_dilate_tuple(const QTuple& t, const RunConfig& rc);
CommandResult cmd_verify(const Instance& inst, const RunConfig& rc);

/// Reads rc.in_path, runs `command` ("gen", "dilate-pair", "dilate-tuple",
/// "verify") and converts library errors into an error report with the
/// matching exit code. Does not write anything.
CommandResult run_command(const std::string& command, const RunConfig& rc);

/// Writes the document to rc.out_path (or stdout) and the summary line.
void emit(const CommandResult& result, const RunConfig& rc);

}  // namespace qdil
