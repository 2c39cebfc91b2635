#pragma once

// Batch jobs behind the `reflector` command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace refl::cli {

enum class Command { Build, Closure, Check, Directrix, Trace, Report };

struct JobSpec {
  Command command = Command::Build;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<int> dim;  // must match the input when given
  int level = 3;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitMath = 3;

std::optional<Command> parse_command(const std::string& name);
const char* command_name(Command c);

/// Runs one job, writing artifacts into spec.output (created if missing).
/// Diagnostics go to `err`; the return value is the process exit code.
int run(const JobSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace refl::cli
