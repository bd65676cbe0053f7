#pragma once

// Command dispatch and reports for the command-line front end.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "towerforge/io.hpp"

namespace towerforge {

inline constexpr int kReportSchemaVersion = 1;

enum class Command {
  Filtration,
  Projectors,
  Subgroups,
  WedgeCheck,
  CongruencePlans,
  RingDichotomy,
  RingSplit,
  LiftSearch,
  PropertyP,
  VerifyAll,
};
std::string to_string(Command c);
/// Throws ParseError on an unknown name.
Command parse_command(const std::string& name);
const std::vector<std::string>& command_names();

struct RunConfig {
  Command command = Command::VerifyAll;
  std::vector<std::string> inputs;  // files or directories
  std::string output;               // empty: JSON to stdout
  std::optional<Scalar> p;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> e;
  std::optional<std::uint64_t> q;
  std::optional<bool> tame;
  std::optional<std::string> group;  // builtin group name for projectors
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> guard_max;
  std::size_t samples = 1000;
  bool timing = false;
};

struct Verdict {
  std::string suite;
  std::string lemma;     // the statement the check instantiates
  std::string instance;
  bool pass = false;
  Json data = Json::object();
  std::vector<std::string> trace;
  std::optional<double> millis;
};

struct Report {
  std::string command;
  Json config = Json::object();
  std::vector<Verdict> results;

  bool all_pass() const;
};

/// Throws ParseError (bad input), GuardExceeded (size guard) or
/// PreconditionError (input violates an invariant).
Report run(const RunConfig& config);

Json report_to_json(const Report& report);
std::string report_to_text(const Report& report);
/// Writes JSON to `path` and the text report next to it (extension .txt).
/// Throws std::runtime_error when a file cannot be written.
void emit_report(const Report& report, const std::string& path);

/// Exit status for a finished run: 0 when every verdict passed, else 1.
int exit_status(const Report& report);

}  // namespace towerforge
