// towerforge: command-line front end.
//
// Exit codes: 0 all checks passed, 1 a verification failed, 2 input could not
// be parsed or violates a precondition, 3 a size guard was exceeded.

#include <iostream>

#include "CLI11.hpp"
#include "towerforge/errors.hpp"
#include "towerforge/run.hpp"

using namespace towerforge;

int main(int argc, char** argv) {
  CLI::App app{"Finite constructions for p-class tower lifting problems"};
  RunConfig config;
  std::string command;
  std::optional<unsigned> p;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> e, q, guard;
  std::optional<std::string> group;
  std::string tame;

  app.add_option("--command,command", command, "command to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--input", config.inputs, "input files or directories");
  app.add_option("--output", config.output, "write the JSON report here (text report beside it)");
  app.add_option("--p", p, "prime");
  app.add_option("--n", n, "rank parameter, or kernel exponent for property-p");
  app.add_option("--e", e, "ramification index for property-p");
  app.add_option("--q", q, "residue field size for property-p");
  app.add_option("--tame", tame, "tame ramification for property-p (true/false)")->check(CLI::IsMember({"true", "false"}));
  app.add_option("--group", group, "builtin group for projectors, e.g. symmetric:3");
  app.add_option("--seed", config.seed, "seed for sampled checks");
  app.add_option("--samples", config.samples, "number of sampled congruence plans");
  app.add_option("--guard-max", guard, "override every enumeration size guard");
  app.add_flag("--timing", config.timing, "include per-check wall time in the reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    config.command = parse_command(command);
    if (p) config.p = static_cast<Scalar>(*p);
    config.n = n;
    config.e = e;
    config.q = q;
    config.group = group;
    config.guard_max = guard;
    if (!tame.empty()) config.tame = tame == "true";

    Report report = run(config);
    if (config.output.empty()) {
      std::cout << report_to_json(report).dump(2) << "\n";
    } else {
      emit_report(report, config.output);
      std::cout << report_to_text(report);
    }
    return exit_status(report);
  } catch (const GuardExceeded& err) {
    std::cerr << "guard exceeded: " << err.what() << "\n";
    return 3;
  } catch (const ParseError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const PreconditionError& err) {
    std::cerr << "invalid input: " << err.what() << "\n";
    return 2;
  } catch (const std::logic_error& err) {
    std::cerr << "internal check failed: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
