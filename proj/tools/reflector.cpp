#include <CLI11.hpp>

#include <iostream>
#include <vector>

#include "reflector/cli.hpp"

int main(int argc, char** argv) {
  using namespace refl::cli;
  CLI::App app{"Convex reflectors from focal functions"};
  app.require_subcommand(1, 1);

  JobSpec spec;
  std::string input;
  std::string output;
  int dim = 0;
  std::vector<CLI::Option*> dim_options;

  const char* help[] = {
      "reflector summary, surface mesh and exported focal field",
      "closed focal field and per-direction gap table",
      "validity verdict with witness",
      "directrix mesh, dual-construction distance and support-identity table",
      "reflection records over the grid directions",
      "property suite with pass/fail per property",
  };
  const Command commands[] = {Command::Build, Command::Closure, Command::Check,
                              Command::Directrix, Command::Trace, Command::Report};
  for (int k = 0; k < 6; ++k) {
    CLI::App* sub = app.add_subcommand(command_name(commands[k]), help[k]);
    sub->add_option("--in", input, "input focal field (JSON)")->required();
    sub->add_option("--out", output, "output directory")->required();
    dim_options.push_back(sub->add_option("--dim", dim, "expected dimension n (1 or 2)"));
    sub->add_option("--level", spec.level, "grid level")->capture_default_str();
    sub->add_option("--tol", spec.tol, "validity and property tolerance")->capture_default_str();
    sub->add_option("--seed", spec.seed, "random seed")->capture_default_str();
    sub->callback([&spec, c = commands[k]] { spec.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  spec.input = input;
  spec.output = output;
  for (const CLI::Option* o : dim_options) {
    if (o->count() > 0) spec.dim = dim;
  }
  return run(spec, std::cout, std::cerr);
}
