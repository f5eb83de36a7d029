#pragma once

#include "util.hpp"

#include <map>
#include <string>

namespace roacli {

// A subcommand: its options live in `config`, `run` produces the artifacts and
// returns the summary printed on stdout.
struct Command {
  CLI::App* app = nullptr;
  Config config;
  std::function<json(Artifacts&)> run;
};

// Registers every subcommand on `app`. Option storage lives in `state`, which
// must outlive parsing and execution.
struct CommandState;
std::shared_ptr<CommandState> register_commands(CLI::App& app,
                                                std::map<std::string, Command>& commands);

}  // namespace roacli
