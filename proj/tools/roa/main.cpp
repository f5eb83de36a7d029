#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace roacli;

namespace {

int run(std::vector<std::string> args) {
  CLI::App app{"Region-of-attraction and recovery-boundary toolkit", "roa"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string out_dir;
  std::string manifest_in;
  app.add_option("--out", out_dir, "output directory (default $ROA_OUT, else ./roa-out)");
  app.add_option("--from-manifest", manifest_in, "re-run the configuration recorded in a manifest");
  app.set_version_flag("--version", roa_version());

  std::map<std::string, Command> commands;
  const auto state = register_commands(app, commands);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (!manifest_in.empty()) {
    if (!app.get_subcommands().empty()) usage_error("--from-manifest takes no subcommand");
    std::ifstream f(manifest_in);
    if (!f) usage_error("cannot read manifest " + manifest_in);
    json m;
    try {
      m = json::parse(f);
    } catch (const json::exception& e) {
      usage_error(std::string("malformed manifest: ") + e.what());
    }
    if (!m.contains("subcommand") || !m.contains("config")) {
      usage_error("manifest lacks subcommand/config");
    }
    std::vector<std::string> replay = replay_args(m["subcommand"].get<std::string>(), m["config"]);
    if (!out_dir.empty()) {
      replay.insert(replay.begin(), out_dir);
      replay.insert(replay.begin(), "--out");
    }
    return run(replay);
  }

  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  Command& cmd = commands.at(name);

  Artifacts art;
  if (!out_dir.empty()) {
    art.dir = out_dir;
  } else if (const char* env = std::getenv("ROA_OUT"); env != nullptr && *env != '\0') {
    art.dir = env;
  } else {
    art.dir = "roa-out";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const json result = cmd.run(art);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["tool"] = "roa";
  manifest["version"] = roa_version();
  manifest["subcommand"] = name;
  manifest["config"] = cmd.config.dump();
  manifest["artifacts"] = art.files;
  manifest["timings"] = {{"run_s", elapsed}};
  art.write("manifest.json", dump_json(manifest));
  std::cout << dump_json(result);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const Failure& f) {
    std::cerr << "roa: " << f.what() << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "roa: " << e.what() << '\n';
    return kExitDomain;
  }
}
