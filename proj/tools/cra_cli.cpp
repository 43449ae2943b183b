// cra: experiment driver writing CSV tables.
//
//   cra approx --target gaussian --q 2 --a 0 --N 64,128,256,512 --seeds 1..10
//   cra kernel-table --k 2 --grid 1001
//   cra memorize --n 64 --d 8 --theta 0.5 --eps 1e-2 --delta 0.25 --seed 3
//   cra poly --coeffs spec.json --a 1 --N 2000,4000 --seeds 1..5
//
// Flags given on the command line override values from --config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cra/experiments.hpp"

namespace {

using cra::experiments::RunConfig;

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::string config;
  std::string out;
};

void add_flags(Command& c, const std::vector<std::pair<std::string, std::string>>& flags) {
  for (const auto& [name, help] : flags) c.options.emplace_back(name, c.app->add_option("--" + name, c.values[name], help));
  c.app->add_option("--seeds", c.values["seeds"], "seed list, e.g. 1..10 or 1,3,5");
  c.options.emplace_back("seeds", c.app->get_option("--seeds"));
  c.app->add_option("--seed", c.values["seed"], "single seed");
  c.options.emplace_back("seed", c.app->get_option("--seed"));
  c.app->add_option("--config", c.config, "file of key=value lines mirroring the flags");
  c.app->add_option("--out", c.out, "CSV path (stdout when omitted)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corrective random-features experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cra::experiments::version()));

  std::vector<Command> commands(4);
  commands[0].name = "memorize";
  commands[0].app = app.add_subcommand("memorize", "corrective memorization of random labels");
  add_flags(commands[0], {{"n", "number of points"},
                          {"d", "dimension"},
                          {"theta", "minimum separation"},
                          {"eps", "target total squared error"},
                          {"delta", "failure probability"},
                          {"c0", "constant in s and N0"},
                          {"max-units", "cap on units per round"},
                          {"refit", "joint refit of the outer layer (true/false)"}});
  commands[1].name = "approx";
  commands[1].app = app.add_subcommand("approx", "approximation error against N");
  add_flags(commands[1], {{"target", "gaussian or cosine"},
                          {"freq", "cosine frequency along x1"},
                          {"q", "dimension"},
                          {"a", "corrective depth"},
                          {"N", "comma-separated unit counts"},
                          {"schedule", "sup or barron"},
                          {"radius", "domain radius"},
                          {"train", "training points"},
                          {"test", "test points"},
                          {"steps", "gradient steps per group"}});
  commands[2].name = "poly";
  commands[2].app = app.add_subcommand("poly", "learn a low-degree polynomial on [0,1]^d");
  add_flags(commands[2], {{"coeffs", "JSON polynomial spec"},
                          {"d", "dimension"},
                          {"q", "degree bound"},
                          {"a", "corrective depth"},
                          {"N", "comma-separated unit counts (rounded up to divisibility)"},
                          {"train", "training points"},
                          {"test", "test points"},
                          {"steps", "gradient steps"}});
  commands[3].name = "kernel-table";
  commands[3].app = app.add_subcommand("kernel-table", "tabulate ReLU, SReLU_k and the smoothing filter");
  add_flags(commands[3], {{"k", "smoothness order"}, {"grid", "number of points"}, {"t-max", "half range"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      RunConfig cfg = RunConfig::defaults(c.name);
      if (!c.config.empty()) cra::experiments::apply_config_file(cfg, c.config);
      for (const auto& [name, opt] : c.options)
        if (opt->count() > 0) cfg.set(name, c.values[name]);
      if (!c.out.empty()) cfg.out = c.out;
      const std::string csv = cra::experiments::to_csv(cfg, cra::experiments::run(cfg));
      if (cfg.out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!(f << csv)) throw std::runtime_error("cannot write '" + cfg.out + "'");
      }
    } catch (const cra::experiments::ConfigError& e) {
      std::cerr << "cra: config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "cra: error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
