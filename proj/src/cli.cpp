#include <filesystem>
#include <iostream>
#include <iterator>

#include <CLI11.hpp>

#include "imverde/commands.hpp"
#include "imverde/error.hpp"

namespace imverde {

namespace {

enum ExitCode : int { kOk = 0, kInternal = 1, kInput = 2, kIo = 3, kNumeric = 4 };

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Class-aware node embeddings from diminishing random walks", "imverde"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  CommandOptions options;
  std::string out_dir = "out";

  using Command = CommandOutput (*)(const ExperimentConfig&, const CommandOptions&);
  Command selected = nullptr;
  const std::pair<const char*, Command> commands[] = {
      {"walk-stats", &cmd_walk_stats},
      {"train", &cmd_train},
      {"eval", &cmd_eval},
      {"sweep", &cmd_sweep},
  };
  const char* help[] = {
      "Walk purity per class and the occupancy convergence trace",
      "Train every configured variant and save embeddings, checkpoint and loss report",
      "Score trained variants on the test split",
      "Train and score over an imbalance-ratio or (alpha, r) grid",
  };
  CLI::Option* seed_opt = nullptr;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", config_path, "Experiment config (JSON with comments)")->required();
    auto* s = sub->add_option("--seed", seed, "Root seed, overrides the config");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--deterministic", options.deterministic, "Run single-threaded");
    sub->callback([&selected, &seed_opt, s, cmd = commands[i].second] {
      selected = cmd;
      seed_opt = s;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (seed_opt && seed_opt->count() > 0) options.seed = seed;
    options.out_dir = out_dir;
    if (!std::filesystem::is_regular_file(config_path)) {
      throw ValidationError("config file not found: " + config_path);
    }
    const auto cfg = load_config(config_path);
    const auto out = selected(cfg, options);
    for (const auto& a : out.artifacts) std::cout << (options.out_dir / a).string() << "\n";
    return kOk;
  } catch (const NumericError& e) {
    std::cerr << "imverde: numeric abort: " << e.what() << "\n";
    return kNumeric;
  } catch (const IoError& e) {
    std::cerr << "imverde: io error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "imverde: " << e.what() << "\n";
    return kInput;
  } catch (const ValidationError& e) {
    std::cerr << "imverde: " << e.what() << "\n";
    return kInput;
  } catch (const DegenerateError& e) {
    std::cerr << "imverde: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "imverde: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace imverde
