// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "advper.h"

int main(int argc, char** argv) {
  CLI::App app{"Adversarial perimeter experiments on uniform grids"};
  app.set_version_flag("--version", std::string(advper_version()));
  app.require_subcommand(1);

  std::string config, out = "out";
  int threads = 0;
  long long seed = -1;

  const char* names[][2] = {
      {"risk", "Evaluate risks and dual-path identities"},
      {"exchange", "Energy exchange sweep over random (A, E) pairs"},
      {"convergence", "Hausdorff convergence over an eps list"},
      {"validate-assumptions", "Run the attack-assumption validators"},
      {"solve", "Minimize the adversarial risk"},
  };
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (default: ADVPER_THREADS or 1)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Seed override")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string which = app.get_subcommands().front()->get_name();
  int exit_code = 2;
  const advper_status st = advper_run(which.c_str(), config.c_str(), out.c_str(), threads, seed >= 0 ? 1 : 0,
                                      seed >= 0 ? static_cast<uint64_t>(seed) : 0, &exit_code);
  if (st != ADVPER_OK) {
    std::fprintf(stderr, "error: %s: %s\n", advper_status_string(st), advper_last_error());
    return 2;
  }
  return exit_code;
}
