#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace advper {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0: ADVPER_THREADS or 1
  std::optional<std::uint64_t> seed;
};

std::vector<std::string> subcommands();

// Exit status: 0 clean, 1 assertion violations, 2 usage/schema/precondition errors.
int run_command(const std::string& subcommand, const RunOptions& opts, std::ostream& log);

}  // namespace advper
