#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "docforge/evalkit.hpp"

namespace docforge::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRuntime = 2 };

/// Seams for tests. Unset members fall back to the real behavior.
struct Hooks {
  /// Replaces evaluate_corpus in the evaluate command.
  std::function<eval::ScoreMatrix(const std::filesystem::path&, const std::filesystem::path&)> evaluate;
  /// Replaces the generated_at clock in the generate command.
  std::function<std::string()> clock;
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks = {});

}  // namespace docforge::cli
