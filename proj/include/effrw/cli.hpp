#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "effrw/rewrite.hpp"

namespace effrw::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_parse_or_type = 1,
  exit_certification = 2,
  exit_fuel = 3,
  exit_usage = 4,
};

enum class Command { Check, Normalize, Trace, Certify, Search, Graph, Theories };
enum class Format { Text, Json };

struct Invocation {
  Command command = Command::Check;
  std::vector<std::string> builtins;
  std::vector<std::string> theory_paths;
  std::optional<std::string> term_text;
  /// `-` means standard input.
  std::optional<std::string> term_path;
  /// `name:type` declarations for free variables (check command).
  std::vector<std::string> var_decls;
  Strategy strategy;
  std::optional<std::size_t> fuel;
  Format format = Format::Text;
  bool show_trace = false;
  unsigned workers = 1;
  std::size_t search_bound = 8;
  std::optional<std::string> output_path;
};

/// Name of the environment variable holding the default fuel.
inline constexpr const char* fuel_env = "EFFRW_FUEL";

/// Parses argv-style arguments (without the program name). Returns nullopt
/// after writing a diagnostic to `err`; `exit_code` receives the code to
/// return (0 for --help).
std::optional<Invocation> parse_args(const std::vector<std::string>& args, std::ostream& out,
                                     std::ostream& err, int& exit_code);

int execute(const Invocation& inv, std::istream& in, std::ostream& out, std::ostream& err);

/// parse_args followed by execute.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace effrw::cli
