#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace tubelab::cli {

enum class Command { tube, scan, sample, mmdist, audit };
enum class Format { json, csv };

struct RunConfig {
  Command command = Command::tube;
  /// Subcommand parameters keyed by flag name without the leading dashes.
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  /// Empty means standard output.
  std::string output_path;
  Format format = Format::json;
  unsigned threads = 1;
};

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 2;
inline constexpr int kNonConvergence = 3;

/// Builds the output document for a configuration. Throws the library's
/// error types; unknown parameter keys raise DomainError.
std::string render(const RunConfig& config);

/// Renders and writes the document (atomically when output_path is set).
/// Diagnostics go to err; returns one of the exit statuses above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (TUBELAB_THREADS caps the worker count) and calls run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tubelab::cli
