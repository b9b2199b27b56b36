#ifndef SPECKLE_CLI_HPP
#define SPECKLE_CLI_HPP

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/// Command surface: synth, train, simulate, analyze and benchmark. Every run
/// writes resolved.cfg and manifest.json next to its outputs.
///
/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
namespace speckle::cli
{

/// Default output root when a command has no explicit output directory.
inline constexpr const char* kOutputRootEnv = "SPECKLE_OUTPUT_ROOT";

/// Malformed flags, config files or option values.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Flat key-value settings, kept sorted so serialization is canonical.
using RunConfig = std::map<std::string, std::string>;

/// `key = value` lines; blank lines and `#` comments are ignored. Duplicate
/// keys and lines without `=` throw UsageError naming the line.
RunConfig parse_run_config(std::string_view text);

std::string format_run_config(const RunConfig& cfg);

/// Reads a key-value file, or the "config" object of a run manifest when the
/// file content is JSON.
RunConfig load_run_config(const std::string& path);

/// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

int cli_main(int argc, const char* const* argv);

} // namespace speckle::cli

#endif // SPECKLE_CLI_HPP
