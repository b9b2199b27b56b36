#ifndef SPECKLE_CLI_COMMAND_HPP
#define SPECKLE_CLI_COMMAND_HPP

#include <speckle/cli.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace speckle::cli
{

struct OptionDef
{
  std::string key;
  std::string fallback;
  std::string help;
};

/// Typed, validated access to resolved settings. Every parse failure throws
/// UsageError naming the key.
class Settings
{
public:
  explicit Settings(RunConfig values) : mValues(std::move(values)) {}

  const RunConfig& values() const { return mValues; }

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  double positive_real(const std::string& key) const;
  long long integer(const std::string& key, long long min) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  /// Absent when the value is "none".
  std::optional<double> optional_real(const std::string& key) const;
  /// Comma-separated, whitespace-trimmed, empty items dropped.
  std::vector<std::string> list(const std::string& key) const;

  [[noreturn]] void reject(const std::string& key, const std::string& why) const;

private:
  RunConfig mValues;
};

struct Context
{
  std::ostream& out;
  std::ostream& err;
  std::filesystem::path outputDir;
};

struct Command
{
  std::string name;
  std::string help;
  std::vector<OptionDef> options;
  void (*run)(const Settings&, Context&);
};

const std::vector<Command>& commands();

} // namespace speckle::cli

#endif // SPECKLE_CLI_COMMAND_HPP
