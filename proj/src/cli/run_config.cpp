#include <speckle/cli.hpp>

#include <speckle/text_io.hpp>

#include <json.hpp>

#include <algorithm>

namespace speckle::cli
{

namespace
{

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// A `#` starts a comment at line start or after whitespace.
std::string_view strip_comment(std::string_view line)
{
  for (std::size_t i = 0; i < line.size(); ++i)
    if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t'))
      return line.substr(0, i);
  return line;
}

} // namespace

RunConfig parse_run_config(std::string_view text)
{
  RunConfig cfg;
  std::size_t lineNo = 0;
  while (!text.empty())
  {
    ++lineNo;
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const std::string_view line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineNo);
    if (eq == std::string_view::npos)
      throw UsageError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw UsageError(where + ": missing key");
    if (!cfg.emplace(key, value).second)
      throw UsageError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

std::string format_run_config(const RunConfig& cfg)
{
  std::string out;
  for (const auto& [key, value] : cfg)
    out += key + " = " + value + "\n";
  return out;
}

RunConfig load_run_config(const std::string& path)
{
  const std::string text = read_text_file(path);
  const auto first = std::find_if(text.begin(), text.end(), [](char c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  });
  if (first == text.end() || *first != '{')
    return parse_run_config(text);

  nlohmann::json doc;
  try
  {
    doc = nlohmann::json::parse(text);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw UsageError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object())
    throw UsageError(path + ": manifest has no config object");
  RunConfig cfg;
  for (const auto& [key, value] : doc["config"].items())
  {
    if (!value.is_string())
      throw UsageError(path + ": config value for '" + key + "' is not a string");
    cfg[key] = value.get<std::string>();
  }
  return cfg;
}

} // namespace speckle::cli
