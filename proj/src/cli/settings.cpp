#include "command.hpp"

#include <charconv>
#include <cmath>

namespace speckle::cli
{

const std::string& Settings::text(const std::string& key) const
{
  const auto it = mValues.find(key);
  if (it == mValues.end())
    throw UsageError("missing setting '" + key + "'");
  return it->second;
}

void Settings::reject(const std::string& key, const std::string& why) const
{
  const auto it = mValues.find(key);
  const std::string got = it == mValues.end() ? "" : it->second;
  throw UsageError("invalid value for '" + key + "' ('" + got + "'): " + why);
}

double Settings::real(const std::string& key) const
{
  const std::string& s = text(key);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() ||
      !std::isfinite(v))
    reject(key, "expected a finite number");
  return v;
}

double Settings::positive_real(const std::string& key) const
{
  const double v = real(key);
  if (!(v > 0.0))
    reject(key, "must be positive");
  return v;
}

long long Settings::integer(const std::string& key, long long min) const
{
  const std::string& s = text(key);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    reject(key, "expected an integer");
  if (v < min)
    reject(key, "must be at least " + std::to_string(min));
  return v;
}

std::uint64_t Settings::unsigned_integer(const std::string& key) const
{
  const std::string& s = text(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    reject(key, "expected a non-negative integer");
  return v;
}

std::optional<double> Settings::optional_real(const std::string& key) const
{
  if (text(key) == "none")
    return std::nullopt;
  return real(key);
}

std::vector<std::string> Settings::list(const std::string& key) const
{
  std::vector<std::string> items;
  const std::string& s = text(key);
  std::size_t start = 0;
  while (start <= s.size())
  {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    std::string item = s.substr(start, end - start);
    const auto first = item.find_first_not_of(" \t");
    if (first != std::string::npos)
      items.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return items;
}

} // namespace speckle::cli
