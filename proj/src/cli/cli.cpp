#include "command.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace speckle::cli
{

namespace
{

std::string flag_name(const std::string& key)
{
  std::string flag = "--" + key;
  for (char& c : flag)
    if (c == '_')
      c = '-';
  return flag;
}

struct Binding
{
  const Command* command = nullptr;
  CLI::App* app = nullptr;
  std::string configPath;
  std::map<std::string, std::string> flags;
};

RunConfig resolve(const Binding& b)
{
  RunConfig cfg;
  for (const auto& opt : b.command->options)
    cfg[opt.key] = opt.fallback;

  if (!b.configPath.empty())
    for (const auto& [key, value] : load_run_config(b.configPath))
    {
      if (!cfg.contains(key))
        throw UsageError("unknown key '" + key + "' in " + b.configPath);
      cfg[key] = value;
    }

  for (const auto& opt : b.command->options)
    if (b.app->count(flag_name(opt.key)) > 0)
      cfg[opt.key] = b.flags.at(opt.key);

  if (cfg["output"].empty())
  {
    const char* root = std::getenv(kOutputRootEnv);
    const std::filesystem::path base = root && *root ? root : "runs";
    cfg["output"] = (base / b.command->name).string();
  }
  return cfg;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err)
{
  CLI::App app{"Speckle pattern synthesis, training and ghost-imaging simulation",
               "speckle"};
  app.require_subcommand(1);

  std::vector<Binding> bindings(commands().size());
  for (std::size_t i = 0; i < commands().size(); ++i)
  {
    Binding& b = bindings[i];
    b.command = &commands()[i];
    b.app = app.add_subcommand(b.command->name, b.command->help);
    b.app->add_option("--config", b.configPath,
                      "key = value settings file or run manifest");
    for (const auto& opt : b.command->options)
    {
      const std::string shown = opt.fallback.empty() ? "\"\"" : opt.fallback;
      b.app->add_option(flag_name(opt.key), b.flags[opt.key],
                        opt.help + " [" + shown + "]");
    }
  }

  try
  {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  }
  catch (const CLI::ParseError& e)
  {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const Binding* active = nullptr;
  for (const auto& b : bindings)
    if (b.app->parsed())
      active = &b;

  try
  {
    const Settings settings(resolve(*active));
    Context ctx{out, err, settings.text("output")};
    active->command->run(settings, ctx);
    return 0;
  }
  catch (const UsageError& e)
  {
    err << "speckle " << active->command->name << ": " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception& e)
  {
    err << "speckle " << active->command->name << ": " << e.what() << "\n";
    return 1;
  }
}

int cli_main(int argc, const char* const* argv)
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

} // namespace speckle::cli
